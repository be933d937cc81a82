"""Dynamical maps whose instantaneous channels cross divisibility classes.

Two models are provided: a collision model interpolating between the identity
and the approximate NOT gate, and a two-level atom coupled to one cavity mode
(Jaynes-Cummings) prepared in a coherent field state.  :func:`sweep` samples
any time-parametrised channel on a grid and classifies every point.

Qubit convention for the cavity model: ``sigma_z = diag(1, -1)``, so ``|0>`` is
the excited and ``|1>`` the ground state of ``omega_a sigma_z / 2``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, TextIO

import numpy as np

from .chanrep import I2, PAULIS, SX, SY, SZ, ptm_from_map
from .divisibility import DivisibilityReport, classify
from .lindblad import GeneratorMatrix
from .normalform import special_orthogonal_form


class TruncationInsufficient(RuntimeError):
    """Population reached the top of the truncated Fock space."""


class DimensionMismatch(ValueError):
    """System and environment dimensions do not fit the global Hamiltonian."""


# -- static channels ---------------------------------------------------------


def a_not() -> np.ndarray:
    """Approximate NOT gate rho -> (2 * 1 - rho) / 3, Bloch contraction -1/3."""
    return np.diag([1.0, -1 / 3, -1 / 3, -1 / 3])


def approx_transposition() -> np.ndarray:
    return np.diag([1.0, 1 / 3, -1 / 3, 1 / 3])


def dephasing_map(t: float, gamma: float) -> np.ndarray:
    c = math.exp(-gamma * t)
    return np.diag([1.0, c, c, 1.0])


_F_PTM = ptm_from_map(lambda x: (1j / 3) * sum(s @ x - x @ s for s in (SX, SY, SZ)))


def collision_not_map(t: float) -> np.ndarray:
    """cos^2 t id + sin^2 t A_NOT + sin(2t)/2 F, F[rho] = (i/3) sum_j [sigma_j, rho]."""
    return (
        math.cos(t) ** 2 * np.eye(4)
        + math.sin(t) ** 2 * a_not()
        + 0.5 * math.sin(2 * t) * _F_PTM
    )


# -- Jaynes-Cummings model -----------------------------------------------------


def default_n_fock(alpha: complex) -> int:
    a = abs(alpha)
    return math.ceil(a * a + 6 * a + 10)


@dataclass(frozen=True)
class JcParams:
    alpha: complex
    g: float
    omega_a: float
    omega_f: float
    n_fock: int | None = None

    def __post_init__(self):
        if self.n_fock is None:
            object.__setattr__(self, "n_fock", default_n_fock(self.alpha))
        if self.n_fock < default_n_fock(self.alpha):
            raise ValueError(f"n_fock must be at least {default_n_fock(self.alpha)}")
        if not all(math.isfinite(x) for x in (self.g, self.omega_a, self.omega_f)):
            raise ValueError("couplings and frequencies must be finite")

    @property
    def detuning(self) -> float:
        return self.omega_f - self.omega_a


def coherent_state(alpha: complex, n_fock: int) -> np.ndarray:
    n = np.arange(n_fock)
    logfact = np.array([math.lgamma(k + 1) for k in n])
    amp = np.exp(-abs(alpha) ** 2 / 2 - 0.5 * logfact) * np.power(complex(alpha), n)
    return amp.astype(complex)


def jc_hamiltonian(p: JcParams) -> np.ndarray:
    """omega_a sigma_z / 2 + omega_f a^dag a + g (sigma_- a^dag + sigma_+ a), qubit first."""
    n = p.n_fock
    a = np.diag(np.sqrt(np.arange(1, n)), 1).astype(complex)
    num = np.diag(np.arange(n)).astype(complex)
    sp = np.array([[0, 1], [0, 0]], dtype=complex)  # |e><g| with |e> = |0>
    sm = sp.T
    h = 0.5 * p.omega_a * np.kron(SZ, np.eye(n)) + p.omega_f * np.kron(I2, num)
    h += p.g * (np.kron(sm, a.conj().T) + np.kron(sp, a))
    return h


class JcPropagator:
    """Reusable spectral propagator for the cavity model."""

    def __init__(self, p: JcParams, leak_tol: float = 1e-6):
        self.p = p
        self.leak_tol = leak_tol
        self.energies, self.vecs = np.linalg.eigh(jc_hamiltonian(p))
        field_state = coherent_state(p.alpha, p.n_fock)
        basis = np.eye(2)
        # V^dag (|i> (x) |alpha>) for the two qubit basis states
        self._coeffs = [self.vecs.conj().T @ np.kron(basis[i], field_state) for i in range(2)]

    def states(self, t: float) -> list[np.ndarray]:
        phase = np.exp(-1j * self.energies * t)
        return [self.vecs @ (phase * c) for c in self._coeffs]

    def leakage(self, psis: Iterable[np.ndarray]) -> float:
        n = self.p.n_fock
        worst = 0.0
        for psi in psis:
            amp = psi.reshape(2, n)
            worst = max(worst, float(np.sum(np.abs(amp[:, n - 2 :]) ** 2)))
        return worst

    def channel(self, t: float) -> np.ndarray:
        psis = self.states(t)
        leak = self.leakage(psis)
        if leak > self.leak_tol:
            raise TruncationInsufficient(f"population {leak:.2e} in the top Fock levels at t={t}")
        n = self.p.n_fock
        mats = [psi.reshape(2, n) for psi in psis]
        # images of the matrix units |i><j| after tracing out the field
        units = [[mats[i] @ mats[j].conj().T for j in range(2)] for i in range(2)]

        def fn(x):
            return sum(x[i, j] * units[i][j] for i in range(2) for j in range(2))

        e = ptm_from_map(fn)
        e[0] = [1.0, 0.0, 0.0, 0.0] if np.max(np.abs(e[0] - [1, 0, 0, 0])) <= 1e-8 else e[0]
        return e


def jc_channel(t: float, p: JcParams) -> np.ndarray:
    """Reduced qubit channel of the cavity model at time t."""
    return JcPropagator(p).channel(t)


def jc_excited_probability(t: float, p: JcParams, n_terms: int = 200) -> float:
    """Analytic excited-state population for a ground-state atom."""
    n = np.arange(n_terms)
    a2 = abs(p.alpha) ** 2
    logp = -a2 + n * math.log(a2) - np.array([math.lgamma(k + 1) for k in n]) if a2 > 0 else None
    pn = np.exp(logp) if logp is not None else (n == 0).astype(float)
    d2 = p.detuning**2
    omega = np.sqrt(d2 / 4 + p.g**2 * n)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(omega > 0, d2 / (4 * omega**2), 1.0)
    sz = -np.sum(pn * (ratio + (1 - ratio) * np.cos(2 * omega * t)))
    return float((sz + 1) / 2)


def jc_simulated_excited_probability(t: float, prop: JcPropagator) -> float:
    """Excited population from the simulated channel applied to the ground state."""
    e = prop.channel(t)
    # ground state |1><1| has Bloch vector (0, 0, -1)
    z = e[3, 0] - e[3, 3]
    return float((1 + z) / 2)


# -- first-order generator of a product initial state -----------------------------


def exact_first_order_generator(h_global, rho_e) -> GeneratorMatrix:
    """Pauli matrix of rho -> i tr_E [rho (x) rho_E, H] for a qubit system."""
    h = np.asarray(h_global, dtype=complex)
    rho_e = np.asarray(rho_e, dtype=complex)
    d_e = rho_e.shape[0]
    if rho_e.shape != (d_e, d_e) or h.shape != (2 * d_e, 2 * d_e):
        raise DimensionMismatch(f"H is {h.shape}, expected {(2 * d_e, 2 * d_e)}")

    def ptrace_env(m):
        return np.trace(m.reshape(2, d_e, 2, d_e), axis1=1, axis2=3)

    def fn(x):
        big = np.kron(x, rho_e)
        return 1j * ptrace_env(big @ h - h @ big)

    m = ptm_from_map(fn)
    m[0] = 0.0
    return GeneratorMatrix(m)


# -- sweeps -----------------------------------------------------------------------


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    report: DivisibilityReport | None
    lambdas: np.ndarray | None = None
    tau: np.ndarray | None = None
    error: str | None = field(default=None)

    @property
    def is_gap(self) -> bool:
        return self.report is None


def sweep(channel_at: Callable[[float], np.ndarray], t0: float, t1: float, steps: int,
          strict: tuple[type[BaseException], ...] = ()) -> list[TrajectoryPoint]:
    """Classify ``channel_at(t)`` on ``steps`` uniformly spaced times in [t0, t1].

    Exceptions raised by the source become gap points carrying the message,
    except those listed in ``strict``, which propagate.
    """
    if steps < 2:
        raise ValueError("steps must be at least 2")
    points = []
    for t in np.linspace(t0, t1, steps):
        try:
            e = channel_at(float(t))
            form = special_orthogonal_form(e)
            points.append(TrajectoryPoint(float(t), classify(e), form.lambdas, form.gamma))
        except strict:
            raise
        except Exception as exc:  # noqa: BLE001 - recorded as a gap marker
            points.append(TrajectoryPoint(float(t), None, error=f"{type(exc).__name__}: {exc}"))
    return points


CSV_COLUMNS = ("t", "delta", "chi", "det", "lambda1", "lambda2", "lambda3", "tau1", "tau2", "tau3")


def _fmt(x) -> str:
    return "nan" if x is None else format(float(x), ".17g")


def write_csv(points: Iterable[TrajectoryPoint], out: TextIO) -> None:
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for p in points:
        if p.is_gap:
            writer.writerow([_fmt(p.t)] + ["nan"] * (len(CSV_COLUMNS) - 1))
            continue
        r = p.report
        writer.writerow(
            [_fmt(p.t), _fmt(r.delta), str(r.chi), _fmt(r.det)]
            + [_fmt(v) for v in p.lambdas]
            + [_fmt(v) for v in p.tau]
        )


def transitions(values: Iterable) -> list[tuple[int, object]]:
    """Run-length view of a sequence: (first index, value) at each change."""
    out: list[tuple[int, object]] = []
    for i, v in enumerate(values):
        if not out or out[-1][1] != v:
            out.append((i, v))
    return out
