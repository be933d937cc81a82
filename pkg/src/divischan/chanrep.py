"""Representations of qubit states and channels.

A qubit map is stored as its Pauli transfer matrix (PTM), the real 4x4 matrix

    E_ij = 1/2 tr(sigma_i E[sigma_j]),   sigma = (1, X, Y, Z).

Row 0 equals (1, 0, 0, 0) exactly when the map preserves the trace.  The
lower-right 3x3 block ``delta`` and the first column ``t`` act on Bloch
vectors as ``r -> delta @ r + t``.

The Choi state is ``tau = (id (x) E)[|Omega><Omega|]`` with the maximally
entangled state ``|Omega> = (|00> + |11>)/sqrt(2)``; it has unit trace.  Its
Pauli coefficients are collected in ``R = E @ PHI_T`` with
``PHI_T = diag(1, 1, -1, 1)``, so that ``tau = 1/4 sum_ij R_ij sigma_j (x) sigma_i``
(input factor first, output factor second).

PTMs, density matrices and Kraus operators are plain numpy arrays; the
functions in this module validate shapes and never mutate their inputs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import RANK_TOL, TOL

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (I2, SX, SY, SZ)
PHI_T = np.diag([1.0, 1.0, -1.0, 1.0])
OMEGA = np.array([1, 0, 0, 1], dtype=complex) / np.sqrt(2)


class NotTracePreservingWarning(UserWarning):
    """Emitted when a Kraus set is not complete, sum K^dag K != 1."""


class NotCompletelyPositive(ValueError):
    """Raised when a Choi state has eigenvalues below ``-tol``."""


def as_ptm(e) -> np.ndarray:
    """Validate and return ``e`` as a real 4x4 float array."""
    m = np.asarray(e)
    if m.shape != (4, 4):
        raise ValueError(f"a Pauli transfer matrix must be 4x4, got {m.shape}")
    if np.iscomplexobj(m):
        if np.max(np.abs(m.imag), initial=0.0) > 1e-12:
            raise ValueError("a Pauli transfer matrix must be real")
        m = m.real
    return np.array(m, dtype=float)


def shift(e) -> np.ndarray:
    """The shift vector t of a PTM (first column below row 0)."""
    return as_ptm(e)[1:, 0].copy()


def delta_block(e) -> np.ndarray:
    """The 3x3 block Delta of a PTM acting on Bloch vectors."""
    return as_ptm(e)[1:, 1:].copy()


def ptm_from_blocks(t, delta) -> np.ndarray:
    """Assemble a trace-preserving PTM from the shift t and block Delta."""
    m = np.zeros((4, 4))
    m[0, 0] = 1.0
    m[1:, 0] = t
    m[1:, 1:] = delta
    return m


def pauli_channel(lambdas) -> np.ndarray:
    """The unital channel diag(1, l1, l2, l3)."""
    l1, l2, l3 = lambdas
    return np.diag([1.0, l1, l2, l3])


# -- states ---------------------------------------------------------------


def density_from_bloch(r) -> np.ndarray:
    """rho = (1 + r . sigma) / 2."""
    r = np.asarray(r, dtype=float)
    return 0.5 * (I2 + r[0] * SX + r[1] * SY + r[2] * SZ)


def bloch_from_density(rho) -> np.ndarray:
    """Bloch vector r_k = tr(sigma_k rho)."""
    rho = np.asarray(rho, dtype=complex)
    return np.array([np.trace(s @ rho).real for s in PAULIS[1:]])


def is_density_matrix(rho, tol: float = TOL) -> bool:
    """Hermitian, unit trace, and positive semidefinite within ``tol``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        return False
    if np.linalg.norm(rho - rho.conj().T) > tol:
        return False
    if abs(np.trace(rho) - 1) > tol:
        return False
    return bool(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)).min() >= -tol)


def purity(rho) -> float:
    """tr(rho^2)."""
    rho = np.asarray(rho, dtype=complex)
    return float(np.trace(rho @ rho).real)


# -- channel representations ---------------------------------------------


def ptm_from_map(fn) -> np.ndarray:
    """PTM of an arbitrary linear map given as a callable on 2x2 matrices."""
    m = np.empty((4, 4))
    for j, sj in enumerate(PAULIS):
        out = np.asarray(fn(sj), dtype=complex)
        for i, si in enumerate(PAULIS):
            m[i, j] = 0.5 * np.trace(si @ out).real
    return m


def kraus_completeness_error(ks: Sequence[np.ndarray]) -> float:
    """Spectral norm of sum_k K_k^dag K_k - 1."""
    s = sum(np.asarray(k).conj().T @ np.asarray(k) for k in ks)
    return float(np.linalg.norm(s - I2, 2))


def ptm_from_kraus(ks: Sequence[np.ndarray], tol: float = TOL) -> np.ndarray:
    """PTM of rho -> sum_k K_k rho K_k^dag.

    A non-complete Kraus set still yields its PTM; a
    :class:`NotTracePreservingWarning` is emitted as a diagnostic.
    """
    ks = [np.asarray(k, dtype=complex) for k in ks]
    if not ks or any(k.shape != (2, 2) for k in ks):
        raise ValueError("Kraus operators must be a non-empty list of 2x2 matrices")
    err = kraus_completeness_error(ks)
    if err > tol:
        warnings.warn(
            f"Kraus set is not trace preserving (deviation {err:.3e})",
            NotTracePreservingWarning,
            stacklevel=2,
        )
    return ptm_from_map(lambda x: sum(k @ x @ k.conj().T for k in ks))


@dataclass(frozen=True)
class ChoiState:
    """Choi state tau = (id (x) E)[|Omega><Omega|] and its Pauli coefficients."""

    m: np.ndarray
    r_matrix: np.ndarray

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.m)

    def block_traces(self) -> np.ndarray:
        """2x2 array of traces of the 2x2 blocks (input index by input index)."""
        return np.array(
            [[np.trace(self.m[2 * a : 2 * a + 2, 2 * b : 2 * b + 2]) for b in range(2)] for a in range(2)]
        )


def choi_from_ptm(e) -> ChoiState:
    """Choi state of a PTM."""
    e = as_ptm(e)
    r = e @ PHI_T
    tau = np.zeros((4, 4), dtype=complex)
    for i in range(4):
        for j in range(4):
            if r[i, j] != 0.0:
                tau += r[i, j] * np.kron(PAULIS[j], PAULIS[i])
    tau /= 4
    return ChoiState(m=0.5 * (tau + tau.conj().T), r_matrix=r)


def ptm_from_choi(tau) -> np.ndarray:
    """Inverse of :func:`choi_from_ptm`; accepts a 4x4 matrix or a ChoiState."""
    tau = np.asarray(tau.m if isinstance(tau, ChoiState) else tau, dtype=complex)
    if tau.shape != (4, 4):
        raise ValueError("a Choi state must be 4x4")
    r = np.array(
        [[np.trace(tau @ np.kron(PAULIS[j], PAULIS[i])).real for j in range(4)] for i in range(4)]
    )
    return r @ PHI_T


def _fix_phase(k: np.ndarray) -> np.ndarray:
    idx = np.unravel_index(np.argmax(np.abs(k)), k.shape)
    phase = k[idx] / abs(k[idx])
    return k / phase


def kraus_rank(tau, rank_tol: float = RANK_TOL) -> int:
    """Number of Choi eigenvalues above ``rank_tol`` times the largest one."""
    tau = tau.m if isinstance(tau, ChoiState) else np.asarray(tau)
    w = np.linalg.eigvalsh(tau)
    return int(np.sum(w > rank_tol * max(w.max(), 0.0)))


def kraus_from_choi(c, tol: float = TOL, rank_tol: float = RANK_TOL) -> list[np.ndarray]:
    """Canonical Kraus operators from the eigendecomposition of the Choi state.

    Each eigenvector of ``2 tau`` with eigenvalue ``mu`` gives
    ``K = sqrt(mu) * unvec(v)``; the phase of every ``K`` is fixed so that its
    largest-magnitude entry is real and positive.
    """
    tau = c.m if isinstance(c, ChoiState) else np.asarray(c, dtype=complex)
    w, v = np.linalg.eigh(2 * tau)
    if w.min() < -2 * tol:
        raise NotCompletelyPositive(f"Choi state has eigenvalue {w.min() / 2:.3e}")
    cutoff = rank_tol * max(w.max(), 0.0)
    ops = []
    for mu, vec in sorted(zip(w, v.T), key=lambda p: -p[0]):
        if mu > cutoff:
            # vec[2*a + b] is the coefficient of |a>_in |b>_out, i.e. K[b, a].
            ops.append(_fix_phase(np.sqrt(mu) * vec.reshape(2, 2).T))
    return ops


@dataclass(frozen=True)
class CptpReport:
    """Diagnostics of a candidate qubit channel; never raised, always returned."""

    tp: bool
    cp: bool
    min_eigenvalue: float
    kraus_rank: int
    unital: bool
    det: float

    @property
    def cptp(self) -> bool:
        return self.tp and self.cp


def is_trace_preserving(e, tol: float = TOL) -> bool:
    e = as_ptm(e)
    return bool(np.max(np.abs(e[0] - [1, 0, 0, 0])) <= tol)


def is_unital(e, tol: float = TOL) -> bool:
    return bool(np.max(np.abs(as_ptm(e)[1:, 0])) <= tol)


def is_cptp(e, tol: float = TOL, rank_tol: float = RANK_TOL) -> CptpReport:
    """Trace preservation, complete positivity and related diagnostics."""
    e = as_ptm(e)
    c = choi_from_ptm(e)
    w = c.eigenvalues
    return CptpReport(
        tp=is_trace_preserving(e, tol),
        cp=bool(w.min() >= -tol),
        min_eigenvalue=float(w.min()),
        kraus_rank=kraus_rank(c, rank_tol),
        unital=is_unital(e, tol),
        det=float(np.linalg.det(e)),
    )


def apply(e, rho) -> np.ndarray:
    """Apply a PTM to a 2x2 operator, rho -> 1/2 sum_i (E c)_i sigma_i."""
    e = as_ptm(e)
    rho = np.asarray(rho, dtype=complex)
    coeffs = np.array([np.trace(s @ rho) for s in PAULIS])
    out = e @ coeffs
    return 0.5 * sum(ci * s for ci, s in zip(out, PAULIS))


def compose(e2, e1) -> np.ndarray:
    """The map e2 after e1."""
    return as_ptm(e2) @ as_ptm(e1)


def adjoint(e) -> np.ndarray:
    """Hilbert-Schmidt adjoint; the transpose in the Hermitian Pauli basis."""
    return as_ptm(e).T.copy()


# -- helpers for sampling --------------------------------------------------


def random_kraus(rng: np.random.Generator, n_kraus: int = 4) -> list[np.ndarray]:
    """Kraus operators of a random CPTP map from a Haar-like random isometry."""
    g = rng.normal(size=(2 * n_kraus, 2)) + 1j * rng.normal(size=(2 * n_kraus, 2))
    q, r = np.linalg.qr(g)
    q = q * (np.diag(r) / np.abs(np.diag(r)))
    return [q[2 * k : 2 * k + 2, :] for k in range(n_kraus)]


def random_cptp(rng: np.random.Generator, n_kraus: int = 4) -> np.ndarray:
    """PTM of a random CPTP qubit channel."""
    ks = random_kraus(rng, n_kraus)
    return ptm_from_map(lambda x: sum(k @ x @ k.conj().T for k in ks))


def random_unitary(rng: np.random.Generator) -> np.ndarray:
    """Haar-random 2x2 unitary."""
    g = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def unitary_ptm(u) -> np.ndarray:
    """PTM of the conjugation rho -> U rho U^dag."""
    u = np.asarray(u, dtype=complex)
    return ptm_from_map(lambda x: u @ x @ u.conj().T)


def random_density(rng: np.random.Generator) -> np.ndarray:
    """Random mixed qubit state with Bloch vector uniform in the ball."""
    v = rng.normal(size=3)
    v *= rng.uniform() ** (1 / 3) / np.linalg.norm(v)
    return density_from_bloch(v)


# -- vectorised helpers for large samples -----------------------------------

# _CHOI_BASIS[i, j] = sigma_j (x) sigma_i, the Choi image of R_ij
_CHOI_BASIS = np.array([[np.kron(PAULIS[j], PAULIS[i]) for j in range(4)] for i in range(4)])


def choi_matrices(ptms) -> np.ndarray:
    """Choi states of a stack of PTMs, shape (n, 4, 4)."""
    e = np.asarray(ptms, dtype=float)
    r = e * np.diag(PHI_T)[None, None, :]
    return np.einsum("nij,ijab->nab", r, _CHOI_BASIS) / 4


def is_cptp_batch(ptms, tol: float = TOL) -> np.ndarray:
    """Boolean CPTP verdicts for a stack of PTMs (same rule as :func:`is_cptp`)."""
    e = np.asarray(ptms, dtype=float)
    tp = np.max(np.abs(e[:, 0, :] - np.array([1.0, 0, 0, 0])), axis=1) <= tol
    w = np.linalg.eigvalsh(choi_matrices(e))
    return tp & (w[:, 0] >= -tol)


def random_cptp_batch(rng: np.random.Generator, n: int, n_kraus: int = 4) -> np.ndarray:
    """PTMs of ``n`` independent random CPTP channels, shape (n, 4, 4)."""
    g = rng.normal(size=(n, 2 * n_kraus, 2)) + 1j * rng.normal(size=(n, 2 * n_kraus, 2))
    q, r = np.linalg.qr(g)
    d = np.diagonal(r, axis1=1, axis2=2)
    q = q * (d / np.abs(d))[:, None, :]
    ks = q.reshape(n, n_kraus, 2, 2)
    paulis = np.array(PAULIS)
    # E_ij = 1/2 sum_k tr(sigma_i K sigma_j K^dag)
    out = np.einsum("iab,nkbc,jcd,nkad->nij", paulis, ks, paulis, ks.conj(), optimize=True)
    return 0.5 * out.real
