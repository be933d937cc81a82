"""One-mode Gaussian channels in the difference/sum position representation.

A channel acts on ``rho(x, r) = <r - x/2| rho |r + x/2>`` through a kernel
``J(x_f, r_f; x_i, r_i)``.  Three functional forms occur: a Gaussian form
(``GF``) and Gaussian forms multiplied by one (``DELTA1``) or two
(``DELTA2``) delta factors.  On Gaussian states every channel acts as the
affine map ``(sigma, d) -> (T sigma T^T + N, T d + tau)``; covariances use the
convention in which the vacuum has ``sigma = 1/2``.

Two tuple conventions are offered.  ``"kernel"`` (the default) is the affine
map the kernel actually implements, which composes as a homomorphism under
:func:`concat`.  ``"printed"`` keeps the historical closed forms for the delta
kinds, whose ``T`` carries the opposite overall sign (so the identity kernel
maps to ``T = -1``, the parity).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from . import TOL
from ._gaussint import Kernel, NonIntegrable

__all__ = [
    "OMEGA",
    "Kind",
    "SingularClass",
    "InvalidForm",
    "NonIntegrable",
    "NoMasterEquation",
    "GaussianForm",
    "GaussianTuple",
    "GaussianState",
    "enforce_tp_hp",
    "tuple_from_form",
    "tuple_by_integration",
    "is_cp",
    "cp_closed_form",
    "apply_to_gaussian",
    "apply_by_integration",
    "singular_class",
    "form_class",
    "concat",
    "is_gaussian_unitary",
    "master_equation",
    "LiouvillianCoefficients",
]

OMEGA = np.array([[0.0, 1.0], [-1.0, 0.0]])
SV_RTOL = 1e-10


class Kind(str, enum.Enum):
    GF = "gf"
    DELTA1 = "delta1"
    DELTA2 = "delta2"


class SingularClass(str, enum.Enum):
    NONSINGULAR = "nonsingular"
    A1 = "A1"
    A2 = "A2"


class InvalidForm(ValueError):
    """Coefficients violate the hermiticity or trace conditions of the kind."""


class NoMasterEquation(Exception):
    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


def _vec(x, n: int, name: str) -> tuple[float, ...]:
    arr = np.asarray(x if x is not None else [0.0] * n)
    if arr.shape != (n,):
        raise InvalidForm(f"{name} needs {n} entries, got shape {arr.shape}")
    if np.iscomplexobj(arr) and np.any(arr.imag != 0):
        raise InvalidForm(f"{name} must be real (hermiticity)")
    arr = arr.real.astype(float)
    if not np.all(np.isfinite(arr)):
        raise InvalidForm(f"{name} must be finite")
    return tuple(float(v) for v in arr)


@dataclass(frozen=True)
class GaussianForm:
    """Coefficients of one functional form.

    Exponent: ``i(b1 x_f r_f + b2 x_f r_i + b3 x_i r_f + b4 x_i r_i + c1 x_f
    + c2 x_i) - a1 x_f^2 - a2 x_f x_i - a3 x_i^2 - e1 r_f^2 - e2 r_f r_i
    - e3 r_i^2 - d1 r_f - d2 r_i``.  ``DELTA1`` multiplies by
    ``delta(alpha x_f - beta x_i)``; ``DELTA2`` by
    ``delta(gamma r_f - eta r_i) delta(alpha x_f - beta x_i)``.
    """

    kind: Kind
    a: tuple[float, float, float] = (0.0, 0.0, 0.0)
    b: tuple[float, float, float, float] = (0.0, 0.0, 0.0, 0.0)
    c: tuple[float, float] = (0.0, 0.0)
    e: tuple[float, float, float] = (0.0, 0.0, 0.0)
    d: tuple[float, float] = (0.0, 0.0)
    alpha: float = 0.0
    beta: float = 0.0
    gamma: float = 0.0
    eta: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        for name, n in (("a", 3), ("b", 4), ("c", 2), ("e", 3), ("d", 2)):
            object.__setattr__(self, name, _vec(getattr(self, name), n, name))
        for name in ("alpha", "beta", "gamma", "eta"):
            v = getattr(self, name)
            if isinstance(v, complex) or not math.isfinite(float(v)):
                raise InvalidForm(f"{name} must be a finite real")
            object.__setattr__(self, name, float(v))

    @property
    def ratio_a(self) -> float:
        """A = alpha / beta."""
        return self.alpha / self.beta

    @property
    def ratio_eta(self) -> float:
        """eta / gamma."""
        return self.eta / self.gamma

    @property
    def normalization(self) -> float:
        if self.kind is Kind.GF:
            return abs(self.b[2]) / (2 * math.pi)
        if self.kind is Kind.DELTA1:
            e1 = self.e[0]
            return abs(self.beta) * math.sqrt(e1 / math.pi) * math.exp(-self.d[0] ** 2 / (4 * e1))
        return abs(self.beta * self.gamma)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "a": list(self.a),
            "b": list(self.b),
            "c": list(self.c),
            "e": list(self.e),
            "d": list(self.d),
            "alpha": self.alpha,
            "beta": self.beta,
            "gamma": self.gamma,
            "eta": self.eta,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GaussianForm":
        known = {"kind", "a", "b", "c", "e", "d", "alpha", "beta", "gamma", "eta"}
        extra = set(data) - known
        if extra:
            raise InvalidForm(f"unknown fields {sorted(extra)}")
        if "kind" not in data:
            raise InvalidForm("missing 'kind'")
        try:
            kind = Kind(data["kind"])
        except ValueError as exc:
            raise InvalidForm(f"unknown kind {data['kind']!r}") from exc
        return cls(kind, **{k: v for k, v in data.items() if k != "kind"})


@dataclass(frozen=True)
class GaussianTuple:
    t: np.ndarray
    n: np.ndarray
    tau: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float).reshape(2, 2)
        n = np.asarray(self.n, dtype=float).reshape(2, 2)
        if not np.allclose(n, n.T, atol=1e-12, rtol=1e-9):
            raise ValueError("N must be symmetric")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "n", (n + n.T) / 2)
        object.__setattr__(self, "tau", np.asarray(self.tau, dtype=float).reshape(2))

    @classmethod
    def identity(cls) -> "GaussianTuple":
        return cls(np.eye(2), np.zeros((2, 2)), np.zeros(2))

    def then(self, first: "GaussianTuple") -> "GaussianTuple":
        """The tuple of ``self`` applied after ``first``."""
        return GaussianTuple(
            self.t @ first.t,
            self.t @ first.n @ self.t.T + self.n,
            self.t @ first.tau + self.tau,
        )

    @property
    def c_matrix(self) -> np.ndarray:
        """``N + i Omega - i T Omega T^T``."""
        return self.n + 1j * OMEGA - 1j * self.t @ OMEGA @ self.t.T

    def to_dict(self) -> dict:
        return {"T": self.t.tolist(), "N": self.n.tolist(), "tau": self.tau.tolist()}


@dataclass(frozen=True)
class GaussianState:
    sigma: np.ndarray
    d: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def __post_init__(self):
        s = np.asarray(self.sigma, dtype=float).reshape(2, 2)
        if not np.allclose(s, s.T, atol=1e-12, rtol=0):
            raise ValueError("covariance must be symmetric")
        object.__setattr__(self, "sigma", (s + s.T) / 2)
        object.__setattr__(self, "d", np.asarray(self.d, dtype=float).reshape(2))

    def is_admissible(self, tol: float = TOL) -> bool:
        """Uncertainty relation ``sigma + i Omega / 2 >= 0``."""
        return bool(np.linalg.eigvalsh(self.sigma + 0.5j * OMEGA)[0] >= -tol)


# -- normalisation -------------------------------------------------------------


def enforce_tp_hp(raw: GaussianForm) -> GaussianForm:
    """Overwrite the dependent coefficients so the trace condition holds.

    Coefficients are real by construction.  ``GF`` is returned unchanged once
    ``b3 != 0`` and the absence of ``e``/``d`` terms are checked; ``DELTA1``
    gets ``e3 = e2^2 / (4 e1)`` and ``d2 = e2 d1 / (2 e1)``, which makes the
    ``r_f`` integral a complete square (``d1`` is kept because compositions
    with displacing unitaries produce it; it is zero for the usual family);
    ``DELTA2`` gets ``e3`` and ``d2`` from the constraint along the ``r``
    delta.  Idempotent.
    """
    if raw.kind is Kind.GF:
        if raw.b[2] == 0:
            raise InvalidForm("GF requires b3 != 0")
        if any(raw.e) or any(raw.d):
            raise InvalidForm("GF carries no e or d terms")
        return raw
    if raw.beta == 0:
        raise InvalidForm("beta must be nonzero")
    if raw.kind is Kind.DELTA1:
        e1, e2, _ = raw.e
        if not e1 > 0:
            raise InvalidForm("DELTA1 requires e1 > 0")
        d1 = raw.d[0]
        return replace(raw, e=(e1, e2, e2 * e2 / (4 * e1)), d=(d1, e2 * d1 / (2 * e1)), gamma=0.0, eta=0.0)
    if raw.gamma == 0:
        raise InvalidForm("gamma must be nonzero")
    k = raw.eta / raw.gamma
    e1, e2, _ = raw.e
    d1, _ = raw.d
    return replace(raw, e=(e1, e2, -(e1 * k * k + e2 * k)), d=(d1, -d1 * k))


# -- closed-form tuples -------------------------------------------------------------


def _p_coefficients(f: GaussianForm) -> tuple[float, float, float]:
    """Quadratic coefficients of the characteristic-function exponent.

    ``P12`` here is the symmetric-matrix entry, half the coefficient of
    ``k1 k2``, so that ``N = 2 [[-P22, P12], [P12, -P11]]`` is the covariance.
    """
    a1, a2, a3 = f.a
    b1, _, b3, _ = f.b
    am = f.ratio_a
    lam3 = a1 + am * a2 + am * am * a3
    if f.kind is Kind.DELTA2:
        return -lam3, 0.0, 0.0
    e1 = f.e[0]
    lam1 = b1 + am * b3
    return -(lam3 + lam1 * lam1 / (4 * e1)), -lam1 / (4 * e1), -1 / (4 * e1)


def _phi1(f: GaussianForm) -> float:
    _, b2, b3, b4 = f.b
    b1 = f.b[0]
    am = f.ratio_a
    if f.kind is Kind.DELTA1:
        e1, e2, _ = f.e
        return am * (b4 - b3 * e2 / (2 * e1)) - b1 * e2 / (2 * e1) + b2
    k = f.ratio_eta
    return am * k * b3 + am * b4 + k * b1 + b2


def tuple_from_form(f: GaussianForm, convention: str = "kernel") -> GaussianTuple:
    """Affine tuple ``(T, N, tau)`` of a normalised form in closed form."""
    if convention not in ("kernel", "printed"):
        raise ValueError("convention must be 'kernel' or 'printed'")
    if f.kind is Kind.GF:
        a1, a2, a3 = f.a
        b1, b2, b3, b4 = f.b
        c1, c2 = f.c
        if b3 == 0:
            raise InvalidForm("GF requires b3 != 0")
        t = [[-b4 / b3, 1 / b3], [b1 * b4 / b3 - b2, -b1 / b3]]
        off = a2 / b3 - 2 * a3 * b1 / b3**2
        n = [[2 * a3 / b3**2, off], [off, -2 * (-a3 * b1**2 / b3**2 + a2 * b1 / b3 - a1)]]
        tau = [-c2 / b3, b1 * c2 / b3 - c1]
        return GaussianTuple(t, n, tau)
    if f.beta == 0 or (f.kind is Kind.DELTA2 and f.gamma == 0) or (f.kind is Kind.DELTA1 and f.e[0] <= 0):
        raise InvalidForm("form is not normalisable")
    p11, p12, p22 = _p_coefficients(f)
    am = f.ratio_a
    first = f.e[1] / (2 * f.e[0]) if f.kind is Kind.DELTA1 else -f.ratio_eta
    t = np.array([[first, 0.0], [_phi1(f), -am]])
    if convention == "kernel":
        t = -t
    n = 2 * np.array([[-p22, p12], [p12, -p11]])
    tau = [0.0, -(am * f.c[1] + f.c[0])]
    if f.kind is Kind.DELTA1 and f.d[0]:
        shift = -f.d[0] / (2 * f.e[0])
        tau = [shift, tau[1] - (f.b[0] + am * f.b[2]) * shift]
    return GaussianTuple(t, n, tau)


def is_cp(t: GaussianTuple, tol: float = TOL) -> bool:
    """Complete positivity: ``N + i Omega - i T Omega T^T >= 0``."""
    return bool(np.linalg.eigvalsh(t.c_matrix)[0] >= -tol)


def cp_closed_form(f: GaussianForm) -> float:
    """Slack of the closed-form CP inequality (CP iff the value is >= 0).

    ``GF`` forms are handled through the eigenvalues of their tuple's matrix.
    """
    if f.kind is Kind.GF:
        return float(np.linalg.eigvalsh(tuple_from_form(f).c_matrix)[0])
    p11, p12, p22 = _p_coefficients(f)
    al, be = f.alpha, f.beta
    if f.kind is Kind.DELTA1:
        e1, e2, _ = f.e
        root = math.sqrt(al**2 * e2**2 + 4 * al * be * e2 * e1
                         + 4 * be**2 * e1**2 * (4 * p12**2 + (p11 - p22) ** 2 + 1))
        # both signs must hold: P11 + P22 <= -|root / (2 beta e1)|
        return -abs(root / (2 * be * e1)) - (p11 + p22)
    ga, et = f.gamma, f.eta
    root = math.sqrt((be * ga - al * et) ** 2 + be**2 * ga**2 * p11**2)
    return -abs(root / (be * ga)) - p11


def apply_to_gaussian(t: GaussianTuple, s: GaussianState) -> GaussianState:
    return GaussianState(t.t @ s.sigma @ t.t.T + t.n, t.t @ s.d + t.tau)


def singular_class(t: GaussianTuple) -> SingularClass:
    sv = np.linalg.svd(t.t, compute_uv=False)
    if sv[0] == 0:
        return SingularClass.A1
    rank = int(np.sum(sv > SV_RTOL * sv[0]))
    return {2: SingularClass.NONSINGULAR, 1: SingularClass.A2}[rank] if rank else SingularClass.A1


def is_gaussian_unitary(f: GaussianForm, tol: float = 1e-12) -> bool:
    if f.kind is Kind.DELTA1:
        return False
    if any(abs(v) > tol for v in f.a):
        return False
    if f.kind is Kind.GF:
        return abs(f.b[1] - f.b[2]) <= tol * max(1.0, abs(f.b[2]))
    return abs(f.alpha * f.eta - f.beta * f.gamma) <= tol * max(1.0, abs(f.beta * f.gamma))


def form_class(f: GaussianForm, tol: float = 1e-12) -> str:
    """Name of the form's family among unitaries and singular channels.

    One of ``A_U`` and ``delta_U`` (unitaries with the Gaussian or the
    two-delta form), ``A_A2`` (singular Gaussian form), ``delta_A2^alpha``,
    ``delta_A2^e2``, ``delta_A2^alpha,e2`` (singular one-delta forms with the
    named coefficient zero), ``delta_A1``, or the bare kind value otherwise.
    """
    if is_gaussian_unitary(f, tol):
        return "A_U" if f.kind is Kind.GF else "delta_U"
    if f.kind is Kind.GF:
        return "A_A2" if abs(f.b[1]) <= tol * max(1.0, abs(f.b[2])) else f.kind.value
    if f.kind is Kind.DELTA2:
        return f.kind.value
    zero_alpha = abs(f.alpha) <= tol * abs(f.beta)
    zero_e2 = abs(f.e[1]) <= tol * f.e[0]
    if zero_alpha and zero_e2:
        return "delta_A1" if abs(f.b[1]) <= tol * max(1.0, np.max(np.abs(f.b))) else "delta_A2^alpha,e2"
    if zero_alpha:
        return "delta_A2^alpha"
    if zero_e2:
        return "delta_A2^e2"
    return f.kind.value


# -- kernels and exact integration ------------------------------------------------------


def _kernel(f: GaussianForm, xf: str, rf: str, xi: str, ri: str) -> Kernel:
    k = Kernel.empty([xf, rf, xi, ri])
    a1, a2, a3 = f.a
    b1, b2, b3, b4 = f.b
    for (u, v), coef in zip([(xf, rf), (xf, ri), (xi, rf), (xi, ri)], (b1, b2, b3, b4)):
        k.add_quad(u, v, 1j * coef)
    k.add_lin(xf, 1j * f.c[0])
    k.add_lin(xi, 1j * f.c[1])
    for (u, v), coef in zip([(xf, xf), (xf, xi), (xi, xi)], (a1, a2, a3)):
        k.add_quad(u, v, -coef)
    for (u, v), coef in zip([(rf, rf), (rf, ri), (ri, ri)], f.e):
        k.add_quad(u, v, -coef)
    k.add_lin(rf, -f.d[0])
    k.add_lin(ri, -f.d[1])
    k.pref = f.normalization
    if f.kind is not Kind.GF:
        k.add_delta({xf: f.alpha, xi: -f.beta})
    if f.kind is Kind.DELTA2:
        k.add_delta({rf: f.gamma, ri: -f.eta})
    return k


def _state_kernel(s: GaussianState, x: str, r: str) -> Kernel:
    """``rho(x, r) = int dp W(r, p) exp(-i p x)`` for a Gaussian Wigner function."""
    inv = np.linalg.inv(s.sigma)
    k = Kernel.empty([r, "_p", x])
    v = [r, "_p"]
    for i in range(2):
        for j in range(2):
            k.add_quad(v[i], v[j], -0.5 * inv[i, j])
    ell = inv @ s.d
    k.add_lin(r, ell[0])
    k.add_lin("_p", ell[1])
    k.c = -0.5 * s.d @ inv @ s.d
    k.pref = 1 / (2 * math.pi * math.sqrt(np.linalg.det(s.sigma)))
    k.add_quad("_p", x, -1j)
    return k.integrate_all(["_p"])


def _read_state(k: Kernel, x: str, r: str, tol: float = 1e-8) -> GaussianState:
    """Covariance and mean of ``rho(x, r)`` given as a kernel."""
    w = k * Kernel.empty(["_p"])
    w.add_quad("_p", x, 1j)
    w = w.integrate_all([x])
    if w.deltas:
        raise NonIntegrable("output state is not a Gaussian function")
    names = [r, "_p"]
    q = np.array([[w.q[w.index(u), w.index(v)] for v in names] for u in names])
    ell = np.array([w.lin(u) for u in names])
    if np.max(np.abs(q.imag)) > tol * max(1.0, np.max(np.abs(q))) or np.max(np.abs(ell.imag)) > tol * max(
        1.0, np.max(np.abs(ell))
    ):
        raise NonIntegrable("output Wigner function is not real")
    sigma = np.linalg.inv(-2 * q.real)
    return GaussianState(sigma, sigma @ ell.real)


def apply_by_integration(f: GaussianForm, s: GaussianState) -> GaussianState:
    """Output state from integrating the kernel against the input state."""
    k = _kernel(f, "xf", "rf", "xi", "ri") * _state_kernel(s, "xi", "ri")
    return _read_state(k.integrate_all(["xi", "ri"]), "xf", "rf")


def tuple_by_integration(f: GaussianForm) -> GaussianTuple:
    """Affine tuple recovered from three integrated input states."""
    base = GaussianState(np.eye(2))
    out0 = apply_by_integration(f, base)
    cols = [apply_by_integration(f, GaussianState(np.eye(2), unit)).d - out0.d for unit in np.eye(2)]
    t = np.column_stack(cols)
    return GaussianTuple(t, out0.sigma - t @ t.T, out0.d)


def _canonical_form(k: Kernel, tol: float = 1e-8) -> GaussianForm:
    """Read a composed kernel over (xf, rf, xi, ri) back as a normalised form."""
    names = ["xf", "rf", "xi", "ri"]
    k = k.copy()
    if any(abs(h) > tol * max(1.0, np.max(np.abs(w))) for w, h in k.deltas):
        raise NonIntegrable("shifted delta factors do not occur in normalised forms")
    rows = np.array([w for w, _ in k.deltas]).reshape(-1, 4)
    kind = {0: Kind.GF, 1: Kind.DELTA1, 2: Kind.DELTA2}.get(len(rows))
    if kind is None:
        raise NonIntegrable("more than two delta factors")
    ix = {n: i for i, n in enumerate(names)}
    alpha = beta = gamma = eta = 0.0
    if kind is Kind.DELTA1:
        w = rows[0]
        if abs(w[ix["rf"]]) > tol * np.max(np.abs(w)) or abs(w[ix["ri"]]) > tol * np.max(np.abs(w)):
            raise NonIntegrable("delta mixes position and sum coordinates")
        scale = -w[ix["xi"]]
        if abs(scale) <= tol * np.max(np.abs(w)):
            raise NonIntegrable("delta does not involve x_i")
        k.pref /= abs(scale)
        alpha, beta = w[ix["xf"]] / scale, 1.0
        k.deltas = []
        k._substitute(ix["xi"], np.array([alpha, 0, 0, 0.0]), 0.0)
        k = k.embed(names)
    elif kind is Kind.DELTA2:
        m = rows[:, [ix["xi"], ix["rf"]]]
        if abs(np.linalg.det(m)) <= tol * np.max(np.abs(rows)) ** 2:
            raise NonIntegrable("delta factors do not fix x_i and r_f")
        red = np.diag([-1.0, 1.0]) @ np.linalg.solve(m, rows)
        k.pref /= abs(np.linalg.det(m))
        if np.max(np.abs(red[0, [ix["rf"], ix["ri"]]])) > tol or np.max(np.abs(red[1, [ix["xf"], ix["xi"]]])) > tol:
            raise NonIntegrable("delta mixes position and sum coordinates")
        alpha, beta, gamma, eta = red[0, ix["xf"]], 1.0, 1.0, -red[1, ix["ri"]]
        k.deltas = []
        k._substitute(ix["xi"], np.array([alpha, 0, 0, 0.0]), 0.0)
        k = k.embed(names)
        k._substitute(ix["rf"], np.array([0, 0, 0, eta]), 0.0)
        k = k.embed(names)
    scale = max(1.0, float(np.max(np.abs(k.q))), float(np.max(np.abs(k.l))))

    def real(z, what):
        if abs(z.imag) > tol * scale:
            raise NonIntegrable(f"{what} is not real")
        return float(z.real)

    def imag(z, what):
        if abs(z.real) > tol * scale:
            raise NonIntegrable(f"{what} is not imaginary")
        return float(z.imag)

    a = (-real(k.quad("xf", "xf"), "a1"), -real(k.quad("xf", "xi"), "a2"), -real(k.quad("xi", "xi"), "a3"))
    e = (-real(k.quad("rf", "rf"), "e1"), -real(k.quad("rf", "ri"), "e2"), -real(k.quad("ri", "ri"), "e3"))
    b = tuple(imag(k.quad(u, v), f"b{n}") for n, (u, v) in
              enumerate([("xf", "rf"), ("xf", "ri"), ("xi", "rf"), ("xi", "ri")], 1))
    c = (imag(k.lin("xf"), "c1"), imag(k.lin("xi"), "c2"))
    d = (-real(k.lin("rf"), "d1"), -real(k.lin("ri"), "d2"))
    if kind is Kind.DELTA1:
        d = (d[0], e[1] * d[0] / (2 * e[0]))
    if kind is Kind.DELTA2:
        # the exponent of the r-coordinates is fixed on the delta support
        e, d = (0.0, 0.0, e[2]), (0.0, d[1])
    f = GaussianForm(kind, a, b, c, e, d, alpha, beta, gamma, eta)
    pref = complex(k.pref) * np.exp(k.c)
    if kind is Kind.GF and f.b[2] == 0:
        raise NonIntegrable("composed Gaussian form has b3 = 0")
    if abs(pref.imag) > 1e-6 * abs(pref) or abs(pref.real - f.normalization) > 1e-6 * f.normalization:
        raise NonIntegrable(f"prefactor {pref} differs from the trace normalisation {f.normalization}")
    return f


def concat(f1: GaussianForm, f2: GaussianForm) -> GaussianForm:
    """Form of ``f1`` applied after ``f2``, integrating the intermediate coordinates."""
    k1 = _kernel(enforce_tp_hp(f1), "xf", "rf", "xm", "rm")
    k2 = _kernel(enforce_tp_hp(f2), "xm", "rm", "xi", "ri")
    k = (k1 * k2).integrate_all(["xm", "rm"])
    return _canonical_form(k.embed(["xf", "rf", "xi", "ri"]))


# -- master equations ------------------------------------------------------------------

COEFFICIENT_NAMES = ("L_c", "X_xx", "X_xr", "X_rr", "Y_xx", "Y_xr", "Y_rx", "Y_rr", "Z_xx", "Z_xr", "Z_rr")


@dataclass(frozen=True)
class LiouvillianCoefficients:
    t: np.ndarray
    values: dict[str, np.ndarray]

    def __getitem__(self, name: str) -> np.ndarray:
        return self.values[name]


def master_equation(kind: Kind | str, path: Sequence[tuple[float, GaussianForm]],
                    rtol: float = 1e-6) -> LiouvillianCoefficients:
    """Liouvillian coefficients along a sampled path of one-delta or two-delta forms.

    Time derivatives are finite differences on the supplied grid.  Raises
    :class:`NoMasterEquation` for singular samples or when ``c1 + A c2`` is not
    proportional to ``A = alpha / beta``.
    """
    kind = Kind(kind)
    if kind is Kind.GF:
        raise ValueError("only the delta kinds are covered")
    if len(path) < 3:
        raise ValueError("need at least three samples")
    ts = np.array([float(t) for t, _ in path])
    if np.any(np.diff(ts) <= 0):
        raise ValueError("sample times must increase")
    forms = [enforce_tp_hp(f) for _, f in path]
    if any(f.kind is not kind for f in forms):
        raise ValueError(f"all samples must be of kind {kind.value}")
    for t, f in zip(ts, forms):
        if singular_class(tuple_from_form(f)) is not SingularClass.NONSINGULAR:
            raise NoMasterEquation(f"singular sample at t={t}")
    am = np.array([f.ratio_a for f in forms])
    cc = np.array([f.c[0] + f.ratio_a * f.c[1] for f in forms])
    ratio = cc / am
    if np.max(np.abs(ratio - ratio[0])) > rtol * max(1.0, np.max(np.abs(ratio))):
        raise NoMasterEquation("c(t) is not proportional to A(t)")

    def col(fn):
        return np.array([fn(f) for f in forms], dtype=float)

    def dot(v):
        return np.gradient(v, ts)

    a1, a2, a3 = col(lambda f: f.a[0]), col(lambda f: f.a[1]), col(lambda f: f.a[2])
    b1, b2, b3, b4 = (col(lambda f, i=i: f.b[i]) for i in range(4))
    lam3 = a1 + am * a2 + am**2 * a3
    da = dot(am)
    zero = np.zeros_like(ts, dtype=complex)
    v = {name: zero.copy() for name in COEFFICIENT_NAMES}
    v["Y_xx"] = (da / am).astype(complex)
    v["Z_xx"] = (2 * lam3 * da / am - dot(lam3)).astype(complex)
    if kind is Kind.DELTA1:
        e1, e2 = col(lambda f: f.e[0]), col(lambda f: f.e[1])
        de1, de2 = dot(e1), dot(e2)
        lam1, lam2 = b1 + am * b3, b2 + am * b4
        dl1, dl2 = dot(lam1), dot(lam2)
        v["L_c"] = v["Y_rr"] = (de1 / e1 - de2 / e2).astype(complex)
        v["X_rr"] = (de1 / (4 * e1**2) - de2 / (2 * e1 * e2)).astype(complex)
        v["Y_xr"] = 1j * (lam1 * de2 / (e1 * e2) + lam2 * da / (e2 * am) - lam1 * de1 / (2 * e1**2) - dl2 / e2)
        v["Z_xx"] = v["Z_xx"] + (lam1**2 / 2 * (de2 / (e1 * e2) - de1 / (2 * e1**2))
                                 + lam1 / e2 * (lam2 * da / am - dl2))
        v["Z_xr"] = 1j * (da / am * (e1 * lam2 / e2 - lam1 / 2) + dl1 / 2 - dl2 * e1 / e2
                          + lam2 / 2 * (de2 / e2 - de1 / e1))
    else:
        bm = np.array([1 / f.ratio_eta for f in forms])
        db = dot(bm)
        lam = b1 + am * b3 + bm * (b2 + am * b4)
        v["Y_rr"] = (db / bm).astype(complex)
        v["Z_xr"] = 1j * (dot(lam) / 2 - lam / 2 * (da / am + db / bm))
    return LiouvillianCoefficients(ts, v)
