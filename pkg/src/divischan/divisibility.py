"""Divisibility classes and entanglement breaking of qubit channels.

Membership tests return a :class:`Verdict`.  ``BOUNDARY`` marks a defining
inequality that holds only within the tolerance belt; the classes are closed
sets, so a boundary verdict counts as membership.  ``UNDECIDED`` is returned
where no complete criterion is available; it counts as non-membership when
the indicator ``delta`` is computed, and the report says so.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import asdict, dataclass, field

import numpy as np

from . import TOL
from .chanrep import (
    as_ptm,
    choi_from_ptm,
    choi_matrices,
    is_cptp,
    is_unital,
    kraus_rank,
)
from .lindblad import (
    NonDiagonalizable,
    SingularChannel,
    culver_screen,
    exp_generator,
    is_ccp,
    principal_logarithm,
    real_logarithms,
)
from .normalform import DecompositionFailed, lorentz_normal_form

K_WINDOW = 3


class NotCPTP(ValueError):
    """The input is not a completely positive trace-preserving map."""


class Verdict(str, enum.Enum):
    YES = "yes"
    NO = "no"
    BOUNDARY = "boundary"
    UNDECIDED = "undecided"

    @property
    def member(self) -> bool:
        """Membership used for indicators: yes and boundary count, undecided does not."""
        return self in (Verdict.YES, Verdict.BOUNDARY)


def _inequalities(values, tol: float) -> Verdict:
    """Verdict for a system of inequalities ``v >= 0``."""
    values = np.atleast_1d(np.asarray(values, dtype=float))
    if np.any(values < -tol):
        return Verdict.NO
    if np.any(values <= tol):
        return Verdict.BOUNDARY
    return Verdict.YES


def _require_cptp(e, tol: float) -> np.ndarray:
    e = as_ptm(e)
    if not is_cptp(e, tol).cptp:
        raise NotCPTP("input is not a CPTP qubit channel")
    return e


def pauli_lambdas(e, tol: float = TOL) -> np.ndarray | None:
    """(lambda1, lambda2, lambda3) if ``e`` is a Pauli channel, else None."""
    e = as_ptm(e)
    off = e - np.diag(np.diag(e))
    if np.max(np.abs(off)) > tol:
        return None
    return np.diag(e)[1:].copy()


# -- individual tests ----------------------------------------------------------


def is_divisible(e, tol: float = TOL) -> Verdict:
    """Divisibility from the Kraus rank.

    Kraus rank 4 channels are divisible, unital rank-3 channels are not and
    channels of rank at most 2 are.  Non-unital rank-3 channels have no
    criterion here and are reported as undecided.
    """
    e = _require_cptp(e, tol)
    rank = kraus_rank(choi_from_ptm(e))
    if rank == 4 or rank <= 2:
        return Verdict.YES
    return Verdict.NO if is_unital(e, tol) else Verdict.UNDECIDED


def is_p_divisible(e, tol: float = TOL) -> bool:
    """P-divisible iff det E >= 0."""
    e = _require_cptp(e, tol)
    return bool(np.linalg.det(e) >= -tol)


def cp_divisibility_values(e) -> tuple[np.ndarray, np.ndarray] | None:
    """Channel-level (s1, s2, s3) and the inequality values of the CP test.

    Returns None when the Lorentz normal form is not diagonal.
    """
    form = lorentz_normal_form(e)
    s = form.channel_s()
    if s is None:
        return None
    smin = np.min(np.abs(s))
    prod = float(np.prod(s))
    return s, np.array([smin**2 - prod, prod])


def is_cp_divisible(e, tol: float = TOL) -> Verdict:
    """CP-divisibility from the diagonal Lorentz normal form.

    Yes iff the form has rank below three or s_min^2 >= s1 s2 s3 > 0.
    Non-diagonal normal forms are undecided.
    """
    e = _require_cptp(e, tol)
    try:
        res = cp_divisibility_values(e)
    except DecompositionFailed:
        return Verdict.UNDECIDED
    if res is None:
        return Verdict.UNDECIDED
    s, (gap, prod) = res
    if np.sum(np.abs(s) > tol) < 3:
        return Verdict.YES
    if prod < -tol:
        return Verdict.NO
    if prod <= tol:
        # rank three with a vanishing product cannot happen; kept as boundary
        return Verdict.BOUNDARY
    return _inequalities([gap], tol)


def pauli_l_divisibility(lambdas, tol: float = TOL) -> Verdict:
    """Closed-form L-divisibility of a Pauli channel diag(1, lambda).

    Non-singular channels need a real logarithm (negative eigenvalues in
    equal pairs) and lambda_i / (lambda_j lambda_k) >= 1 for all three
    choices of i.  Singular channels lie only in the closure of the set, which
    they reach when two eigenvalues vanish and the third is non-negative.
    """
    lam = np.asarray(lambdas, dtype=float)
    small = np.abs(lam) <= tol
    if np.any(small):
        if np.sum(small) >= 2 and np.min(lam) >= -tol:
            return Verdict.BOUNDARY
        return Verdict.NO
    if not culver_screen(np.diag(lam)):
        return Verdict.NO
    ratios = [lam[i] / (lam[j] * lam[k]) - 1 for i, j, k in ((0, 1, 2), (1, 0, 2), (2, 0, 1))]
    return _inequalities(ratios, tol)


def is_l_divisible(e, tol: float = TOL, k_window: int = K_WINDOW) -> Verdict:
    """L-divisibility: existence of a logarithm of Lindblad form.

    Pauli channels use the closed form.  Other channels are screened by the
    spectral condition for real logarithms; the real logarithms with branch
    offsets |k| <= k_window are then tested for conditional complete
    positivity.  When the real logarithm is unique a failed test is a
    definite no, otherwise it is undecided.
    """
    e = _require_cptp(e, tol)
    lam = pauli_lambdas(e, tol)
    if lam is not None:
        return pauli_l_divisibility(lam, tol)
    try:
        logs = real_logarithms(e, k_window)
    except (SingularChannel, NonDiagonalizable):
        return Verdict.UNDECIDED
    if not logs:
        return Verdict.NO
    if any(is_ccp(g, tol) for g in logs):
        return Verdict.YES
    return Verdict.NO if len(logs) == 1 else Verdict.UNDECIDED


def nth_root_pauli(lambdas, n: int) -> np.ndarray | None:
    """A real n-th root of the Pauli channel diag(1, lambda), or None.

    For non-singular channels with a real logarithm L the root is exp(L / n)
    for the principal branch.  Otherwise roots are taken entrywise; a negative
    eigenvalue has a real even root only inside a degenerate pair, which is
    covered by the logarithm route.
    """
    lam = np.asarray(lambdas, dtype=float)
    e = np.diag(np.concatenate([[1.0], lam]))
    if np.all(np.abs(lam) > TOL) and culver_screen(np.diag(lam)):
        gen = principal_logarithm(e)
        if gen is not None:
            return exp_generator(gen, 1.0 / n)
    if n % 2 == 0 and np.any(lam < -TOL):
        return None
    roots = np.sign(lam) * np.abs(lam) ** (1.0 / n)
    return np.diag(np.concatenate([[1.0], roots]))


def is_infinitely_divisible_pauli(lambdas, tol: float = TOL, verify: bool = True) -> bool:
    """Infinite divisibility of a Pauli channel; the same set as L-divisibility.

    With ``verify`` the roots of order 2, 3, 5 and 10 are checked to be CPTP
    whenever the verdict is positive, and a warning is emitted otherwise.
    """
    verdict = pauli_l_divisibility(lambdas, tol).member
    if verdict and verify:
        for n in (2, 3, 5, 10):
            root = nth_root_pauli(lambdas, n)
            if root is None or not is_cptp(root, tol).cptp:
                warnings.warn(f"root of order {n} is not CPTP", RuntimeWarning, stacklevel=2)
    return verdict


def partial_transpose(tau) -> np.ndarray:
    """Partial transpose on the second factor of a two-qubit operator."""
    t = np.asarray(tau).reshape(2, 2, 2, 2)
    return t.transpose(0, 3, 2, 1).reshape(4, 4)


def is_entanglement_breaking(e, tol: float = TOL) -> bool:
    """PPT test of the Choi state, exact for qubit channels."""
    e = _require_cptp(e, tol)
    return bool(np.linalg.eigvalsh(partial_transpose(choi_from_ptm(e).m))[0] >= -tol)


def ppt_min_eigenvalues(ptms) -> np.ndarray:
    """Smallest eigenvalue of the partially transposed Choi state, batched."""
    taus = choi_matrices(ptms).reshape(-1, 2, 2, 2, 2).transpose(0, 1, 4, 3, 2).reshape(-1, 4, 4)
    return np.linalg.eigvalsh(taus)[:, 0]


def concurrence(rho) -> float:
    """Wootters concurrence of a two-qubit state."""
    rho = np.asarray(rho, dtype=complex)
    yy = np.kron(np.array([[0, -1j], [1j, 0]]), np.array([[0, -1j], [1j, 0]]))
    r = rho @ yy @ rho.conj() @ yy
    ev = np.sort(np.sqrt(np.abs(np.linalg.eigvals(r))))[::-1]
    return float(max(0.0, ev[0] - ev[1] - ev[2] - ev[3]))


# -- report ------------------------------------------------------------------

LABELS = ("L", "CP\\L", "P\\CP", "div\\P", "indivisible", "non-CP")


@dataclass(frozen=True)
class DivisibilityReport:
    in_c: bool
    in_div: Verdict | None = None
    in_p: bool | None = None
    in_cp: Verdict | None = None
    in_l: Verdict | None = None
    in_infty_pauli: Verdict | None = None
    eb: bool | None = None
    delta: float | None = None
    chi: int | None = None
    det: float | None = None
    diagnostics: tuple[str, ...] = field(default_factory=tuple)

    @property
    def label(self) -> str:
        """Region label: L, CP\\L, P\\CP, div\\P, indivisible or non-CP."""
        if not self.in_c:
            return "non-CP"
        if self.delta == 1:
            return "L"
        if self.delta == 2 / 3:
            return "CP\\L"
        if self.delta == 1 / 3:
            return "P\\CP"
        return "div\\P" if self.in_div is not None and self.in_div.member else "indivisible"

    def to_dict(self) -> dict:
        out = asdict(self)
        for key, value in out.items():
            if isinstance(value, Verdict):
                out[key] = value.value
        out["diagnostics"] = list(self.diagnostics)
        out["label"] = self.label
        return out


def _delta(in_p: bool, in_cp: Verdict, in_l: Verdict) -> float:
    if in_l.member:
        return 1.0
    if in_cp.member:
        return 2 / 3
    if in_p:
        return 1 / 3
    return 0.0


def classify(e, tol: float = TOL) -> DivisibilityReport:
    """Full divisibility report of a qubit channel."""
    e = as_ptm(e)
    rep = is_cptp(e, tol)
    if not rep.cptp:
        return DivisibilityReport(in_c=False, det=rep.det, diagnostics=("input is not CPTP",))
    notes: list[str] = []
    in_div = is_divisible(e, tol)
    if in_div is Verdict.UNDECIDED:
        notes.append("non-unital Kraus rank three: divisibility undecided")
    in_p = is_p_divisible(e, tol)
    in_cp = is_cp_divisible(e, tol) if in_p else Verdict.NO
    if in_cp is Verdict.UNDECIDED:
        notes.append("non-diagonal Lorentz normal form: CP-divisibility undecided")
    in_l = is_l_divisible(e, tol) if in_cp is not Verdict.NO else Verdict.NO
    if in_l.member and in_cp is Verdict.UNDECIDED:
        # a Lindblad logarithm settles CP-divisibility
        in_cp = Verdict.YES
    if in_l is Verdict.UNDECIDED:
        notes.append("no searched logarithm branch is of Lindblad form: L-divisibility undecided")
    lam = pauli_lambdas(e, tol)
    in_infty = pauli_l_divisibility(lam, tol) if lam is not None else Verdict.UNDECIDED
    if lam is None:
        notes.append("infinite divisibility is only decided for Pauli channels")
    for name, v in (("in_div", in_div), ("in_cp", in_cp), ("in_l", in_l)):
        if v is Verdict.BOUNDARY:
            notes.append(f"{name} on the boundary within tolerance")
    eb = is_entanglement_breaking(e, tol)
    return DivisibilityReport(
        in_c=True,
        in_div=in_div,
        in_p=in_p,
        in_cp=in_cp,
        in_l=in_l,
        in_infty_pauli=in_infty,
        eb=eb,
        delta=_delta(in_p, in_cp, in_l),
        chi=int(eb),
        det=rep.det,
        diagnostics=tuple(notes),
    )
