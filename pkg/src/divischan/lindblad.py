"""Generators of qubit dynamical semigroups in the Pauli representation.

A generator is stored as a real 4x4 matrix ``L`` acting on Pauli coordinates,
with an all-zero first row (the generated maps preserve the trace).  The
Lindblad data use the traceless orthonormal basis ``F_i = sigma_i / sqrt(2)``:

    L[rho] = i [rho, H] + sum_ij G_ij (F_i rho F_j^dag - 1/2 {F_j^dag F_i, rho}).

``L`` is of Lindblad form exactly when ``G`` is positive semidefinite, which is
the same as conditional complete positivity of its Choi matrix.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from . import TOL
from .chanrep import OMEGA, PAULIS, as_ptm, choi_from_ptm

F_BASIS = tuple(p / np.sqrt(2) for p in PAULIS)
PAIR_TOL = 1e-7


class SingularChannel(ValueError):
    """The channel has a zero eigenvalue and therefore no logarithm."""


class NonDiagonalizable(ValueError):
    """The channel is not diagonalisable; its logarithms are not enumerated."""


@dataclass(frozen=True)
class GeneratorMatrix:
    m: np.ndarray
    branch_tag: int | str = "principal"


@dataclass(frozen=True)
class LindbladData:
    h: np.ndarray
    g: np.ndarray

    @property
    def rates(self) -> np.ndarray:
        """Eigenvalues of G, sorted in descending order."""
        return np.sort(np.linalg.eigvalsh(self.g))[::-1]


def _as_matrix(l) -> np.ndarray:
    return as_ptm(l.m if isinstance(l, GeneratorMatrix) else l)


def _complex_ptm(fn) -> np.ndarray:
    m = np.empty((4, 4), dtype=complex)
    for j, sj in enumerate(PAULIS):
        out = fn(sj)
        for i, si in enumerate(PAULIS):
            m[i, j] = 0.5 * np.trace(si @ out)
    return m


# PTMs of rho -> F_i rho F_j^dag, flattened; used to read off the
# coefficient matrix of a generator
_SANDWICH = np.column_stack(
    [
        _complex_ptm(lambda x, a=fa, b=fb: a @ x @ b.conj().T).ravel()
        for fa in F_BASIS
        for fb in F_BASIS
    ]
)


def build_generator(h, g) -> GeneratorMatrix:
    """Pauli-basis matrix of i[rho, H] + sum G_ij (F_i rho F_j^dag - 1/2 {F_j^dag F_i, rho})."""
    h = np.asarray(h, dtype=complex)
    g = np.asarray(g, dtype=complex)
    if h.shape != (2, 2) or g.shape != (3, 3):
        raise ValueError("H must be 2x2 and G must be 3x3")
    f = F_BASIS[1:]
    anti = sum(g[i, j] * f[j].conj().T @ f[i] for i in range(3) for j in range(3))

    def gen(x):
        out = 1j * (x @ h - h @ x) - 0.5 * (anti @ x + x @ anti)
        for i in range(3):
            for j in range(3):
                out = out + g[i, j] * f[i] @ x @ f[j].conj().T
        return out

    m = _complex_ptm(gen)
    if np.max(np.abs(m.imag)) > 1e-10:
        raise ValueError("H and G must be Hermitian for a real generator")
    m = m.real.copy()
    m[0] = 0.0
    return GeneratorMatrix(m)


def coefficient_matrix(l) -> np.ndarray:
    """Hermitian 4x4 c with L[rho] = sum_ij c_ij F_i rho F_j^dag (F_0 = 1/sqrt2)."""
    m = _as_matrix(l)
    c = np.linalg.solve(_SANDWICH, m.astype(complex).ravel()).reshape(4, 4)
    return 0.5 * (c + c.conj().T)


def hg_decomposition(l) -> LindbladData:
    """Split a trace-annihilating, Hermiticity-preserving generator into (H, G)."""
    c = coefficient_matrix(l)
    g = c[1:, 1:]
    # L[rho] = sum G F rho F^dag + A rho + rho A^dag with
    # A = c_00/2 * 1/2 + (1/sqrt2) sum_i c_i0 F_i
    a = 0.25 * c[0, 0] * np.eye(2) + sum(c[i, 0] * F_BASIS[i] for i in range(1, 4)) / np.sqrt(2)
    h = 0.5j * (a - a.conj().T)
    return LindbladData(h=0.5 * (h + h.conj().T), g=g)


def generator_choi(l) -> np.ndarray:
    """Choi matrix (id (x) L)[|Omega><Omega|] of a generator."""
    return choi_from_ptm(_as_matrix(l)).m


def ccp_spectrum(l) -> np.ndarray:
    """Eigenvalues of w_perp tau_L w_perp on the complement of |Omega>.

    With the unit-trace Choi normalisation these are half the eigenvalues
    of G, so the sign pattern is that of the Lindblad rates.
    """
    tau = generator_choi(l)
    # orthonormal basis of the complement of |Omega>
    q, _ = np.linalg.qr(np.column_stack([OMEGA, np.eye(4, dtype=complex)]))
    comp = q[:, 1:4]
    return np.linalg.eigvalsh(comp.conj().T @ tau @ comp)


def is_ccp(l, tol: float = TOL) -> bool:
    """Conditional complete positivity: w_perp tau_L w_perp >= 0."""
    return bool(ccp_spectrum(l)[0] >= -tol)


def exp_generator(l, t: float = 1.0) -> np.ndarray:
    """PTM exp(t L)."""
    if t < 0:
        raise ValueError("t must be non-negative")
    return expm(t * _as_matrix(l))


# -- real logarithms -------------------------------------------------------


def _groups(w: np.ndarray) -> list[list[int]]:
    """Group eigenvalues equal within the relative pairing tolerance."""
    groups: list[list[int]] = []
    for i in range(len(w)):
        for g in groups:
            ref = w[g[0]]
            if abs(w[i] - ref) <= PAIR_TOL * max(1.0, abs(ref)):
                g.append(i)
                break
        else:
            groups.append([i])
    return groups


def _kernel(m: np.ndarray, dim: int) -> np.ndarray:
    _, sv, vt = np.linalg.svd(m)
    scale = max(1.0, sv[0])
    if sv[len(sv) - dim] > 1e-6 * scale:
        raise NonDiagonalizable("eigenspace dimension is smaller than the multiplicity")
    return vt[len(sv) - dim :].conj().T


def culver_screen(delta, tol: float = TOL) -> bool:
    """Necessary spectral condition for a real logarithm of a real matrix.

    Every negative eigenvalue has to appear with even multiplicity (complex
    eigenvalues of a real matrix come in conjugate pairs automatically).
    """
    w = np.linalg.eigvals(np.asarray(delta, dtype=float))
    real = w[np.abs(w.imag) <= PAIR_TOL * np.maximum(1.0, np.abs(w))].real
    neg = real[real < 0]
    return all(len(g) % 2 == 0 for g in _groups(neg))


def _blocks(delta: np.ndarray):
    """Real invariant blocks of delta: (kind, basis, data)."""
    w = np.linalg.eigvals(delta)
    if np.min(np.abs(w)) <= TOL:
        raise SingularChannel("the channel has a zero eigenvalue")
    blocks = []
    used = np.zeros(len(w), bool)
    for i in range(len(w)):
        if used[i]:
            continue
        if abs(w[i].imag) > PAIR_TOL * max(1.0, abs(w[i])):
            j = next(
                j for j in range(len(w))
                if not used[j] and j != i and abs(w[j] - np.conj(w[i])) <= 1e-6 * max(1.0, abs(w[i]))
            )
            used[i] = used[j] = True
            z = w[i] if w[i].imag > 0 else w[j]
            v = _kernel(delta - z * np.eye(3), 1)[:, 0]
            # real basis (Re v, Im v) in which delta acts as [[a, b], [-b, a]]
            basis = np.column_stack([v.real, v.imag])
            blocks.append(("complex", basis, z))
            continue
        lam = w[i].real
        grp = [
            j for j in range(len(w))
            if not used[j] and abs(w[j].imag) <= PAIR_TOL * max(1.0, abs(w[j]))
            and abs(w[j].real - lam) <= PAIR_TOL * max(1.0, abs(lam))
        ]
        for j in grp:
            used[j] = True
        lam = float(np.mean(w[grp].real))
        basis = _kernel(delta - lam * np.eye(3), len(grp)).real
        if np.linalg.matrix_rank(basis, 1e-8) < len(grp):
            basis = np.linalg.qr(_kernel(delta - lam * np.eye(3), len(grp)))[0].real
        if lam < 0:
            if len(grp) % 2:
                return None
            blocks.append(("negative", basis, lam))
        else:
            blocks.append(("positive", basis, lam))
    return blocks


def _log_delta(blocks, ks: dict[int, int]) -> np.ndarray:
    """Assemble a real logarithm of delta for the branch choice ``ks``."""
    basis_cols, diag_blocks = [], []
    for idx, (kind, basis, val) in enumerate(blocks):
        k = ks.get(idx, 0)
        if kind == "complex":
            # delta (Re v, Im v) = (Re v, Im v) [[a, b], [-b, a]] with z = a + ib
            theta = np.angle(val) + 2 * np.pi * k
            r = np.log(abs(val))
            diag_blocks.append(np.array([[r, theta], [-theta, r]]))
            basis_cols.append(basis)
        elif kind == "negative":
            r = np.log(-val)
            for p in range(0, basis.shape[1], 2):
                diag_blocks.append(np.array([[r, (2 * k + 1) * np.pi], [-(2 * k + 1) * np.pi, r]]))
                basis_cols.append(basis[:, p : p + 2])
        else:
            r = np.log(val)
            n = basis.shape[1]
            if n >= 2 and k != 0:
                diag_blocks.append(np.array([[r, 2 * np.pi * k], [-2 * np.pi * k, r]]))
                basis_cols.append(basis[:, :2])
                for p in range(2, n):
                    diag_blocks.append(np.array([[r]]))
                    basis_cols.append(basis[:, p : p + 1])
            else:
                for p in range(n):
                    diag_blocks.append(np.array([[r]]))
                    basis_cols.append(basis[:, p : p + 1])
    p = np.column_stack(basis_cols)
    b = np.zeros((3, 3))
    pos = 0
    for blk in diag_blocks:
        n = blk.shape[0]
        b[pos : pos + n, pos : pos + n] = blk
        pos += n
    return (p @ b @ np.linalg.inv(p)).real


def _phi(lam: np.ndarray) -> np.ndarray:
    """(e^Lambda - 1) Lambda^-1 as the entire series, safe for singular Lambda."""
    aug = np.zeros((6, 6))
    aug[:3, :3] = lam
    aug[:3, 3:] = np.eye(3)
    return expm(aug)[:3, 3:]


def real_logarithms(e, k_window: int = 3) -> list[GeneratorMatrix]:
    """Real logarithms of a diagonalisable, non-singular TP channel.

    Branches: complex pairs take arg z + 2 pi k, negative pairs take the
    rotation angle (2k + 1) pi, and degenerate positive pairs take 2 pi k in
    addition to the principal branch, for |k| <= k_window.  The freedom of
    similarity transformations commuting with the channel is fixed at K = 1.
    Returns an empty list when the spectrum admits no real logarithm.
    """
    e = as_ptm(e)
    delta, t = e[1:, 1:], e[1:, 0]
    if not culver_screen(delta):
        return []
    blocks = _blocks(delta)
    if blocks is None:
        return []
    branchable = [i for i, (kind, basis, _) in enumerate(blocks)
                  if kind in ("complex", "negative") or basis.shape[1] >= 2]
    out: list[GeneratorMatrix] = []
    ks_range = range(-k_window, k_window + 1)
    for combo in itertools.product(ks_range, repeat=len(branchable)):
        ks = dict(zip(branchable, combo))
        lam = _log_delta(blocks, ks)
        # the shift column solves phi(Lambda) x = t
        x, *_ = np.linalg.lstsq(_phi(lam), t, rcond=None)
        m = np.zeros((4, 4))
        m[1:, 0] = x
        m[1:, 1:] = lam
        if np.linalg.norm(expm(m) - e) > 1e-8:
            continue
        if all(k == 0 for k in combo):
            tag: int | str = "principal"
        else:
            tag = combo[0] if len(combo) == 1 else int(np.sum(np.abs(combo)))
        out.append(GeneratorMatrix(m, tag))
    # the principal branch first, then by increasing |k|
    out.sort(key=lambda g: 0 if g.branch_tag == "principal" else 1 + abs(int(g.branch_tag)))
    return out


def principal_logarithm(e) -> GeneratorMatrix | None:
    """The k = 0 real logarithm, or None if the channel has none."""
    logs = real_logarithms(e, k_window=0)
    return logs[0] if logs else None
