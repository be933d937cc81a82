"""Exact integration of Gaussian kernels carrying Dirac delta factors.

A kernel is ``pref * prod_j delta(w_j . z + h_j) * exp(z^T Q z + l^T z + c)``
over named real variables ``z``.  Integrating one variable is exact: it is
eliminated through a delta that contains it, Fourier-integrated into a new
delta when it only enters through an imaginary linear phase, or Gaussian
integrated otherwise.  No quadrature is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class NonIntegrable(ArithmeticError):
    """The integrand is not damped along an integration variable."""


def _small(x, scale: float, rtol: float = 1e-11) -> bool:
    return bool(np.all(np.abs(x) <= rtol * max(scale, 1.0)))


@dataclass
class Kernel:
    names: list[str]
    q: np.ndarray
    l: np.ndarray
    c: complex = 0.0
    pref: complex = 1.0
    deltas: list[tuple[np.ndarray, float]] = field(default_factory=list)

    @classmethod
    def empty(cls, names) -> "Kernel":
        n = len(names)
        return cls(list(names), np.zeros((n, n), complex), np.zeros(n, complex))

    def index(self, name: str) -> int:
        return self.names.index(name)

    # -- construction helpers ------------------------------------------------

    def add_quad(self, u: str, v: str, coef: complex) -> None:
        """Add ``coef * u * v`` to the exponent."""
        i, j = self.index(u), self.index(v)
        if i == j:
            self.q[i, i] += coef
        else:
            self.q[i, j] += coef / 2
            self.q[j, i] += coef / 2

    def add_lin(self, u: str, coef: complex) -> None:
        self.l[self.index(u)] += coef

    def add_delta(self, coefs: dict[str, float], offset: float = 0.0) -> None:
        w = np.zeros(len(self.names))
        for k, v in coefs.items():
            w[self.index(k)] += v
        self.deltas.append((w, float(offset)))

    def embed(self, names) -> "Kernel":
        """Same kernel over a superset of variables (new ones enter trivially)."""
        names = list(names)
        idx = [names.index(n) for n in self.names]
        out = Kernel.empty(names)
        out.q[np.ix_(idx, idx)] = self.q
        out.l[idx] = self.l
        out.c, out.pref = self.c, self.pref
        for w, h in self.deltas:
            w2 = np.zeros(len(names))
            w2[idx] = w
            out.deltas.append((w2, h))
        return out

    def __mul__(self, other: "Kernel") -> "Kernel":
        names = self.names + [n for n in other.names if n not in self.names]
        a, b = self.embed(names), other.embed(names)
        return Kernel(names, a.q + b.q, a.l + b.l, a.c + b.c, a.pref * b.pref, a.deltas + b.deltas)

    # -- integration -------------------------------------------------------------

    def _scale(self) -> float:
        return float(max(np.max(np.abs(self.q), initial=0.0), np.max(np.abs(self.l), initial=0.0)))

    def _drop(self, k: int) -> None:
        keep = [i for i in range(len(self.names)) if i != k]
        self.q = self.q[np.ix_(keep, keep)]
        self.l = self.l[keep]
        self.deltas = [(w[keep], h) for w, h in self.deltas]
        del self.names[k]

    def _substitute(self, k: int, coefs: np.ndarray, offset: float) -> None:
        """Replace z_k by ``coefs . z + offset`` (coefs[k] is ignored) and drop it."""
        n = len(self.names)
        p = np.eye(n)
        p[k, :] = coefs
        p[k, k] = 0.0
        s = np.zeros(n)
        s[k] = offset
        q, l = self.q, self.l
        self.c = self.c + s @ q @ s + l @ s
        self.l = p.T @ (2 * q @ s + l)
        self.q = p.T @ q @ p
        self.deltas = [(p.T @ w, h + w @ s) for w, h in self.deltas]
        self._drop(k)

    def integrate(self, name: str) -> None:
        k = self.index(name)
        scale = self._scale()
        for j, (w, h) in enumerate(self.deltas):
            if abs(w[k]) > 1e-12 * max(np.max(np.abs(w)), 1.0):
                del self.deltas[j]
                self.pref /= abs(w[k])
                self._substitute(k, -w / w[k], -h / w[k])
                return
        qkk = self.q[k, k]
        if _small(qkk, scale):
            # only a linear phase remains: a Fourier integral giving a delta
            b = 2 * self.q[k, :].copy()
            b[k] = 0.0
            if not (_small(b.real, scale) and _small(self.l[k].real, scale)):
                raise NonIntegrable(f"{name} enters with a real linear coefficient and no damping")
            w, h = np.delete(b.imag, k), float(self.l[k].imag)
            self.pref *= 2 * math.pi
            self._drop(k)
            if _small(w, scale):
                if abs(h) <= 1e-11 * max(scale, 1.0):
                    raise NonIntegrable(f"integral over {name} diverges")
                self.pref = 0.0
                return
            self.deltas.append((w, h))
            return
        if qkk.real > 1e-11 * max(scale, 1.0):
            raise NonIntegrable(f"{name} is not damped (quadratic coefficient {qkk})")
        qk = self.q[k, :].copy()
        lk = self.l[k]
        self.pref *= np.sqrt(math.pi / (-qkk + 0j))
        self.c = self.c - lk**2 / (4 * qkk)
        self.l = self.l - qk * lk / qkk
        self.q = self.q - np.outer(qk, qk) / qkk
        self._drop(k)

    def integrate_all(self, names) -> "Kernel":
        out = self.copy()
        pending = list(names)
        while pending:
            # delta eliminations first, then Gaussian steps, Fourier last
            def rank(n):
                k = out.index(n)
                if any(abs(w[k]) > 1e-12 * max(np.max(np.abs(w)), 1.0) for w, _ in out.deltas):
                    return 0
                return 2 if _small(out.q[k, k], out._scale()) else 1

            pending.sort(key=rank)
            out.integrate(pending.pop(0))
        return out

    def copy(self) -> "Kernel":
        return Kernel(list(self.names), self.q.copy(), self.l.copy(), self.c, self.pref,
                      [(w.copy(), h) for w, h in self.deltas])

    # -- read-out ------------------------------------------------------------------

    def quad(self, u: str, v: str) -> complex:
        """Coefficient of ``u * v`` in the exponent."""
        i, j = self.index(u), self.index(v)
        return self.q[i, i] if i == j else 2 * self.q[i, j]

    def lin(self, u: str) -> complex:
        return self.l[self.index(u)]
