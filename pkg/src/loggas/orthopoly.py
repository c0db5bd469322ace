"""Classical orthogonal polynomials (Hermite, Laguerre, Jacobi).

Normalizations are the conventional ones: physicists' Hermite ``H_n``,
generalized Laguerre ``L_n^(alpha)`` with ``L_n(0) = binom(n + alpha, n)``,
and Jacobi ``P_n^(a,b)`` with ``P_n(1) = binom(n + a, n)``. The Jacobi weight
is ``(1 - x)**a * (1 + x)**b``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DomainError, InvalidInputError
from .numerics import symtri_eigenvalues

__all__ = [
    "Polynomial",
    "PointConfiguration",
    "OrthogonalFamily",
    "recurrence_coefficients",
    "evaluate",
    "evaluate_derivatives",
    "family_polynomial",
    "jacobi_matrix",
    "zeros",
    "weight",
    "vandermonde_abs",
    "log_vandermonde_abs",
]


@dataclass(frozen=True, eq=False)
class Polynomial:
    """Dense real polynomial, coefficients in ascending degree."""

    coeffs: tuple

    def __init__(self, coeffs):
        c = [float(v) for v in np.atleast_1d(coeffs)]
        while len(c) > 1 and c[-1] == 0.0:
            c.pop()
        if not c:
            c = [0.0]
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def from_roots(cls, roots, leading=1.0):
        return cls(leading * npoly.polyfromroots(roots).real)

    @property
    def degree(self):
        if len(self.coeffs) == 1 and self.coeffs[0] == 0.0:
            return -1
        return len(self.coeffs) - 1

    @property
    def leading(self):
        return self.coeffs[-1]

    def __call__(self, x):
        # Horner; works for scalars, complex values and arrays.
        result = self.coeffs[-1] * np.ones_like(x) if np.ndim(x) else self.coeffs[-1]
        for c in reversed(self.coeffs[:-1]):
            result = result * x + c
        return result

    def term_sum(self, x):
        x = np.asarray(x)
        return sum(c * x ** k for k, c in enumerate(self.coeffs))

    def deriv(self, m=1):
        return Polynomial(npoly.polyder(self.coeffs, m)) if self.degree >= m else Polynomial([0.0])

    def roots(self):
        return np.sort(npoly.polyroots(self.coeffs))

    def _coerce(self, other):
        return other.coeffs if isinstance(other, Polynomial) else (float(other),)

    def __add__(self, other):
        return Polynomial(npoly.polyadd(self.coeffs, self._coerce(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return Polynomial(npoly.polysub(self.coeffs, self._coerce(other)))

    def __rsub__(self, other):
        return Polynomial(npoly.polysub(self._coerce(other), self.coeffs))

    def __mul__(self, other):
        return Polynomial(npoly.polymul(self.coeffs, self._coerce(other)))

    __rmul__ = __mul__

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs])

    def __eq__(self, other):
        return isinstance(other, Polynomial) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)})"


@dataclass(frozen=True, eq=False)
class PointConfiguration:
    """Strictly increasing, multiplicity-free set of real points."""

    points: np.ndarray

    def __init__(self, points):
        p = np.array(points, dtype=float).ravel()
        if not np.all(np.isfinite(p)):
            raise DomainError("non-finite point")
        if p.size > 1 and not np.all(np.diff(p) > 0):
            raise DomainError("points must be strictly increasing")
        p.setflags(write=False)
        object.__setattr__(self, "points", p)

    @classmethod
    def from_unsorted(cls, points):
        return cls(np.sort(np.asarray(points, dtype=float)))

    def __len__(self):
        return self.points.size

    def __iter__(self):
        return iter(self.points)

    def __getitem__(self, k):
        return self.points[k]

    def __array__(self, dtype=None, copy=None):
        return self.points if dtype is None else self.points.astype(dtype)

    @property
    def min_gap(self):
        return float(np.min(np.diff(self.points))) if self.points.size > 1 else math.inf

    def __repr__(self):
        return f"PointConfiguration({self.points.tolist()})"


@dataclass(frozen=True)
class OrthogonalFamily:
    kind: str
    alpha: float = 0.0
    a: float = 0.0
    b: float = 0.0

    def __post_init__(self):
        if self.kind not in ("hermite", "laguerre", "jacobi"):
            raise InvalidInputError(f"unknown family {self.kind!r}")
        if self.kind == "laguerre" and not self.alpha > -1:
            raise InvalidInputError("Laguerre needs alpha > -1")
        if self.kind == "jacobi" and not (self.a > -1 and self.b > -1):
            raise InvalidInputError("Jacobi needs a > -1 and b > -1")

    @classmethod
    def hermite(cls):
        return cls("hermite")

    @classmethod
    def laguerre(cls, alpha=0.0):
        return cls("laguerre", alpha=float(alpha))

    @classmethod
    def jacobi(cls, a=0.0, b=0.0):
        return cls("jacobi", a=float(a), b=float(b))

    @property
    def support(self):
        return {"hermite": (-np.inf, np.inf),
                "laguerre": (0.0, np.inf),
                "jacobi": (-1.0, 1.0)}[self.kind]

    def __str__(self):
        if self.kind == "laguerre":
            return f"laguerre(alpha={self.alpha:g})"
        if self.kind == "jacobi":
            return f"jacobi(a={self.a:g}, b={self.b:g})"
        return "hermite"


def recurrence_coefficients(family, k):
    """(A_k, B_k, C_k) with P_{k+1} = (A_k x + B_k) P_k - C_k P_{k-1}."""
    if k < 0:
        raise InvalidInputError("k must be nonnegative")
    if family.kind == "hermite":
        return 2.0, 0.0, 2.0 * k
    if family.kind == "laguerre":
        al = family.alpha
        return -1.0 / (k + 1), (2 * k + 1 + al) / (k + 1), (k + al) / (k + 1)
    a, b = family.a, family.b
    if k == 0:
        return 0.5 * (a + b + 2), 0.5 * (a - b), 0.0
    s = 2 * k + a + b
    den = 2.0 * (k + 1) * (k + a + b + 1) * s
    A = (s + 1) * (s + 2) * s / den
    B = (s + 1) * (a * a - b * b) / den
    C = 2.0 * (k + a) * (k + b) * (s + 2) / den
    return A, B, C


def evaluate_derivatives(family, n, x):
    """P_n, P_n' and P_n'' at ``x`` by the (differentiated) three-term recurrence."""
    x = np.asarray(x, dtype=np.result_type(x, float))
    p_prev, p = np.zeros_like(x), np.ones_like(x)
    d_prev, d = np.zeros_like(x), np.zeros_like(x)
    s_prev, s = np.zeros_like(x), np.zeros_like(x)
    for k in range(n):
        A, B, C = recurrence_coefficients(family, k)
        lin = A * x + B
        p_next = lin * p - C * p_prev
        d_next = A * p + lin * d - C * d_prev
        s_next = 2 * A * d + lin * s - C * s_prev
        p_prev, p = p, p_next
        d_prev, d = d, d_next
        s_prev, s = s, s_next
    if p.ndim == 0:
        return p[()], d[()], s[()]
    return p, d, s


def evaluate(family, n, x):
    """(P_n(x), P_n'(x)) by forward recurrence."""
    p, d, _ = evaluate_derivatives(family, n, x)
    return p, d


def family_polynomial(family, n):
    """Monomial coefficients of P_n, built from the recurrence."""
    prev, cur = np.zeros(1), np.ones(1)
    for k in range(n):
        A, B, C = recurrence_coefficients(family, k)
        nxt = npoly.polyadd(npoly.polymulx(cur) * A + np.append(cur * B, 0.0), -C * prev)
        prev, cur = cur, nxt
    return Polynomial(cur)


def jacobi_matrix(family, n):
    """Diagonal and off-diagonal of the n x n symmetric Jacobi matrix.

    Built from the monic recurrence p_{k+1} = (x - alpha_k) p_k - beta_k p_{k-1}
    with alpha_k = -B_k / A_k and beta_k = C_k / (A_k A_{k-1}).
    """
    coeffs = [recurrence_coefficients(family, k) for k in range(n)]
    diag = np.array([-B / A for A, B, _ in coeffs])
    off = np.array([math.sqrt(coeffs[k][2] / (coeffs[k][0] * coeffs[k - 1][0]))
                    for k in range(1, n)])
    return diag, off


def _polish(family, n, x, max_iter=10):
    lo, hi = family.support
    out = x.copy()
    for i, x0 in enumerate(x):
        xi = x0
        v, d = evaluate(family, n, xi)
        for _ in range(max_iter):
            if d == 0.0 or v == 0.0:
                break
            step = v / d
            for _ in range(4):
                trial = xi - step
                tv, td = evaluate(family, n, trial)
                if abs(tv) <= abs(v) and lo < trial < hi:
                    break
                step *= 0.5
            else:
                break
            done = abs(step) <= 4 * np.finfo(float).eps * max(1.0, abs(xi))
            xi, v, d = trial, tv, td
            if done:
                break
        out[i] = xi
    if out.size > 1 and not np.all(np.diff(out) > 0):
        return x
    return out


def zeros(family, n, polish=True):
    """The n simple real zeros of P_n.

    Eigenvalues of the Jacobi matrix (Golub-Welsch), then a short damped
    Newton polish on the recurrence.
    """
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    diag, off = jacobi_matrix(family, n)
    x = symtri_eigenvalues(diag, off)
    if polish:
        x = _polish(family, n, x)
    return PointConfiguration(x)


def weight(family, x):
    """Orthogonality weight of ``family`` at ``x``."""
    x = np.asarray(x, dtype=float)
    lo, hi = family.support
    if np.any((x < lo) | (x > hi)):
        raise DomainError(f"x outside support [{lo}, {hi}] of {family}")
    if family.kind == "hermite":
        out = np.exp(-x * x)
    elif family.kind == "laguerre":
        out = x ** family.alpha * np.exp(-x)
    else:
        out = (1.0 - x) ** family.a * (1.0 + x) ** family.b
    return out[()] if out.ndim == 0 else out


def _pair_gaps(points):
    # sorted first so that symmetric sums are bitwise permutation invariant
    p = np.sort(np.asarray(points, dtype=float).ravel())
    i, j = np.triu_indices(p.size, k=1)
    return np.abs(p[j] - p[i])


def log_vandermonde_abs(points):
    """sum_{i<j} log|x_j - x_i|."""
    gaps = _pair_gaps(points)
    if np.any(gaps == 0):
        raise DomainError("coincident points: log|Vandermonde| diverges")
    return float(np.sum(np.log(gaps)))


def vandermonde_abs(points):
    """prod_{i<j} |x_j - x_i| (use the log variant beyond ~30 points)."""
    gaps = _pair_gaps(points)
    if np.any(gaps == 0):
        raise DomainError("coincident points: Vandermonde vanishes")
    if gaps.size > 435:
        return math.exp(log_vandermonde_abs(points))
    return float(np.prod(gaps))
