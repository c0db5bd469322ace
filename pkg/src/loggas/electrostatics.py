"""Stieltjes log-gas: n unit charges with pairwise logarithmic repulsion in
an external field.

The field is described by a rational superpotential W(x); its antiderivative
U(x) is the one-body potential, so the energy is

    E(x) = sum_k U(x_k) - sum_{i<j} log|x_i - x_j|

and a stationary point satisfies sum_{j != k} 1/(x_k - x_j) = W(x_k). For
``equilibrium_superpotential(family)`` the unique minimizer is the zero set of
the family's degree-n polynomial.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateError, DomainError, InvalidInputError
from .orthopoly import PointConfiguration, evaluate_derivatives, zeros

__all__ = [
    "Superpotential",
    "EquilibriumResult",
    "equilibrium_superpotential",
    "interaction_sums",
    "residual",
    "lhopital_identity_check",
    "lhopital_family_check",
    "energy",
    "hessian",
    "solve_equilibrium",
]


@dataclass(frozen=True)
class Superpotential:
    """W(x) = linear * x + constant + sum_j strength_j / (x - location_j)."""

    linear: float = 0.0
    constant: float = 0.0
    poles: tuple = ()

    def __post_init__(self):
        poles = tuple((float(a), float(s)) for a, s in self.poles)
        locs = [a for a, _ in poles]
        if len(set(locs)) != len(locs):
            raise InvalidInputError("pole locations must be distinct")
        object.__setattr__(self, "poles", poles)
        object.__setattr__(self, "linear", float(self.linear))
        object.__setattr__(self, "constant", float(self.constant))

    @property
    def is_polynomial(self):
        return not self.poles

    def _check(self, x):
        for j, (a, _) in enumerate(self.poles):
            if np.any(x == a):
                raise DomainError(f"evaluation at pole x={a} of W", index=j)

    def __call__(self, x):
        x = np.asarray(x)
        self._check(x)
        out = self.linear * x + self.constant
        for a, s in self.poles:
            out = out + s / (x - a)
        return out[()] if np.ndim(out) == 0 else out

    def derivative(self, x):
        x = np.asarray(x)
        self._check(x)
        out = self.linear + 0.0 * x
        for a, s in self.poles:
            out = out - s / (x - a) ** 2
        return out[()] if np.ndim(out) == 0 else out

    def antiderivative(self, x):
        """U(x) = linear x^2/2 + constant x + sum strength log|x - location|."""
        x = np.asarray(x, dtype=float)
        self._check(x)
        out = 0.5 * self.linear * x * x + self.constant * x
        for a, s in self.poles:
            out = out + s * np.log(np.abs(x - a))
        return out[()] if np.ndim(out) == 0 else out

    def support(self):
        """The interval on which a gas in this field is confined.

        Finite ends must be repelling poles (negative strength, so U -> +inf);
        infinite ends need U -> +inf as well. The first such interval, left to
        right, is returned.
        """
        locs = sorted(a for a, _ in self.poles)
        strength = dict(self.poles)
        ends = [-math.inf] + locs + [math.inf]
        c, d = self.linear, self.constant
        for lo, hi in zip(ends[:-1], ends[1:]):
            ok_lo = (strength[lo] < 0) if math.isfinite(lo) else (c > 0 or (c == 0 and d < 0))
            ok_hi = (strength[hi] < 0) if math.isfinite(hi) else (c > 0 or (c == 0 and d > 0))
            if ok_lo and ok_hi:
                return lo, hi
        raise DomainError("superpotential does not confine a gas on any interval")


@dataclass
class EquilibriumResult:
    points: PointConfiguration
    residual_norm: float
    iterations: int
    converged: bool
    energies: list = field(default_factory=list, repr=False)
    steps: list = field(default_factory=list, repr=False)


def equilibrium_superpotential(family):
    """Field whose log-gas equilibrium is the zero set of the family's P_n.

    Hermite: W = x. Laguerre(alpha): W = 1/2 - (alpha + 1)/(2x).
    Jacobi(a, b): W = -(a + 1)/(2(x - 1)) - (b + 1)/(2(x + 1)).
    """
    if family.kind == "hermite":
        return Superpotential(linear=1.0)
    if family.kind == "laguerre":
        return Superpotential(constant=0.5, poles=((0.0, -0.5 * (family.alpha + 1)),))
    return Superpotential(poles=((1.0, -0.5 * (family.a + 1)), (-1.0, -0.5 * (family.b + 1))))


def interaction_sums(points):
    """sum_{j != k} 1 / (x_k - x_j) for every k."""
    x = np.asarray(points, dtype=float)
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, np.inf)
    if np.any(diff == 0):
        raise DomainError("coincident points")
    return np.sum(1.0 / diff, axis=1)


def residual(points, W):
    """R_k = sum_{j != k} 1/(x_k - x_j) - W(x_k); zero exactly at equilibrium."""
    x = np.asarray(points, dtype=float)
    for k, xk in enumerate(x):
        for a, _ in W.poles:
            if xk == a:
                raise DomainError(f"point {k} sits on a pole of W at {a}", index=k)
    return interaction_sums(x) - W(x)


def _newton_root(f, df, x, iterations=8):
    for _ in range(iterations):
        d = df(x)
        if d == 0:
            break
        step = f(x) / d
        x = x - step
        if abs(step) <= 2 * np.finfo(float).eps * max(1.0, abs(x)):
            break
    return x


def lhopital_identity_check(f, j, roots=None):
    """Both sides of sum_{k != j} 1/(x_j - x_k) = f''(x_j) / (2 f'(x_j)).

    ``roots`` may supply accurate zeros of ``f``; otherwise they come from the
    companion matrix, Newton-polished on ``f``. ``j`` indexes the sorted zeros.
    """
    if roots is None:
        r = f.roots()
        if np.max(np.abs(np.imag(r)), initial=0.0) > 1e-8 * max(1.0, np.max(np.abs(r))):
            raise DomainError("polynomial has non-real zeros")
        d1 = f.deriv()
        roots = np.sort([_newton_root(f, d1, float(np.real(v))) for v in r])
    roots = np.asarray(roots, dtype=float)
    xj = roots[j]
    slope = f.deriv()(xj)
    if slope == 0:
        raise DegenerateError(f"f'(x_j) = 0 at x_j={xj}", index=j)
    lhs = float(np.sum(1.0 / (xj - np.delete(roots, j))))
    rhs = float(f.deriv(2)(xj) / (2.0 * slope))
    return lhs, rhs


def lhopital_family_check(family, n):
    """Arrays (sums, f''/(2f')) over every zero of P_n, derivatives by recurrence.

    Also returns the per-zero cancellation scale sum_{k != j} 1/|x_j - x_k|,
    which is the natural denominator for a relative comparison.
    """
    x = np.asarray(zeros(family, n))
    _, d1, d2 = evaluate_derivatives(family, n, x)
    if np.any(d1 == 0):
        raise DegenerateError("vanishing derivative at a zero")
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, np.inf)
    sums = np.sum(1.0 / diff, axis=1)
    scale = np.sum(1.0 / np.abs(diff), axis=1)
    return sums, d2 / (2.0 * d1), scale


def energy(points, W):
    """E = sum_k U(x_k) - sum_{i<j} log|x_i - x_j|."""
    x = np.asarray(points, dtype=float)
    i, j = np.triu_indices(x.size, k=1)
    gaps = np.abs(x[j] - x[i])
    if np.any(gaps == 0):
        raise DomainError("coincident points")
    return float(np.sum(W.antiderivative(x)) - np.sum(np.log(gaps)))


def hessian(points, W):
    """Hessian of the energy; positive definite at a minimizing equilibrium."""
    x = np.asarray(points, dtype=float)
    residual(x, W)  # domain checks
    diff = x[:, None] - x[None, :]
    np.fill_diagonal(diff, np.inf)
    inv2 = 1.0 / diff ** 2
    h = -inv2
    np.fill_diagonal(h, W.derivative(x) + np.sum(inv2, axis=1))
    return h


def _auto_init(n, W, lo, hi):
    cheb = np.cos(np.pi * (2 * np.arange(n, 0, -1) - 1) / (2 * n))  # ascending in (-1, 1)
    shrink = 0.9
    if math.isfinite(lo) and math.isfinite(hi):
        return 0.5 * (lo + hi) + 0.5 * (hi - lo) * shrink * cheb
    c, d = W.linear, W.constant
    if not math.isfinite(lo) and not math.isfinite(hi):
        center = -d / c if c > 0 else 0.0
        return center + math.sqrt(2.0 * n / c) * cheb
    growth = c * math.sqrt(n) if c > 0 else abs(d)
    length = 2.0 * n / growth
    u = 0.5 * (1.0 + shrink * cheb)
    if math.isfinite(lo):
        return lo + length * u ** 2
    return (hi - length * u ** 2)[::-1]


def _feasible(x, lo, hi):
    if not np.all(np.isfinite(x)):
        return False
    if x.size > 1 and not np.all(np.diff(x) > 0):
        return False
    margin = 1e-12
    if math.isfinite(lo) and x[0] <= lo + margin * max(1.0, abs(lo)):
        return False
    if math.isfinite(hi) and x[-1] >= hi - margin * max(1.0, abs(hi)):
        return False
    return True


def solve_equilibrium(n, W, init=None, tol=1e-11, max_iter=200, support=None, newton=True):
    """Damped Newton solve of R(x) = 0 for n charges in the field W.

    A Newton step (analytic Hessian) is halved, at most 30 times, until it
    keeps the points ordered and inside the support and lowers either the
    energy or the residual. When no such step exists, or the Hessian is not
    positive definite, an explicit gradient-flow step along the force R is
    taken instead, again halved until the energy drops (or, once the energy
    is flat to round-off, until the residual drops). ``newton=False``
    forces pure gradient flow. Once the tolerance is met a single extra
    Newton step is tried and kept only if it lowers the residual further.

    Never raises on non-convergence: the result carries ``converged=False``.
    """
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    lo, hi = support if support is not None else W.support()
    x = _auto_init(n, W, lo, hi) if init is None else np.array(init, dtype=float)
    if x.size != n:
        raise InvalidInputError(f"init has {x.size} points, expected {n}")
    if not _feasible(x, lo, hi):
        raise DomainError("initial configuration is not ordered inside the support")

    e = energy(x, W)
    r = residual(x, W)
    rn = float(np.max(np.abs(r)))
    energies, kinds = [e], []
    it = 0
    while rn > tol and it < max_iter:
        it += 1
        accepted = False
        if newton:
            h = hessian(x, W)
            try:
                np.linalg.cholesky(h)
                step = np.linalg.solve(h, r)
            except np.linalg.LinAlgError:
                step = None
            if step is not None:
                t = 1.0
                for _ in range(31):
                    xn = x + t * step
                    if _feasible(xn, lo, hi):
                        en = energy(xn, W)
                        rnn = residual(xn, W)
                        if en < e or np.max(np.abs(rnn)) < rn:
                            accepted = True
                            kinds.append("newton")
                            break
                    t *= 0.5
        if not accepted:
            diag = np.abs(np.diag(hessian(x, W)))
            step = r / max(1.0, float(np.max(diag)))
            t = 1.0
            for _ in range(60):
                xn = x + t * step
                if _feasible(xn, lo, hi):
                    en = energy(xn, W)
                    rnn = residual(xn, W)
                    # near the minimum energy changes drop below round-off;
                    # then a residual decrease decides
                    flat = en <= e + 8 * np.finfo(float).eps * max(1.0, abs(e))
                    if en < e or (flat and np.max(np.abs(rnn)) < rn):
                        accepted = True
                        kinds.append("gradient")
                        break
                t *= 0.5
        if not accepted:
            break
        x, e, r = xn, en, rnn
        rn = float(np.max(np.abs(r)))
        energies.append(e)
    if rn <= tol and newton and n > 1:
        try:
            xn = x + np.linalg.solve(hessian(x, W), r)
        except np.linalg.LinAlgError:
            xn = x
        if _feasible(xn, lo, hi):
            rnn = float(np.max(np.abs(residual(xn, W))))
            if rnn < rn:
                x, rn = xn, rnn
    return EquilibriumResult(PointConfiguration(x), rn, it, rn <= tol, energies, kinds)
