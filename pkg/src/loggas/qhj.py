"""Quantum Hamilton-Jacobi machinery with hbar = 1 and 2m = 1.

A bound state psi = f(x) exp(-U(x)), with f a polynomial and U' = W, has the
quantum momentum function

    p = -i (log psi)' = -i f'/f + i W = sum_k -i/(x - x_k) + i W(x),

a rational function whose moving poles sit at the zeros x_k of f, each with
residue -i. It satisfies the Riccati equation p^2 - i p' = E - V with
V = W^2 - W' (the upper SUSY partner at zero factorization energy) and E equal
to the eigenvalue lambda of the reduced operator -f'' + 2 W f' = lambda f.
The reduced eigenvalue is the negative of the E_n in -f'' + 2Wf' = -E_n f.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .electrostatics import Superpotential
from .errors import DegenerateError, DomainError, InvalidInputError, UnsupportedFormError
from .numerics import contour_integral, integrate, symtri_eigenvalues
from .orthopoly import PointConfiguration, Polynomial, evaluate, weight

__all__ = [
    "QuantumMomentumFunction",
    "BoundState",
    "qmf_from_state",
    "numeric_residue",
    "riccati_residual",
    "polynomial_spectrum",
    "sturm_liouville_spectrum",
    "contour_quantization",
    "susy_partners",
    "schrodinger_spectrum",
    "build_wavefunction",
    "wavefunction_norm",
]


@dataclass(frozen=True)
class QuantumMomentumFunction:
    """p(z) = sum_k -i/(z - x_k) + i W(z)."""

    moving_poles: PointConfiguration
    fixed_part: Superpotential
    state: Polynomial | None = None

    def _check(self, z):
        x = np.asarray(self.moving_poles)
        if x.size and np.any(np.asarray(z)[..., None] == x):
            raise DomainError("evaluation at a moving pole")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        self._check(z)
        out = 1j * self.fixed_part(z)
        for xk in self.moving_poles:
            out = out - 1j / (z - xk)
        return out

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        self._check(z)
        out = 1j * self.fixed_part.derivative(z)
        for xk in self.moving_poles:
            out = out + 1j / (z - xk) ** 2
        return out

    def from_state(self, z):
        """-i f'/f + i W evaluated through the stored polynomial."""
        if self.state is None:
            raise InvalidInputError("QMF was not built from a polynomial state")
        z = np.asarray(z, dtype=complex)
        return -1j * self.state.deriv()(z) / self.state(z) + 1j * self.fixed_part(z)

    def riccati_lhs(self, z):
        """p^2 - i p' with the double poles cancelled analytically.

        With S = sum_k 1/(z - x_k) one has S^2 + S' = sum_k 2 c_k/(z - x_k),
        c_k = sum_{j != k} 1/(x_k - x_j), so
        p^2 - i p' = 2 sum_k (W(z) - c_k)/(z - x_k) - W^2 + W'.
        """
        z = np.asarray(z, dtype=complex)
        self._check(z)
        x = np.asarray(self.moving_poles)
        w = self.fixed_part(z)
        out = -w * w + self.fixed_part.derivative(z)
        if x.size:
            diff = x[:, None] - x[None, :]
            np.fill_diagonal(diff, np.inf)
            c = np.sum(1.0 / diff, axis=1)
            for xk, ck in zip(x, c):
                out = out + 2.0 * (w - ck) / (z - xk)
        return out

    def residue(self, x0, radius=None):
        return numeric_residue(self, x0, radius)


@dataclass(frozen=True)
class BoundState:
    n: int
    lambda_: float
    f: Polynomial


def _real_simple_roots(f):
    r = f.roots()
    if r.size == 0:
        return r.real
    scale = max(1.0, float(np.max(np.abs(r))))
    if np.max(np.abs(r.imag)) > 1e-8 * scale:
        raise DomainError("state polynomial has non-real zeros")
    x = np.sort(r.real)
    if x.size > 1 and np.min(np.diff(x)) <= 1e-7 * scale:
        raise DegenerateError("state polynomial has a repeated zero")
    d1 = f.deriv()
    for k in range(x.size):
        for _ in range(6):
            step = f(x[k]) / d1(x[k])
            x[k] -= step
            if abs(step) <= 2 * np.finfo(float).eps * max(1.0, abs(x[k])):
                break
    return x


def qmf_from_state(f, W, roots=None):
    """QMF with moving poles at the zeros of ``f`` and fixed part i W."""
    if f.degree < 0:
        raise DegenerateError("zero polynomial is not a state")
    x = _real_simple_roots(f) if roots is None else np.asarray(roots, dtype=float)
    return QuantumMomentumFunction(PointConfiguration(x), W, f)


def numeric_residue(func, x0, radius=None, m=256):
    """Residue of ``func`` at ``x0`` by a small-circle contour integral."""
    if radius is None:
        radius = 1e-3 * max(1.0, abs(x0))
    return contour_integral(func, x0, (radius, radius), m) / (2j * np.pi)


def riccati_residual(p, E, V, grid):
    """max over ``grid`` of |p^2 - i p' - (E - V)|."""
    grid = np.asarray(grid, dtype=float)
    if isinstance(p, QuantumMomentumFunction):
        lhs = p.riccati_lhs(grid)
    else:
        pv = p(grid)
        lhs = pv * pv - 1j * p.derivative(grid)
    out = np.abs(lhs - (E - np.asarray(V(grid))))
    if not np.all(np.isfinite(out)):
        raise DomainError("grid hits a pole of p")
    return float(np.max(out))


def _triangular_spectrum(sigma, tau, N):
    # sigma y'' + tau y' maps degree <= N polynomials into themselves with an
    # upper-triangular matrix in the monomial basis.
    sigma = sigma.coeffs + (0.0,) * 3
    tau = tau.coeffs + (0.0,) * 2
    M = np.zeros((N + 1, N + 1))
    for k in range(N + 1):
        for i, s in enumerate(sigma[:3]):
            if k >= 2 and s:
                M[k - 2 + i, k] += s * k * (k - 1)
        for i, t in enumerate(tau[:2]):
            if k >= 1 and t:
                M[k - 1 + i, k] += t * k
    mu = np.diag(M).copy()
    states = []
    for n in range(N + 1):
        v = np.zeros(n + 1)
        v[n] = 1.0
        for j in range(n - 1, -1, -1):
            den = mu[j] - mu[n]
            if den == 0.0:
                raise UnsupportedFormError(
                    f"degenerate spectrum: degrees {j} and {n} share an eigenvalue")
            v[j] = -np.dot(M[j, j + 1:n + 1], v[j + 1:n + 1]) / den
        states.append((float(-mu[n]) + 0.0, Polynomial(v)))
    return states


def sturm_liouville_spectrum(sigma, tau, N):
    """Polynomial eigenpairs of sigma y'' + tau y' + lambda y = 0 up to degree N.

    lambda_n = -n tau' - n(n - 1) sigma''/2; eigenpolynomials are monic.
    """
    if sigma.degree > 2 or tau.degree > 1:
        raise UnsupportedFormError("need deg sigma <= 2 and deg tau <= 1")
    if sigma.degree < 0:
        raise UnsupportedFormError("sigma must be nonzero")
    if N < 1:
        raise InvalidInputError("N must be >= 1")
    return _triangular_spectrum(sigma, tau, N)


def polynomial_spectrum(W, N):
    """Bound states f_0..f_N of -f'' + 2 W f' = lambda f for linear W = c x + d.

    lambda_n = 2 c n. For W = x the f_n are the Hermite polynomials (monic here).
    Rational W belongs to ``sturm_liouville_spectrum``.
    """
    if not W.is_polynomial:
        raise UnsupportedFormError(
            "polynomial_spectrum needs W = c x + d; use sturm_liouville_spectrum")
    if not W.linear > 0:
        raise UnsupportedFormError("linear coefficient of W must be positive")
    if N < 1:
        raise InvalidInputError("N must be >= 1")
    tau = Polynomial([-2.0 * W.constant, -2.0 * W.linear])
    pairs = _triangular_spectrum(Polynomial([1.0]), tau, N)
    return [BoundState(n, lam, f) for n, (lam, f) in enumerate(pairs)]


def _auto_contour(roots, W):
    poles = np.array([a for a, _ in W.poles])
    if roots.size == 0:
        center = 0.0
        if poles.size:
            center = float(np.min(poles)) - 1.0
        return center, (0.5, 0.5)
    lo, hi = float(roots[0]), float(roots[-1])
    center = 0.5 * (lo + hi)
    margin = 1.0
    if poles.size:
        dist = np.min(np.maximum(lo - poles, poles - hi))
        if dist <= 0:
            raise DomainError("a fixed pole lies inside the hull of the moving poles")
        margin = min(margin, 0.5 * float(dist))
    a = 0.5 * (hi - lo) + margin
    return center, (a, a)


def contour_quantization(f, W, contour=None, m=None):
    """Action integral J = (1/2 pi) Re of the closed integral of p dx.

    ``contour`` is ``(center, (a, b))``; by default an ellipse enclosing all
    zeros of ``f`` and none of W's poles. p is evaluated as -i f'/f + i W from
    the polynomial itself. With ``m=None`` the node count is doubled until the
    value settles. Returns deg f for a valid contour.
    """
    if contour is None:
        roots = _real_simple_roots(f) if f.degree > 0 else np.empty(0)
        contour = _auto_contour(roots, W)
    center, axes = contour
    for a, _ in W.poles:
        u = (a - center.real if isinstance(center, complex) else a - center) / axes[0]
        if abs(abs(u) - 1.0) < 1e-12:
            raise DomainError(f"contour passes through the fixed pole at {a}")
    df = f.deriv()

    def p(z):
        return -1j * df(z) / f(z) + 1j * W(z)

    if m is not None:
        return contour_integral(p, center, axes, m).real / (2 * np.pi)
    m = 128
    prev = contour_integral(p, center, axes, m).real / (2 * np.pi)
    while m < 1 << 20:
        m *= 2
        cur = contour_integral(p, center, axes, m).real / (2 * np.pi)
        if abs(cur - prev) < 1e-12:
            return cur
        prev = cur
    return prev


def susy_partners(W, E=0.0):
    """Partner potentials V+ = W^2 - W' + E and V- = W^2 + W' + E."""
    def v_plus(x):
        w = W(x)
        return w * w - W.derivative(x) + E

    def v_minus(x):
        w = W(x)
        return w * w + W.derivative(x) + E

    return v_plus, v_minus


def schrodinger_spectrum(V, interval, grid_points, count):
    """Lowest ``count`` Dirichlet eigenvalues of -d^2/dx^2 + V on ``interval``.

    Second-order central differences on ``grid_points`` interior nodes.
    """
    if count > grid_points or count < 1:
        raise InvalidInputError("need 1 <= count <= grid_points")
    lo, hi = interval
    h = (hi - lo) / (grid_points + 1)
    x = lo + h * np.arange(1, grid_points + 1)
    v = np.asarray(V(x), dtype=float)
    if not np.all(np.isfinite(v)):
        raise DomainError("potential is not finite on the grid")
    diag = 2.0 / h ** 2 + v
    off = np.full(grid_points - 1, -1.0 / h ** 2)
    return symtri_eigenvalues(diag, off)[:count]


def build_wavefunction(family, n):
    """psi(x) = w(x)^(1/2) P_n(x) for the classical ``family``."""
    def psi(x):
        return np.sqrt(weight(family, x)) * evaluate(family, n, x)[0]
    psi.family, psi.n = family, n
    return psi


def wavefunction_norm(family, n, quad_n=64):
    """Squared norm of ``build_wavefunction(family, n)`` by quadrature.

    The map length on infinite ranges follows the extent of psi_n, which
    grows like n for Laguerre and sqrt(n) for Hermite.
    """
    psi = build_wavefunction(family, n)
    lo, hi = family.support
    scale = {"laguerre": max(2.0, n + family.alpha + 1.0),
             "hermite": max(1.0, math.sqrt(2.0 * n + 1.0))}.get(family.kind, 1.0)
    return float(integrate(lambda x: psi(x) ** 2, lo, hi, n=quad_n, scale=scale))
