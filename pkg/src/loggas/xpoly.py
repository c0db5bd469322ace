"""Exceptional X1 Laguerre sector of the deformed radial oscillator.

Conventions (t = x^2, s = g + l, delta = g + l - 3/2):

    eta(t)    = L_l^(delta)(-t)                      denominator, no zeros on t >= 0
    psi_n(x)  = x^s exp(-x^2/2) Lhat_n(x^2) / eta(x^2)
    w_hat(x)  = x^(2s) exp(-x^2) / eta(x^2)^2        deformed weight, psi_n^2 = w_hat Lhat_n^2
    t-weight  = t^(delta+1) exp(-t) / eta(t)^2       image of w_hat under t = x^2

Construction. The seed phi(x) = x^(s-1) exp(+x^2/2) eta(x^2) is a nodeless,
non-normalizable solution of the radial oscillator with angular term
(s-2)(s-1)/x^2. The first-order intertwiner A = d/dx - (log phi)' maps the
classical state x^(s-1) exp(-x^2/2) P(x^2), P = L_{n-l}^(delta), onto

    2 x^s exp(-x^2/2) [eta P' - eta' P - eta P] / eta,

so Lhat_n = eta P' - eta' P - eta P, of degree n. The partner potential is

    V_hat(x) = x^2 + s(s-1)/x^2 - 2 - 2 (log eta(x^2))''

with the same levels E_n = 4(n - l) + 2g + 1. For l = 1 the lowest member
is n = 1; it has n - 1 nodes on (0, inf) and one zero on the negative t axis.
``l = 0`` is a pass-through (eta = 1) that returns -L_n^(g - 1/2), the
undeformed classical family.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .electrostatics import Superpotential
from .errors import DomainError, InvalidInputError, UnsupportedFormError
from .numerics import contour_integral, quadrature_rule
from .orthopoly import OrthogonalFamily, Polynomial, family_polynomial, log_vandermonde_abs
from .qhj import numeric_residue

__all__ = [
    "ExceptionalLaguerreFamily",
    "denominator_poly",
    "exceptional_laguerre",
    "deformed_weight",
    "log_deformed_weight",
    "scalar_log_weight",
    "t_weight",
    "undeformed_superpotential",
    "effective_potential",
    "level",
    "exceptional_wavefunction",
    "ode_residual",
    "gram_matrix",
    "node_count",
    "PoleTerm",
    "ExceptionalQMF",
    "exceptional_qmf",
    "check_residues",
    "enclosed_action",
    "isospectral_check",
    "exceptional_log_jpdf",
]


def denominator_poly(g, l):
    """Coefficients in t of eta(t) = L_l^(delta)(-t), delta = g + l - 3/2."""
    delta = g + l - 1.5
    if not delta > -1:
        raise InvalidInputError(f"need g + l - 3/2 > -1, got {delta}")
    if l < 0 or int(l) != l:
        raise InvalidInputError("l must be a nonnegative integer")
    c = np.array(family_polynomial(OrthogonalFamily.laguerre(delta), int(l)).coeffs)
    c[1::2] *= -1.0
    return Polynomial(c)


@dataclass(frozen=True)
class ExceptionalLaguerreFamily:
    g: float
    l: int = 1

    def __post_init__(self):
        if not self.g > 0:
            raise InvalidInputError("g must be positive")
        if self.l < 0 or int(self.l) != self.l:
            raise InvalidInputError("l must be a nonnegative integer")
        if not self.delta > -1:
            raise InvalidInputError("g + l - 3/2 must exceed -1")

    @property
    def delta(self):
        return self.g + self.l - 1.5

    @property
    def s(self):
        return self.g + self.l

    @cached_property
    def eta(self):
        return denominator_poly(self.g, self.l)

    @property
    def first(self):
        """Lowest member index (the degree gap)."""
        return self.l


def _check_family(n, fam):
    if fam.l not in (0, 1):
        raise UnsupportedFormError(f"only l = 1 (and the l = 0 pass-through) are built, got l={fam.l}")
    if n < fam.first:
        raise InvalidInputError(f"the X{fam.l} family has no member of degree {n} (gap)")


def exceptional_laguerre(n, fam):
    """Lhat_n(t), degree n, through the Darboux intertwiner."""
    _check_family(n, fam)
    p = family_polynomial(OrthogonalFamily.laguerre(fam.delta), n - fam.l)
    eta = fam.eta
    return eta * p.deriv() - eta.deriv() * p - eta * p


def t_weight(t, fam):
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore"):
        out = np.exp((fam.delta + 1) * np.log(t) - t) / fam.eta(t) ** 2
    return out


def log_deformed_weight(x, fam):
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("deformed weight lives on x >= 0")
    t = x * x
    with np.errstate(divide="ignore"):
        return 2.0 * fam.s * np.log(x) - t - 2.0 * np.log(fam.eta(t))


def scalar_log_weight(fam):
    """Fast float -> float version of ``log_deformed_weight`` for x > 0 (sampler inner loops)."""
    two_s = 2.0 * fam.s
    coeffs = fam.eta.coeffs[::-1]
    log = math.log

    def lw(x):
        t = x * x
        e = 0.0
        for c in coeffs:
            e = e * t + c
        return two_s * log(x) - t - 2.0 * log(e)
    return lw


def deformed_weight(x, fam):
    """x^(2(g+l)) exp(-x^2) / eta(x^2)^2."""
    return np.exp(log_deformed_weight(x, fam))


def undeformed_superpotential(fam):
    """W = x - s/x, for which exp(-2U) = x^(2s) exp(-x^2) (eta removed)."""
    return Superpotential(linear=1.0, poles=((0.0, -fam.s),))


def _log_eta_second(x, fam):
    # d^2/dx^2 log eta(x^2)
    t = x * x
    eta = fam.eta
    e0, e1, e2 = eta(t), eta.deriv()(t), eta.deriv(2)(t)
    return 2.0 * e1 / e0 + 4.0 * t * (e2 / e0 - (e1 / e0) ** 2)


def effective_potential(fam):
    """V_hat(x) for the deformed oscillator (the undeformed one when l = 0)."""
    s = fam.s
    shift = 2.0 if fam.l else 0.0

    def V(x):
        x = np.asarray(x, dtype=float)
        return x * x + s * (s - 1) / (x * x) - shift - 2.0 * _log_eta_second(x, fam)
    return V


def level(n, fam):
    """E_n = 4(n - l) + 2g + 1."""
    _check_family(n, fam)
    return 4.0 * (n - fam.l) + 2.0 * fam.g + 1.0


def exceptional_wavefunction(n, fam):
    """psi_n(x) = x^s exp(-x^2/2) Lhat_n(x^2) / eta(x^2) on x >= 0."""
    y = exceptional_laguerre(n, fam)
    eta = fam.eta
    s = fam.s

    def psi(x):
        x = np.asarray(x, dtype=float)
        t = x * x
        return x ** s * np.exp(-0.5 * t) * y(t) / eta(t)
    psi.n, psi.family, psi.polynomial = n, fam, y
    return psi


def _log_derivs(y, eta, s, x):
    # (log psi)' and (log psi)'' for psi = x^s exp(-x^2/2) y(x^2)/eta(x^2)
    t = x * x
    y0, y1, y2 = y(t), y.deriv()(t), y.deriv(2)(t)
    e0, e1, e2 = eta(t), eta.deriv()(t), eta.deriv(2)(t)
    ry, re = y1 / y0, e1 / e0
    d1 = s / x - x + 2.0 * x * (ry - re)
    d2 = (-s / x ** 2 - 1.0 + 2.0 * (ry - re)
          + 4.0 * t * ((y2 / y0 - ry * ry) - (e2 / e0 - re * re)))
    return d1, d2


def ode_residual(n, fam, t):
    """Residual of the t-domain equation satisfied by Lhat_n, relative to its terms.

    With Y = Lhat_n / eta the Schrodinger equation for V_hat becomes
    t Y'' + (s + 1/2 - t) Y' + (E - 2s - 1 - dV)/4 Y = 0, where
    dV = V_hat - x^2 - s(s-1)/x^2.
    """
    t = np.asarray(t, dtype=float)
    y, eta, s = exceptional_laguerre(n, fam), fam.eta, fam.s
    y0, y1, y2 = y(t), y.deriv()(t), y.deriv(2)(t)
    e0, e1, e2 = eta(t), eta.deriv()(t), eta.deriv(2)(t)
    Y0 = y0 / e0
    Y1 = (y1 * e0 - y0 * e1) / e0 ** 2
    Y2 = (y2 * e0 - y0 * e2) / e0 ** 2 - 2.0 * e1 * Y1 / e0
    x = np.sqrt(t)
    dV = -(2.0 if fam.l else 0.0) - 2.0 * _log_eta_second(x, fam)
    c = (level(n, fam) - 2.0 * s - 1.0 - dV) / 4.0
    terms = [t * Y2, (s + 0.5 - t) * Y1, c * Y0]
    scale = np.maximum(sum(np.abs(v) for v in terms), 1e-300)
    return np.abs(sum(terms)) / scale


def gram_matrix(fam, nmax, quad_n=64, panels=6, scale=None):
    """Gram matrix of Lhat_first..Lhat_nmax under the t-weight, by quadrature.

    The semi-infinite map length ``scale`` defaults to max(5, nmax), roughly
    where the highest integrand peaks.
    """
    idx = list(range(fam.first, nmax + 1))
    polys = [exceptional_laguerre(n, fam) for n in idx]
    scale = max(5.0, float(nmax)) if scale is None else scale
    rule = quadrature_rule(0.0, np.inf, n=quad_n, panels=panels, edge_power=2, scale=scale)
    w = t_weight(rule.nodes, fam) * rule.weights
    vals = np.array([p(rule.nodes) for p in polys])
    return (vals * w) @ vals.T, idx


def node_count(n, fam):
    """Number of zeros of psi_n on (0, inf), i.e. positive zeros of Lhat_n."""
    r = exceptional_laguerre(n, fam).roots()
    return int(np.sum((np.abs(r.imag) < 1e-9 * np.maximum(1.0, np.abs(r))) & (r.real > 0)))


@dataclass(frozen=True)
class PoleTerm:
    location: complex
    residue: complex
    kind: str  # moving | mirror | exceptional | deformation | origin


@dataclass(frozen=True)
class ExceptionalQMF:
    """p(z) = i z + sum residue / (z - location) for psi_n of the deformed oscillator."""

    n: int
    family: ExceptionalLaguerreFamily
    poles: tuple
    linear: complex = 1j

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.linear * z
        for p in self.poles:
            out = out + p.residue / (z - p.location)
        return out

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        out = self.linear + 0 * z
        for p in self.poles:
            out = out - p.residue / (z - p.location) ** 2
        return out

    def from_wavefunction(self, z):
        """-i (log psi)' from the polynomials, independent of the pole catalog."""
        y, eta = exceptional_laguerre(self.n, self.family), self.family.eta
        z = np.asarray(z, dtype=complex)
        t = z * z
        d1 = self.family.s / z - z + 2.0 * z * (y.deriv()(t) / y(t) - eta.deriv()(t) / eta(t))
        return -1j * d1

    @property
    def moving_poles(self):
        return np.sort([p.location.real for p in self.poles if p.kind == "moving"])

    def catalog(self):
        return [(p.kind, p.location, p.residue) for p in self.poles]


def _square_root(t):
    # principal root, with round-off imaginary parts of real t dropped first
    t = complex(t)
    if abs(t.imag) <= 1e-12 * max(1.0, abs(t)):
        t = complex(t.real)
    return complex(np.sqrt(t))


def exceptional_qmf(n, fam):
    """QMF -i (log psi_n)' as a rational object with its pole catalog.

    Residues: -i at every zero of Lhat_n(x^2) (``moving`` on x > 0, their
    ``mirror`` images on x < 0, ``exceptional`` for the zero on the negative
    t axis), +i at the zeros of eta(x^2) (``deformation``), -i s at the
    origin, and linear part i x.
    """
    y = exceptional_laguerre(n, fam)
    poles = [PoleTerm(0j, -1j * fam.s, "origin")]
    for t in y.roots():
        positive = abs(t.imag) <= 1e-9 * max(1.0, abs(t)) and t.real > 0
        r = _square_root(t)
        poles.append(PoleTerm(r, -1j, "moving" if positive else "exceptional"))
        poles.append(PoleTerm(-r, -1j, "mirror" if positive else "exceptional"))
    for t in fam.eta.roots() if fam.eta.degree > 0 else []:
        r = _square_root(t)
        poles.append(PoleTerm(r, 1j, "deformation"))
        poles.append(PoleTerm(-r, 1j, "deformation"))
    return ExceptionalQMF(n, fam, tuple(poles))


def check_residues(qmf):
    """Numeric residue of ``from_wavefunction`` at every catalog pole; max error."""
    locs = np.array([p.location for p in qmf.poles])
    worst = 0.0
    for k, p in enumerate(qmf.poles):
        others = np.delete(locs, k)
        radius = 0.25 * float(np.min(np.abs(others - p.location))) if others.size else 0.5
        res = numeric_residue(qmf.from_wavefunction, p.location, radius, m=512)
        worst = max(worst, abs(res - p.residue))
    return worst


def enclosed_action(qmf, m=None):
    """(1/2 pi) Re of the closed integral of p around the positive moving poles only."""
    x = qmf.moving_poles
    if x.size == 0:
        return 0.0
    others = np.array([p.location for p in qmf.poles if p.kind != "moving"])
    lo, hi = float(x[0]), float(x[-1])
    margin = 0.5 * min(float(np.min(np.abs(others[:, None] - x[None, :]))), 1.0)
    center, a = 0.5 * (lo + hi), 0.5 * (hi - lo) + margin
    b = min(a, margin)
    m = m or 1 << 14
    return contour_integral(qmf.from_wavefunction, center, (a, b), m).real / (2 * np.pi)


def isospectral_check(n1, n2, fam, grid):
    """(spread, gap) of d = psi1''/psi1 - psi2''/psi2 over ``grid``.

    Both states solve the same potential exactly when d is constant; the
    constant is E_{n2} - E_{n1}.
    """
    x = np.asarray(grid, dtype=float)
    if np.any(x <= 0):
        raise DomainError("grid must be positive")
    eta, s = fam.eta, fam.s
    ratios = []
    for n in (n1, n2):
        y = exceptional_laguerre(n, fam)
        if np.any(y(x * x) == 0):
            raise DomainError(f"grid point at a node of psi_{n}")
        d1, d2 = _log_derivs(y, eta, s, x)
        ratios.append(d2 + d1 * d1)
    d = ratios[0] - ratios[1]
    return float(np.std(d)), float(np.mean(d))


def exceptional_log_jpdf(points, fam, beta=2.0):
    """(beta/2) sum log w_hat(lambda_i) + beta sum_{i<j} log|lambda_i - lambda_j|."""
    x = np.sort(np.asarray(points, dtype=float).ravel())
    if np.any(x <= 0):
        raise DomainError("points must be positive")
    if not beta > 0:
        raise InvalidInputError("beta must be positive")
    return float(0.5 * beta * np.sum(log_deformed_weight(x, fam)) + beta * log_vandermonde_abs(x))
