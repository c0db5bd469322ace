"""Numerical kernels: eigensolvers, seeded random streams, quadrature and
contour integration.

Everything here is deliberately small; the physics lives in the other
modules.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import EvaluationError, InvalidInputError

__all__ = [
    "RandomStream",
    "substream",
    "symtri_eigenvalues",
    "hermitian_eigenvalues",
    "QuadratureRule",
    "gauss_legendre",
    "quadrature_rule",
    "integrate",
    "gaussian_sample",
    "chi_sample",
    "contour_integral",
]

_MASK64 = (1 << 64) - 1


# ---------------------------------------------------------------------------
# random streams
# ---------------------------------------------------------------------------

class RandomStream:
    """Counter-based random stream (Philox 4x64) keyed by ``(seed, index)``.

    Two streams built from the same key produce bit-identical sequences on
    every platform. Distinct ``index`` values give independent substreams of
    the same seed. The stream is advanced by the draw methods; pass it to one
    consumer at a time.
    """

    def __init__(self, seed, index=0):
        if seed < 0 or index < 0:
            raise InvalidInputError("seed and index must be nonnegative")
        self.seed = int(seed) & _MASK64
        self.index = int(index) & _MASK64
        key = np.array([self.seed, self.index], dtype=np.uint64)
        self._bitgen = np.random.Philox(key=key)

    def __repr__(self):
        return f"RandomStream(seed={self.seed}, index={self.index})"

    def substream(self, index):
        return RandomStream(self.seed, index)

    def raw(self, count):
        """``count`` raw 64-bit words."""
        return self._bitgen.random_raw(int(count))

    def uniform(self, count):
        """Uniform variates on the open interval (0, 1)."""
        words = self.raw(count) >> np.uint64(11)
        return (words.astype(np.float64) + 0.5) * 2.0 ** -53

    def normal(self, count):
        return gaussian_sample(self, count)


def substream(seed, index):
    """Independent stream number ``index`` derived from ``seed``."""
    return RandomStream(seed, index)


def gaussian_sample(stream, count):
    """``count`` i.i.d. standard normal variates by the Box-Muller transform."""
    count = int(count)
    if count <= 0:
        return np.empty(0)
    pairs = (count + 1) // 2
    u = stream.uniform(2 * pairs)
    radius = np.sqrt(-2.0 * np.log(u[0::2]))
    angle = 2.0 * np.pi * u[1::2]
    out = np.empty(2 * pairs)
    out[0::2] = radius * np.cos(angle)
    out[1::2] = radius * np.sin(angle)
    return out[:count]


def _gamma_sample(stream, shape, count):
    # Marsaglia-Tsang squeeze; shape < 1 is boosted via G(a) = G(a+1) U^(1/a).
    boost = shape < 1.0
    a = shape + 1.0 if boost else shape
    d = a - 1.0 / 3.0
    c = 1.0 / math.sqrt(9.0 * d)
    out = np.empty(0)
    while out.size < count:
        batch = max(16, int(1.1 * (count - out.size)) + 8)
        z = gaussian_sample(stream, batch)
        u = stream.uniform(batch)
        v = (1.0 + c * z) ** 3
        ok = v > 0
        with np.errstate(invalid="ignore", divide="ignore"):
            accept = ok & (np.log(u) < 0.5 * z * z + d - d * v + d * np.log(np.where(ok, v, 1.0)))
        out = np.concatenate([out, d * v[accept]])
    out = out[:count]
    if boost:
        out = out * stream.uniform(count) ** (1.0 / shape)
    return out


def chi_sample(stream, dof, count):
    """``count`` chi-distributed variates with ``dof`` (real, > 0) degrees of freedom."""
    if not dof > 0:
        raise InvalidInputError(f"chi dof must be positive, got {dof}")
    count = int(count)
    if count <= 0:
        return np.empty(0)
    return np.sqrt(2.0 * _gamma_sample(stream, 0.5 * dof, count))


# ---------------------------------------------------------------------------
# eigensolvers
# ---------------------------------------------------------------------------

def _tql_eigenvalues(diag, offdiag):
    # Implicit-shift QL on a symmetric tridiagonal matrix, eigenvalues only.
    d = [float(v) for v in diag]
    e = [float(v) for v in offdiag] + [0.0]
    n = len(d)
    eps = np.finfo(float).eps
    for l in range(n):
        iterations = 0
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= eps * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            iterations += 1
            if iterations > 60:
                raise EvaluationError("QL iteration did not converge", node=l)
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            while i >= l:
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
                i -= 1
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0
    return np.sort(np.array(d))


def symtri_eigenvalues(diag, offdiag, method="lapack"):
    """Ascending eigenvalues of a real symmetric tridiagonal matrix.

    ``method="lapack"`` calls LAPACK's tridiagonal solver; ``method="ql"``
    runs the in-house implicit-shift QL iteration. Both are kept so one can
    check the other.
    """
    diag = np.asarray(diag, dtype=float)
    offdiag = np.asarray(offdiag, dtype=float)
    if diag.size == 0:
        raise InvalidInputError("empty diagonal")
    if offdiag.size != diag.size - 1:
        raise InvalidInputError(
            f"offdiag has length {offdiag.size}, expected {diag.size - 1}")
    if diag.size == 1:
        return diag.copy()
    if method == "ql":
        return _tql_eigenvalues(diag, offdiag)
    if method != "lapack":
        raise InvalidInputError(f"unknown method {method!r}")
    return eigh_tridiagonal(diag, offdiag, eigvals_only=True)


def hermitian_eigenvalues(matrix, tol=1e-12):
    """Ascending real spectrum of a complex Hermitian (or real symmetric) matrix."""
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {m.shape}")
    if m.size == 0:
        raise InvalidInputError("empty matrix")
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - m.conj().T)) > tol * scale:
        raise InvalidInputError("matrix is not Hermitian within tolerance")
    return np.linalg.eigvalsh(m)


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    support: tuple = (-1.0, 1.0)

    def __post_init__(self):
        if len(self.nodes) != len(self.weights):
            raise InvalidInputError("nodes and weights differ in length")

    def __call__(self, func):
        return np.dot(self.weights, func(self.nodes))

    def mapped(self, lo, hi):
        """Affine image of a rule on [-1, 1] onto the finite interval [lo, hi]."""
        a, b = self.support
        scale = (hi - lo) / (b - a)
        return QuadratureRule(lo + (self.nodes - a) * scale, self.weights * scale, (lo, hi))


def gauss_legendre(n):
    """n-point Gauss-Legendre rule on [-1, 1]; exact for degree <= 2n-1."""
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    x, w = np.polynomial.legendre.leggauss(int(n))
    return QuadratureRule(x, w, (-1.0, 1.0))


def _unit_rule(n, panels, edge_power):
    # Rule on u in [0, 1] with nodes refined toward u = 0 through t = u**edge_power.
    base = gauss_legendre(n)
    nodes, weights = [], []
    for k in range(panels):
        r = base.mapped(k / panels, (k + 1) / panels)
        nodes.append(r.nodes)
        weights.append(r.weights)
    u = np.concatenate(nodes)
    w = np.concatenate(weights)
    return u ** edge_power, w * edge_power * u ** (edge_power - 1)


def quadrature_rule(lo, hi, n=48, panels=4, edge_power=2, scale=1.0):
    """Composite Gauss-Legendre rule on a possibly infinite interval.

    Variable changes, applied on each half of the interval:

    * finite [lo, hi]: split at the midpoint, x = endpoint +/- h * t with
      t = u**edge_power, which smooths algebraic endpoint factors like
      (x - lo)**alpha;
    * [lo, inf): x = lo + scale * t / (1 - t), t = u**edge_power on [0, 1);
      ``scale`` should be comparable to where the integrand lives;
    * (-inf, inf): split at 0 into the two semi-infinite halves.
    """
    t, wt = _unit_rule(n, panels, edge_power)
    if np.isinf(lo) and np.isinf(hi):
        right = quadrature_rule(0.0, np.inf, n, panels, edge_power, scale)
        return QuadratureRule(np.concatenate([-right.nodes[::-1], right.nodes]),
                              np.concatenate([right.weights[::-1], right.weights]),
                              (lo, hi))
    if np.isinf(hi):
        x = lo + scale * t / (1.0 - t)
        w = scale * wt / (1.0 - t) ** 2
        return QuadratureRule(x, w, (lo, hi))
    if np.isinf(lo):
        r = quadrature_rule(-hi, np.inf, n, panels, edge_power, scale)
        return QuadratureRule(-r.nodes[::-1], r.weights[::-1], (lo, hi))
    h = 0.5 * (hi - lo)
    left = lo + h * t
    right = hi - h * t
    x = np.concatenate([left, right[::-1]])
    w = np.concatenate([h * wt, (h * wt)[::-1]])
    return QuadratureRule(x, w, (lo, hi))


def integrate(func, lo, hi, n=48, panels=4, edge_power=2, scale=1.0):
    """Integral of a vectorized ``func`` over [lo, hi] (ends may be infinite)."""
    return quadrature_rule(lo, hi, n, panels, edge_power, scale)(func)


# ---------------------------------------------------------------------------
# contour integration
# ---------------------------------------------------------------------------

def contour_integral(f, center, semi_axes, m=256):
    """Trapezoidal approximation of the closed integral of ``f`` around an ellipse.

    The ellipse is z(theta) = center + a cos(theta) + i b sin(theta), traversed
    counter-clockwise. For integrands analytic in a neighbourhood of the path
    the error decays geometrically in ``m``.
    """
    a, b = semi_axes
    if not (a > 0 and b > 0):
        raise InvalidInputError("semi-axes must be positive")
    if m < 16:
        raise InvalidInputError("need at least 16 nodes")
    theta = 2.0 * np.pi * np.arange(m) / m
    z = center + a * np.cos(theta) + 1j * b * np.sin(theta)
    dz = -a * np.sin(theta) + 1j * b * np.cos(theta)
    try:
        values = np.asarray(f(z), dtype=complex)
        if values.shape != z.shape:
            raise TypeError
    except TypeError:
        values = np.array([complex(f(zk)) for zk in z])
    bad = ~np.isfinite(values)
    if bad.any():
        node = z[np.argmax(bad)]
        raise EvaluationError(f"non-finite integrand at z={node}", node=node)
    return complex(np.sum(values * dz) * (2.0 * np.pi / m))
