"""Gaussian ensembles and the log-gas joint eigenvalue density.

Matrix normalizations:

* GOE: real symmetric, off-diagonal variance 1, diagonal variance 2.
* GUE: Hermitian, E|M_ij|^2 = 1 off the diagonal, real diagonal variance 1.
  After lambda -> lambda / sqrt(N) the spectrum fills the semicircle of
  radius 2.
* GSE: 2N x 2N complex embedding [[A, B], [-conj(B), conj(A)]] with the
  joint density prop. to exp(-sum lambda^2 / 2) |Delta|^4; each Kramers pair
  is collapsed to one eigenvalue.
* Tridiagonal beta model: diagonal N(0, 1), off-diagonals chi_{beta k}/sqrt(2);
  joint density prop. to exp(-sum lambda^2 / 2) |Delta|^beta, which is the
  GUE law at beta = 2.

The log-gas density in a field W with antiderivative U is handled
unnormalized, in the log domain:

    log P = -beta sum U(x_i) + beta sum_{i<j} log|x_i - x_j|.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .electrostatics import Superpotential
from .errors import DomainError, IntegrationError, InvalidInputError
from .numerics import chi_sample, gaussian_sample, hermitian_eigenvalues, substream, symtri_eigenvalues
from .orthopoly import PointConfiguration, log_vandermonde_abs

__all__ = [
    "EnsembleSpec",
    "SpectralSample",
    "sample_gaussian_ensemble",
    "sample_tridiagonal_beta",
    "sample_replicas",
    "semicircle_cdf",
    "ks_distance",
    "ks_two_sample",
    "log_jpdf",
    "MetropolisResult",
    "metropolis_sample",
    "DysonTrajectory",
    "dyson_flow",
]

HERMITE_FIELD = Superpotential(linear=1.0)
ENSEMBLE_BETA = {"goe": 1, "gue": 2, "gse": 4}


@dataclass(frozen=True)
class EnsembleSpec:
    beta: float
    N: int
    W: Superpotential = HERMITE_FIELD

    def __post_init__(self):
        if not self.beta > 0:
            raise InvalidInputError("beta must be positive")
        if self.N < 1:
            raise InvalidInputError("N must be >= 1")


@dataclass
class SpectralSample:
    eigenvalues: PointConfiguration
    seed: int
    spec: EnsembleSpec
    method: str
    replica: int = 0


def sample_gaussian_ensemble(spec, stream):
    """One dense GOE/GUE/GSE draw (chosen by ``spec.beta``)."""
    n = spec.N
    if spec.beta == 1:
        a = gaussian_sample(stream, n * n).reshape(n, n)
        m = (a + a.T) / math.sqrt(2.0)
        ev = hermitian_eigenvalues(m)
    elif spec.beta == 2:
        z = gaussian_sample(stream, 2 * n * n).reshape(2, n, n) * math.sqrt(0.5)
        a = z[0] + 1j * z[1]
        m = (a + a.conj().T) / math.sqrt(2.0)
        ev = hermitian_eigenvalues(m)
    elif spec.beta == 4:
        z = gaussian_sample(stream, 4 * n * n).reshape(4, n, n) * math.sqrt(0.5)
        x = z[0] + 1j * z[1]
        y = z[2] + 1j * z[3]
        a = (x + x.conj().T) / math.sqrt(2.0)
        b = (y - y.T) / math.sqrt(2.0)
        m = np.block([[a, b], [-b.conj(), a.conj()]])
        ev2 = hermitian_eigenvalues(m)
        ev = 0.5 * (ev2[0::2] + ev2[1::2])
    else:
        raise InvalidInputError(f"dense sampling needs beta in {{1, 2, 4}}, got {spec.beta}")
    method = {1: "goe", 2: "gue", 4: "gse"}[int(spec.beta)]
    return SpectralSample(PointConfiguration(ev), stream.seed, spec, method, stream.index)


def sample_tridiagonal_beta(N, beta, stream):
    """Dumitriu-Edelman tridiagonal draw for any beta > 0."""
    if not beta > 0:
        raise InvalidInputError("beta must be positive")
    diag = gaussian_sample(stream, N)
    off = np.array([chi_sample(stream, beta * k, 1)[0] for k in range(N - 1, 0, -1)])
    ev = symtri_eigenvalues(diag, off / math.sqrt(2.0))
    spec = EnsembleSpec(beta, N)
    return SpectralSample(PointConfiguration(ev), stream.seed, spec, "tridiagonal", stream.index)


def _thread_count():
    value = os.environ.get("LOGGAS_THREADS")
    if value:
        try:
            return max(1, int(value))
        except ValueError:
            raise InvalidInputError(f"LOGGAS_THREADS must be an integer, got {value!r}")
    return os.cpu_count() or 1


def sample_replicas(draw, seed, replicas, threads=None):
    """Run ``draw(stream)`` for replica streams 0..replicas-1 of ``seed``.

    Results come back in replica order regardless of scheduling.
    """
    threads = threads or _thread_count()
    streams = [substream(seed, r) for r in range(replicas)]
    if threads == 1 or replicas == 1:
        return [draw(s) for s in streams]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(draw, streams))


def semicircle_cdf(x, radius=2.0):
    """CDF of the Wigner semicircle law supported on [-radius, radius]."""
    if not radius > 0:
        raise InvalidInputError("radius must be positive")
    x = np.asarray(x, dtype=float)
    u = np.clip(x / radius, -1.0, 1.0)
    out = 0.5 + (u * np.sqrt(1.0 - u * u) + np.arcsin(u)) / np.pi
    out = np.clip(out, 0.0, 1.0)
    return out[()] if out.ndim == 0 else out


def ks_distance(points, cdf):
    """sup |F_empirical - cdf| for a one-dimensional sample."""
    x = np.sort(np.asarray(points, dtype=float).ravel())
    if x.size == 0:
        raise InvalidInputError("empty sample")
    f = np.asarray(cdf(x), dtype=float)
    n = x.size
    k = np.arange(1, n + 1)
    return float(max(np.max(k / n - f), np.max(f - (k - 1) / n)))


def ks_two_sample(a, b):
    """Two-sample Kolmogorov-Smirnov statistic."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    if a.size == 0 or b.size == 0:
        raise InvalidInputError("empty sample")
    grid = np.concatenate([a, b])
    fa = np.searchsorted(a, grid, side="right") / a.size
    fb = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(fa - fb)))


def log_jpdf(points, beta, W, form="potential", log_weight=None):
    """Unnormalized log joint density of a log-gas configuration.

    ``form="potential"``: -beta sum U(x_i) + beta sum_{i<j} log|x_i - x_j|.
    ``form="weight"``: sum log w(x_i) + beta sum_{i<j} log|x_i - x_j|, with
    ``log_weight`` defaulting to log w = -2U. At beta = 2 the two agree.
    The points are sorted first, so the value is exactly permutation invariant.
    """
    x = np.sort(np.asarray(points, dtype=float).ravel())
    if not beta > 0:
        raise InvalidInputError("beta must be positive")
    repulsion = beta * log_vandermonde_abs(x)
    if form == "potential":
        return float(-beta * np.sum(W.antiderivative(x)) + repulsion)
    if form == "weight":
        lw = -2.0 * W.antiderivative(x) if log_weight is None else log_weight(x)
        return float(np.sum(lw) + repulsion)
    raise InvalidInputError(f"unknown form {form!r}")


def _scalar_potential(W):
    c, d, poles = W.linear, W.constant, W.poles
    log = math.log

    def U(x):
        u = 0.5 * c * x * x + d * x
        for a, s in poles:
            u += s * log(abs(x - a))
        return u
    return U


def _scalar_field(W):
    c, d, poles = W.linear, W.constant, W.poles

    def w(x):
        out = c * x + d
        for a, s in poles:
            out += s / (x - a)
        return out
    return w


@dataclass
class MetropolisResult:
    """Post-burn-in chain, one row per sweep (N single-site proposals)."""

    samples: np.ndarray
    acceptance_rate: float
    spec: EnsembleSpec
    seed: int

    def configurations(self):
        return [PointConfiguration.from_unsorted(row) for row in self.samples]

    def mean(self, fn):
        return float(np.mean(fn(self.samples)))


def metropolis_sample(spec, steps, burn_in, step_scale=None, stream=None, init=None,
                      one_body=None, support=None):
    """Random-walk Metropolis on exp(log_jpdf) with single-site normal proposals.

    ``steps`` counts sweeps; the first ``burn_in`` are discarded. ``one_body``
    replaces the default one-body log factor -beta U(x) (for deformed weights).
    Proposals leaving ``support`` (default: the field's confining interval)
    are rejected.
    """
    if stream is None:
        raise InvalidInputError("a RandomStream is required")
    if steps <= burn_in:
        raise InvalidInputError("steps must exceed burn_in")
    n, beta = spec.N, float(spec.beta)
    if step_scale is None:
        step_scale = 0.5 / math.sqrt(n)
    if not step_scale > 0:
        raise InvalidInputError("step_scale must be positive")
    lo, hi = support if support is not None else spec.W.support()
    if one_body is None:
        U = _scalar_potential(spec.W)

        def one_body(x):
            return -beta * U(x)

    if init is None:
        if math.isfinite(lo) and math.isfinite(hi):
            x = list(lo + (hi - lo) * (np.arange(1, n + 1) / (n + 1)))
        elif math.isfinite(lo):
            x = [lo + 1.0 + k for k in range(n)]
        elif math.isfinite(hi):
            x = [hi - n + k for k in range(n)]
        else:
            x = [k - 0.5 * (n - 1) for k in range(n)]
    else:
        x = [float(v) for v in init]
    phi = [one_body(v) for v in x]

    total = steps * n
    z = (step_scale * gaussian_sample(stream, total)).tolist()
    logu = np.log(stream.uniform(total)).tolist()
    kept = np.empty((steps - burn_in, n))
    log = math.log
    accepted = 0
    idx = 0
    for s in range(steps):
        for k in range(n):
            old = x[k]
            new = old + z[idx]
            lu = logu[idx]
            idx += 1
            if not lo < new < hi:
                continue
            phi_new = one_body(new)
            delta = phi_new - phi[k]
            for j in range(n):
                if j != k:
                    xj = x[j]
                    gap_new = abs(new - xj)
                    if gap_new == 0.0:
                        delta = -math.inf
                        break
                    delta += beta * (log(gap_new) - log(abs(old - xj)))
            if lu < delta:
                x[k] = new
                phi[k] = phi_new
                accepted += 1
        if s >= burn_in:
            kept[s - burn_in] = x
    return MetropolisResult(kept, accepted / total, spec, stream.seed)


@dataclass
class DysonTrajectory:
    times: np.ndarray
    points: np.ndarray
    halvings: int = 0
    dts: np.ndarray = field(default=None, repr=False)

    def configurations(self):
        return [PointConfiguration(row) for row in self.points]

    @property
    def final(self):
        return PointConfiguration(self.points[-1])

    def time_average(self, fn):
        """Average of ``fn(row)`` weighted by the step length that follows each row."""
        values = fn(self.points[:-1])
        return float(np.sum(values * self.dts) / np.sum(self.dts))


def dyson_flow(init, W, beta, dt, steps, stream=None, record_every=1, support=None,
               min_dt_factor=2.0 ** -30, move_fraction=0.25):
    """Euler-Maruyama integration of Dyson Brownian motion in the field W.

        dx_k = [sum_{j != k} 1/(x_k - x_j) - W(x_k)] dt + sqrt(2/beta) dB_k

    ``beta=0`` switches the noise off (deterministic gradient flow). The time
    step is halved while the drift would move a particle by more than
    ``move_fraction`` of its distance to the nearest neighbour or wall; this
    keeps the explicit scheme from overshooting near collisions. A step that
    still breaks the ordering or leaves the support is retried with half the
    time step (same Brownian increment, rescaled). Time averages weight each
    state by the step actually taken.
    """
    if not dt > 0:
        raise InvalidInputError("dt must be positive")
    if beta < 0:
        raise InvalidInputError("beta must be nonnegative")
    x = [float(v) for v in PointConfiguration(init)]
    n = len(x)
    lo, hi = support if support is not None else W.support()
    if not (lo < x[0] and x[-1] < hi):
        raise DomainError("initial configuration outside the support")
    noisy = beta > 0
    sigma = math.sqrt(2.0 / beta) if noisy else 0.0
    z = gaussian_sample(stream, steps * n).tolist() if noisy else None
    field_at = _scalar_field(W)
    sqrt = math.sqrt

    rec_t, rec_x, rec_dt = [0.0], [list(x)], []
    t = 0.0
    halvings = 0
    acc_dt = 0.0
    for step in range(steps):
        drift = []
        for k in range(n):
            xk = x[k]
            s = 0.0
            for j in range(n):
                if j != k:
                    s += 1.0 / (xk - x[j])
            drift.append(s - field_at(xk))
        h = dt
        room = math.inf
        for k in range(n):
            left = x[k] - x[k - 1] if k else x[0] - lo
            right = x[k + 1] - x[k] if k < n - 1 else hi - x[k]
            room = min(room, min(left, right) / (abs(drift[k]) + 1e-300))
        while h > move_fraction * room and h >= dt * min_dt_factor:
            h *= 0.5
            halvings += 1
        noise = z[step * n:(step + 1) * n] if noisy else None
        while True:
            if noisy:
                amp = sigma * sqrt(h)
                new = [x[k] + drift[k] * h + amp * noise[k] for k in range(n)]
            else:
                new = [x[k] + drift[k] * h for k in range(n)]
            ok = lo < new[0] and new[-1] < hi
            if ok:
                for k in range(n - 1):
                    if not new[k] < new[k + 1]:
                        ok = False
                        break
            if ok:
                break
            h *= 0.5
            halvings += 1
            if h < dt * min_dt_factor:
                raise IntegrationError(f"collision at step {step} despite step halving", step=step)
        x = new
        t += h
        acc_dt += h
        if (step + 1) % record_every == 0:
            rec_t.append(t)
            rec_x.append(new)
            rec_dt.append(acc_dt)
            acc_dt = 0.0
    return DysonTrajectory(np.array(rec_t), np.array(rec_x), halvings, np.array(rec_dt))
