"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Reference values come from ``oracles`` (scipy/numpy, closed forms) and are
computed before the package result they are compared with.
"""
import math
import os
import subprocess
import sys
import time

import numpy as np
import pytest

from conftest import SESSION
from loggas.electrostatics import equilibrium_superpotential, lhopital_family_check, residual, solve_equilibrium
from loggas.electrostatics import Superpotential, _auto_init
from loggas.numerics import RandomStream
from loggas.orthopoly import OrthogonalFamily, family_polynomial, zeros
from loggas.qhj import contour_quantization, polynomial_spectrum, schrodinger_spectrum, susy_partners
from loggas.rmt import (EnsembleSpec, dyson_flow, ks_distance, ks_two_sample, log_jpdf, metropolis_sample,
                        sample_gaussian_ensemble, sample_replicas, sample_tridiagonal_beta, semicircle_cdf)
from loggas.xpoly import (ExceptionalLaguerreFamily, check_residues, exceptional_log_jpdf, exceptional_qmf,
                          gram_matrix, isospectral_check, level)
from oracles import FAMILIES, classical_zeros, gue2_second_moment_gauss_hermite, gue2_second_moment_quadrature
from oracles import hermite_monomial

HERMITE_FIELD = Superpotential(linear=1.0)


def _family(kind, params):
    return OrthogonalFamily(kind, **params)


# -- 1 ----------------------------------------------------------------------

def test_criterion_01_three_way_zero_agreement(report):
    start = time.perf_counter()
    worst, worst_at = 0.0, None
    oracle_worst = 0.0
    for kind, params in FAMILIES:
        fam = _family(kind, params)
        W = equilibrium_superpotential(fam)
        for n in range(1, 41):
            ref = classical_zeros(kind, n, **params)
            eig = np.asarray(zeros(fam, n, polish=False))
            polished = np.asarray(zeros(fam, n, polish=True))
            res = solve_equilibrium(n, W)
            eq = np.asarray(res.points)
            d = max(np.max(np.abs(eig - polished)), np.max(np.abs(eig - eq)), np.max(np.abs(polished - eq)))
            if not res.converged:
                d = math.inf
            if d > worst:
                worst, worst_at = d, (str(fam), n)
            oracle_worst = max(oracle_worst, float(np.max(np.abs(polished - ref)) / max(1.0, np.max(np.abs(ref)))))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-8 and elapsed < 10.0 and oracle_worst < 1e-8
    report(1, ok, f"max three-way gap {worst:.2e} at {worst_at}; vs scipy roots {oracle_worst:.2e}; "
                  f"{elapsed:.1f} s")
    assert worst < 1e-8
    assert oracle_worst < 1e-8
    assert elapsed < 10.0


# -- 2 ----------------------------------------------------------------------

def test_criterion_02_lhopital_identity(report):
    worst = 0.0
    for kind, params in FAMILIES:
        fam = _family(kind, params)
        for n in range(2, 31):
            sums, ratio, scale = lhopital_family_check(fam, n)
            worst = max(worst, float(np.max(np.abs(sums - ratio) / scale)))
    ok = worst < 1e-9
    report(2, ok, f"max relative defect {worst:.2e} (n <= 30, five families)")
    assert ok


# -- 3 ----------------------------------------------------------------------

def test_criterion_03_hermite_reduction(report):
    states = polynomial_spectrum(HERMITE_FIELD, 25)
    lam_err = max(abs(st.lambda_ - 2 * st.n) for st in states)
    coef_err = 0.0
    for st in states:
        ref = hermite_monomial(st.n)
        ours = np.array(st.f.coeffs)
        ref = ref / ref[-1]
        ours = ours / ours[-1]
        coef_err = max(coef_err, float(np.max(np.abs(ours - ref)) / np.max(np.abs(ref))))
    ok = len(states) == 26 and lam_err < 1e-9 and coef_err < 1e-9
    report(3, ok, f"lambda error {lam_err:.2e}, coefficient error {coef_err:.2e}")
    assert ok


# -- 4 ----------------------------------------------------------------------

def test_criterion_04_exact_quantization(report):
    worst = 0.0
    for kind, params in FAMILIES[:3]:
        fam = _family(kind, params)
        W = equilibrium_superpotential(fam)
        for n in range(0, 11):
            J = contour_quantization(family_polynomial(fam, n), W)
            worst = max(worst, abs(J - n))
    ok = worst < 1e-6
    report(4, ok, f"max |J - n| = {worst:.2e} (Hermite, Laguerre 0 and 1.5, n <= 10)")
    assert ok


# -- 5 ----------------------------------------------------------------------

def test_criterion_05_susy_cross_check(report):
    v_plus, v_minus = susy_partners(HERMITE_FIELD)
    ep = schrodinger_spectrum(v_plus, (-8.0, 8.0), 4000, 4)
    em = schrodinger_spectrum(v_minus, (-8.0, 8.0), 4000, 4)
    plus_err = float(np.max(np.abs(ep - np.array([0.0, 2.0, 4.0, 6.0]))))
    shift_err = float(np.max(np.abs(em[:3] - ep[1:])))
    ok = plus_err < 2e-3 and shift_err < 5e-3
    report(5, ok, f"V+ error {plus_err:.2e}, partner shift error {shift_err:.2e}")
    assert ok


# -- 6 ----------------------------------------------------------------------

def _pooled_gue(N, replicas, seed):
    spec = EnsembleSpec(2, N)
    samples = sample_replicas(lambda s: sample_gaussian_ensemble(spec, s), seed, replicas)
    return np.concatenate([np.asarray(s.eigenvalues) for s in samples]) / math.sqrt(N)


def test_criterion_06_semicircle(report):
    start = time.perf_counter()
    ks = [ks_distance(_pooled_gue(N, 50, 2024), semicircle_cdf) for N in (50, 100, 200)]
    elapsed = time.perf_counter() - start
    monotone = ks[0] > ks[1] > ks[2]
    ok = ks[2] < 0.03 and monotone and elapsed < 60
    report(6, ok, f"KS {ks[0]:.4f}, {ks[1]:.4f}, {ks[2]:.4f} for N = 50, 100, 200; {elapsed:.1f} s")
    assert ok


# -- 7 ----------------------------------------------------------------------

def test_criterion_07_tridiagonal_vs_dense(report):
    from scipy.stats import ks_2samp

    N = 100
    tri = sample_replicas(lambda s: sample_tridiagonal_beta(N, 2.0, s), 77, 100)
    dense = _pooled_gue(N, 100, 78) * math.sqrt(N)
    tri = np.concatenate([np.asarray(s.eigenvalues) for s in tri])
    ref = ks_2samp(tri, dense).statistic
    ks = ks_two_sample(tri, dense)
    ok = ks < 0.05 and abs(ks - ref) < 1e-12
    report(7, ok, f"two-sample KS {ks:.4f} (scipy {ref:.4f})")
    assert ok


# -- 8 ----------------------------------------------------------------------

def test_criterion_08_jpdf_identities(report):
    rng = np.random.default_rng(8)
    fields = [
        (HERMITE_FIELD, lambda x: -x * x, (-3.0, 3.0)),
        (equilibrium_superpotential(OrthogonalFamily.laguerre(1.5)),
         lambda x: -x + 2.5 * np.log(x), (0.01, 8.0)),
        (equilibrium_superpotential(OrthogonalFamily.jacobi(1.0, 2.0)),
         lambda x: 2.0 * np.log1p(-x) + 3.0 * np.log1p(x), (-0.99, 0.99)),
    ]
    worst, perm_exact = 0.0, True
    for trial in range(1000):
        W, log_w, (lo, hi) = fields[trial % 3]
        x = rng.uniform(lo, hi, size=rng.integers(2, 9))
        a = log_jpdf(x, 2.0, W, "potential")
        b = log_jpdf(x, 2.0, W, "weight", log_weight=log_w)
        worst = max(worst, abs(a - b) / max(1.0, abs(a)))
        y = rng.permutation(x)
        perm_exact &= log_jpdf(y, 2.0, W, "potential") == a
    ok = worst < 1e-12 and perm_exact
    report(8, ok, f"potential vs weight {worst:.2e} over 1000 configurations; permutation exact: {perm_exact}")
    assert ok


# -- 9 / 10 -----------------------------------------------------------------

@pytest.fixture(scope="module")
def gue2_oracle():
    return gue2_second_moment_quadrature()


@pytest.fixture(scope="module")
def mcmc_estimate(gue2_oracle):
    start = time.perf_counter()
    res = metropolis_sample(EnsembleSpec(2.0, 2), 1_000_000, 10_000, 0.9, RandomStream(9))
    elapsed = time.perf_counter() - start
    return res.mean(lambda s: np.sum(s * s, axis=1)), res.acceptance_rate, elapsed


def test_criterion_09_mcmc_vs_quadrature(report, gue2_oracle, mcmc_estimate):
    exact = gue2_second_moment_gauss_hermite()
    est, acc, elapsed = mcmc_estimate
    rel = abs(est - gue2_oracle) / gue2_oracle
    ok = rel < 0.02 and elapsed < 30 and abs(gue2_oracle - exact) < 1e-9
    report(9, ok, f"MCMC {est:.4f} vs quadrature {gue2_oracle:.6f} ({100 * rel:.2f}%), "
                  f"acceptance {acc:.2f}, {elapsed:.1f} s")
    assert abs(gue2_oracle - exact) < 1e-9
    assert rel < 0.02
    assert elapsed < 30


def test_criterion_10_fokker_planck_stationarity(report, mcmc_estimate):
    det_worst = 0.0
    for n in range(1, 11):
        init = 0.5 * _auto_init(n, HERMITE_FIELD, -math.inf, math.inf)
        traj = dyson_flow(init, HERMITE_FIELD, 0.0, 0.01, 4000, record_every=4000)
        det_worst = max(det_worst, float(np.max(np.abs(residual(np.asarray(traj.final), HERMITE_FIELD)))))
    traj = dyson_flow([-0.5, 0.5], HERMITE_FIELD, 2.0, 0.005, 400_000, RandomStream(10))
    avg = traj.time_average(lambda p: np.sum(p * p, axis=1))
    est = mcmc_estimate[0]
    rel = abs(avg - est) / est
    ok = det_worst < 1e-8 and rel < 0.05
    report(10, ok, f"deterministic residual {det_worst:.2e} (n <= 10); "
                   f"Dyson time average {avg:.4f} vs MCMC {est:.4f} ({100 * rel:.2f}%)")
    assert ok


# -- 11 ---------------------------------------------------------------------

def test_criterion_11_exceptional_sector(report):
    gram_worst, iso_worst, res_worst = 0.0, 0.0, 0.0
    gaps_ok = True
    grid = np.linspace(0.35, 3.1, 60)
    for g in (1.0, 2.5):
        fam = ExceptionalLaguerreFamily(g, 1)
        G, idx = gram_matrix(fam, 10)
        d = np.sqrt(np.diag(G))
        R = G / np.outer(d, d) - np.eye(len(idx))
        gram_worst = max(gram_worst, float(np.max(np.abs(R))))
        gaps = []
        for n in range(1, 10):
            spread, gap = isospectral_check(n, n + 1, fam, grid)
            iso_worst = max(iso_worst, spread / abs(gap))
            gaps.append(gap)
            gaps_ok &= abs(gap - (level(n + 1, fam) - level(n, fam))) < 1e-6 * abs(gap)
        gaps_ok &= np.ptp(gaps) < 1e-6 * np.mean(np.abs(gaps))
        for n in range(1, 11):
            res_worst = max(res_worst, check_residues(exceptional_qmf(n, fam)))
    rng = np.random.default_rng(11)
    pass_worst = 0.0
    for g in (0.7, 1.0, 2.5):
        fam = ExceptionalLaguerreFamily(g, 0)
        for _ in range(50):
            x = rng.uniform(0.05, 4.0, size=rng.integers(2, 7))
            i, j = np.triu_indices(x.size, 1)
            ref = float(np.sum(2 * g * np.log(x) - x * x) + 2 * np.sum(np.log(np.abs(x[i] - x[j]))))
            pass_worst = max(pass_worst, abs(exceptional_log_jpdf(x, fam) - ref) / max(1.0, abs(ref)))
    ok = gram_worst < 1e-8 and iso_worst < 1e-6 and gaps_ok and res_worst < 1e-8 and pass_worst < 1e-12
    report(11, ok, f"Gram {gram_worst:.2e}, isospectral {iso_worst:.2e}, equal gaps {gaps_ok}, "
                   f"residues {res_worst:.2e}, pass-through {pass_worst:.2e}")
    assert ok


# -- 12 ---------------------------------------------------------------------

SEEDED_COMMANDS = [
    ["sample", "--ensemble", "gue", "--dim", "1", "--replicas", "1", "--seed", "7"],
    ["sample", "--ensemble", "goe", "--dim", "6", "--replicas", "4", "--seed", "3"],
    ["sample", "--ensemble", "gse", "--dim", "5", "--replicas", "3", "--seed", "3", "--scale"],
    ["sample", "--ensemble", "tridiag", "--beta", "2.7", "--dim", "8", "--replicas", "5", "--seed", "1",
     "--bins", "7"],
    ["semicircle-test", "--dim", "20", "--replicas", "6", "--seed", "5"],
    ["mcmc", "--beta", "2", "--n", "3", "--steps", "3000", "--burn-in", "300", "--step-scale", "0.8",
     "--seed", "4"],
    ["mcmc", "--beta", "2", "--n", "2", "--steps", "2000", "--burn-in", "200", "--step-scale", "0.5",
     "--seed", "4", "--exceptional", "--g", "1.5", "--l", "1"],
    ["dyson", "--n", "4", "--beta", "2", "--dt", "0.01", "--steps", "500", "--seed", "6"],
]


def _cli(argv, threads):
    env = dict(os.environ, LOGGAS_THREADS=str(threads))
    return subprocess.run([sys.executable, "-m", "loggas", *argv], capture_output=True, env=env, check=False)


def test_criterion_12_determinism_and_runtime(report):
    mismatches = []
    for argv in SEEDED_COMMANDS:
        for extra in ([], ["--json"]):
            runs = [_cli(argv + extra, t) for t in (1, 1, 3)]
            codes = {r.returncode for r in runs}
            outs = {r.stdout for r in runs}
            if codes != {0} or len(outs) != 1 or not runs[0].stdout:
                mismatches.append(" ".join(argv[:1] + extra))
    elapsed = time.perf_counter() - SESSION["start"]
    ok = not mismatches and elapsed < 300
    report(12, ok, f"{2 * len(SEEDED_COMMANDS)} seeded commands x 3 runs byte-identical: {not mismatches}; "
                   f"suite time so far {elapsed:.0f} s")
    assert not mismatches, mismatches
    assert elapsed < 300
