import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from loggas.errors import EvaluationError, InvalidInputError
from loggas.numerics import (RandomStream, chi_sample, contour_integral, gauss_legendre, gaussian_sample,
                             hermitian_eigenvalues, integrate, quadrature_rule, substream, symtri_eigenvalues)
from oracles import chi_cdf


def test_stream_is_reproducible_and_keyed():
    a = RandomStream(42, 3).raw(16)
    b = substream(42, 3).raw(16)
    c = RandomStream(42, 4).raw(16)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert not np.array_equal(a, RandomStream(43, 3).raw(16))


def test_stream_rejects_negative_keys():
    with pytest.raises(InvalidInputError):
        RandomStream(-1)


def test_uniform_open_interval_and_moments():
    u = RandomStream(1).uniform(200_000)
    assert u.min() > 0.0 and u.max() < 1.0
    assert abs(u.mean() - 0.5) < 5 * math.sqrt(1 / 12 / u.size)
    assert stats.kstest(u, "uniform").statistic < 0.005


def test_gaussian_matches_normal_law():
    z = gaussian_sample(RandomStream(2), 100_001)
    assert z.size == 100_001
    assert stats.kstest(z, "norm").statistic < 0.006
    assert abs(z.var() - 1.0) < 0.02


@pytest.mark.parametrize("dof", [0.7, 1.0, 2.5, 7.0, 40.0])
def test_chi_sample_against_cdf(dof):
    x = chi_sample(RandomStream(3, int(10 * dof)), dof, 40_000)
    ks = stats.kstest(x, lambda v: chi_cdf(v, dof)).statistic
    assert ks < 0.01
    assert np.all(x > 0)


def test_chi_rejects_bad_dof():
    with pytest.raises(InvalidInputError):
        chi_sample(RandomStream(0), 0.0, 3)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=2, max_value=40), st.integers(min_value=0, max_value=2**32 - 1))
def test_ql_matches_lapack_and_dense(n, seed):
    rng = np.random.default_rng(seed)
    d, e = rng.normal(size=n), rng.normal(size=n - 1)
    dense = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    ref = np.linalg.eigvalsh(dense)
    scale = max(1.0, np.max(np.abs(ref)))
    assert np.max(np.abs(symtri_eigenvalues(d, e, method="ql") - ref)) < 1e-12 * scale
    assert np.max(np.abs(symtri_eigenvalues(d, e) - ref)) < 1e-12 * scale


def test_symtri_validates_shapes():
    with pytest.raises(InvalidInputError):
        symtri_eigenvalues([1.0, 2.0], [1.0, 2.0])
    with pytest.raises(InvalidInputError):
        symtri_eigenvalues([], [])
    assert symtri_eigenvalues([3.0], []).tolist() == [3.0]


def test_hermitian_eigenvalues_rejects_non_hermitian():
    with pytest.raises(InvalidInputError):
        hermitian_eigenvalues(np.array([[0.0, 1.0], [0.0, 0.0]]))
    ev = hermitian_eigenvalues(np.array([[2.0, 1j], [-1j, 2.0]]))
    assert np.allclose(ev, [1.0, 3.0], atol=1e-14)


@given(st.integers(min_value=1, max_value=30))
def test_gauss_legendre_exact_to_degree_2n_minus_1(n):
    rule = gauss_legendre(n)
    for k in range(2 * n):
        exact = 0.0 if k % 2 else 2.0 / (k + 1)
        assert abs(rule(lambda x: x ** k) - exact) < 1e-13


def test_quadrature_edge_singularity():
    # x^(-1/2) on (0, 1] is smoothed by the u^2 substitution
    assert abs(integrate(lambda x: x ** -0.5, 0.0, 1.0) - 2.0) < 1e-12
    assert abs(integrate(lambda x: (1 - x) ** 1.5 * (1 + x) ** 0.5, -1.0, 1.0)
               - 2 ** 3 * math.gamma(2.5) * math.gamma(1.5) / math.gamma(4.0)) < 1e-10


def test_quadrature_infinite_ranges():
    assert abs(integrate(lambda x: x * x * np.exp(-x), 0.0, np.inf, scale=2.0) - 2.0) < 1e-12
    assert abs(integrate(lambda x: np.exp(-x * x), -np.inf, np.inf) - math.sqrt(math.pi)) < 1e-12
    assert abs(integrate(lambda x: np.exp(x), -np.inf, 0.0) - 1.0) < 1e-12
    rule = quadrature_rule(0.0, np.inf, scale=3.0)
    assert np.all(rule.nodes > 0) and np.all(np.isfinite(rule.nodes))


def test_contour_integral_residues():
    val = contour_integral(lambda z: 1.0 / (z - 0.3), 0.0, (1.0, 0.5))
    assert abs(val - 2j * math.pi) < 1e-12
    assert abs(contour_integral(lambda z: z ** 3, 0.0, (1.0, 1.0))) < 1e-12
    assert abs(contour_integral(lambda z: 1.0 / (z - 3.0), 0.0, (1.0, 1.0))) < 1e-12


def test_contour_integral_errors():
    with pytest.raises(EvaluationError), np.errstate(divide="ignore", invalid="ignore"):
        contour_integral(lambda z: 1.0 / (z - 1.0), 0.0, (1.0, 1.0), m=64)
    with pytest.raises(InvalidInputError):
        contour_integral(lambda z: z, 0.0, (1.0, 1.0), m=8)
    with pytest.raises(InvalidInputError):
        contour_integral(lambda z: z, 0.0, (0.0, 1.0))
