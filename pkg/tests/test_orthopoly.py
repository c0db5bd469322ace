import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from loggas.errors import DomainError, InvalidInputError
from loggas.orthopoly import (OrthogonalFamily, PointConfiguration, Polynomial, evaluate, evaluate_derivatives,
                              family_polynomial, jacobi_matrix, log_vandermonde_abs, vandermonde_abs, weight,
                              zeros)
from oracles import FAMILIES, classical_norm, classical_values, classical_zeros, hermite_monomial, \
    laguerre_monomial


@pytest.mark.parametrize("kind,params", FAMILIES)
@pytest.mark.parametrize("n", [1, 2, 5, 13, 30])
def test_zeros_match_scipy(kind, params, n):
    ref = classical_zeros(kind, n, **params)
    got = np.asarray(zeros(OrthogonalFamily(kind, **params), n))
    assert np.max(np.abs(got - ref)) < 1e-12 * max(1.0, np.max(np.abs(ref)))


@pytest.mark.parametrize("kind,params", FAMILIES)
def test_values_and_derivatives_match_scipy(kind, params):
    fam = OrthogonalFamily(kind, **params)
    lo, hi = fam.support
    x = np.linspace(max(lo, -3.0) + 0.01, min(hi, 6.0) - 0.01, 23)
    for n in range(0, 12):
        p, d, s = evaluate_derivatives(fam, n, x)
        ref = classical_values(kind, n, x, **params)
        scale = np.max(np.abs(ref)) + 1.0
        assert np.max(np.abs(p - ref)) < 1e-12 * scale
        poly = family_polynomial(fam, n)
        assert np.max(np.abs(d - poly.deriv()(x))) < 1e-10 * (np.max(np.abs(d)) + 1.0)
        assert np.max(np.abs(s - poly.deriv(2)(x))) < 1e-9 * (np.max(np.abs(s)) + 1.0)


def test_family_polynomials_match_closed_forms():
    for n in range(12):
        assert np.allclose(family_polynomial(OrthogonalFamily.hermite(), n).coeffs, hermite_monomial(n),
                           rtol=1e-13, atol=0)
        assert np.allclose(family_polynomial(OrthogonalFamily.laguerre(1.5), n).coeffs,
                           laguerre_monomial(n, 1.5), rtol=1e-12, atol=1e-14)


@pytest.mark.parametrize("kind,params", FAMILIES)
def test_orthogonality_under_weight(kind, params):
    # scipy Gauss rules are exact here; the norm formula is independent of the package
    fam = OrthogonalFamily(kind, **params)
    if kind == "hermite":
        x, w = special.roots_hermite(30)
    elif kind == "laguerre":
        x, w = special.roots_genlaguerre(30, params["alpha"])
    else:
        x, w = special.roots_jacobi(30, params["a"], params["b"])
    vals = np.array([evaluate(fam, n, x)[0] for n in range(10)])
    G = (vals * w) @ vals.T
    norms = np.array([classical_norm(kind, n, **params) for n in range(10)])
    assert np.allclose(np.diag(G), norms, rtol=1e-11)
    off = G / np.sqrt(np.outer(norms, norms)) - np.eye(10)
    assert np.max(np.abs(off)) < 1e-12


def test_jacobi_weight_convention():
    fam = OrthogonalFamily.jacobi(1.0, 2.0)
    x = np.array([-0.5, 0.0, 0.5])
    assert np.allclose(weight(fam, x), (1 - x) * (1 + x) ** 2, rtol=1e-15)
    with pytest.raises(DomainError):
        weight(fam, 1.5)
    with pytest.raises(DomainError):
        weight(OrthogonalFamily.laguerre(0.0), -0.1)


def test_family_validation():
    with pytest.raises(InvalidInputError):
        OrthogonalFamily.laguerre(-1.0)
    with pytest.raises(InvalidInputError):
        OrthogonalFamily.jacobi(0.0, -2.0)
    with pytest.raises(InvalidInputError):
        OrthogonalFamily("chebyshev")
    with pytest.raises(InvalidInputError):
        zeros(OrthogonalFamily.hermite(), 0)


@pytest.mark.parametrize("kind,params", FAMILIES)
def test_jacobi_matrix_eigenvalues_are_zeros(kind, params):
    fam = OrthogonalFamily(kind, **params)
    d, e = jacobi_matrix(fam, 12)
    dense = np.diag(d) + np.diag(e, 1) + np.diag(e, -1)
    assert np.allclose(np.linalg.eigvalsh(dense), classical_zeros(kind, 12, **params), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(FAMILIES), st.integers(min_value=2, max_value=35))
def test_zeros_interlace_and_lie_in_support(fam_spec, n):
    kind, params = fam_spec
    fam = OrthogonalFamily(kind, **params)
    a, b = np.asarray(zeros(fam, n - 1)), np.asarray(zeros(fam, n))
    lo, hi = fam.support
    assert lo < b[0] and b[-1] < hi
    assert np.all(b[:-1] < a) and np.all(a < b[1:])


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=6), st.lists(st.floats(-5, 5), min_size=1, max_size=6),
       st.floats(-3, 3))
def test_polynomial_arithmetic(p, q, x):
    P, Q = Polynomial(p), Polynomial(q)
    tol = 1e-9 * (1 + sum(abs(c) for c in p)) * (1 + sum(abs(c) for c in q)) * (1 + abs(x)) ** 12
    assert abs((P * Q)(x) - P(x) * Q(x)) <= tol
    assert abs((P + Q)(x) - (P(x) + Q(x))) <= tol
    assert abs((P - Q)(x) - (P(x) - Q(x))) <= tol
    assert abs(P(x) - P.term_sum(x)) <= tol


def test_polynomial_roots_and_trimming():
    P = Polynomial.from_roots([1.0, -2.0, 0.5], leading=3.0)
    assert np.allclose(P.roots(), [-2.0, 0.5, 1.0])
    assert P.leading == 3.0 and P.degree == 3
    assert Polynomial([1.0, 0.0, 0.0]).degree == 0
    assert Polynomial([0.0]).degree == -1
    assert P.deriv(4).degree == -1
    assert (-P)(0.3) == -P(0.3)


def test_point_configuration_invariants():
    pc = PointConfiguration([0.0, 1.0, 3.0])
    assert pc.min_gap == 1.0 and len(pc) == 3
    with pytest.raises(ValueError):
        pc.points[0] = 5.0
    with pytest.raises(DomainError):
        PointConfiguration([1.0, 1.0])
    with pytest.raises(DomainError):
        PointConfiguration([2.0, 1.0])
    assert PointConfiguration.from_unsorted([2.0, 1.0]).points.tolist() == [1.0, 2.0]


@settings(max_examples=50)
@given(st.lists(st.floats(-10, 10), min_size=2, max_size=7, unique=True))
def test_vandermonde_against_bruteforce_and_permutations(pts):
    x = np.array(pts)
    if np.min(np.abs(x[:, None] - x[None, :]) + np.eye(x.size)) < 1e-6:
        return
    brute = math.prod(abs(b - a) for a, b in itertools.combinations(pts, 2))
    assert math.isclose(vandermonde_abs(x), brute, rel_tol=1e-12)
    base = log_vandermonde_abs(x)
    for perm in itertools.islice(itertools.permutations(pts), 24):
        assert log_vandermonde_abs(perm) == base
