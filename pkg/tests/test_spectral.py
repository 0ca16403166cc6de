import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cwiener.spectral import (Interval, Rectangle, SpectralOperator, dirichlet_basis,
                              eigen_residual, eigenvalue_power_operator, gram_deviation, op_frac_power,
                              op_hs_norm, op_trace, parse_domain, simpson_weights, weyl_ratio)

PI2 = math.pi ** 2


def test_interval_eigenvalues():
    b = dirichlet_basis(Interval(1.0), 3)
    assert np.allclose(b.eigenvalues, [PI2, 4 * PI2, 9 * PI2], rtol=1e-15)


def test_rectangle_eigenvalues_and_tie_order():
    b = dirichlet_basis(Rectangle(1.0, 1.0), 4)
    assert np.allclose(b.eigenvalues / PI2, [2, 5, 5, 8], rtol=1e-15)
    assert b.indices.tolist() == [[1, 1], [1, 2], [2, 1], [2, 2]]


def test_rectangle_enumeration_is_complete():
    # brute force over a generous index box
    b = dirichlet_basis(Rectangle(1.0, 2.0), 300)
    j, k = np.meshgrid(np.arange(1, 80), np.arange(1, 80), indexing="ij")
    lam = np.sort((PI2 * (j ** 2 + k ** 2 / 4.0)).ravel())[:300]
    assert np.allclose(b.eigenvalues, lam, rtol=1e-14)
    assert np.all(np.diff(b.eigenvalues) >= 0)


@pytest.mark.parametrize("domain,n", [(Interval(1.0), 50), (Interval(2.5), 30), (Rectangle(1.0, 1.0), 40),
                                      (Rectangle(1.0, 2.0), 40)])
def test_gram_matrix_under_simpson(domain, n):
    assert gram_deviation(dirichlet_basis(domain, n)) < 1e-8


@pytest.mark.parametrize("domain", [Interval(1.0), Rectangle(1.0, 1.5)])
def test_eigen_equation_by_finite_differences(domain):
    b = dirichlet_basis(domain, 12)
    for mode in (0, 5, 11):
        assert eigen_residual(b, mode) < 1e-6


def test_evaluate_shapes_and_boundary():
    b = dirichlet_basis(Rectangle(1.0, 2.0), 6)
    vals = b.evaluate(np.array([[0.0, 0.3], [0.5, 2.0], [0.2, 0.7]]))
    assert vals.shape == (3, 6)
    assert np.allclose(vals[:2], 0, atol=1e-15)
    line = dirichlet_basis(Interval(1.0), 3)
    assert line.evaluate([0.5], [0])[0, 0] == pytest.approx(math.sqrt(2))


def test_weyl_interval_ratio_is_constant():
    b = dirichlet_basis(Interval(1.0), 1000)
    r = np.array([weyl_ratio(b, n) for n in range(1, 1001)])
    assert np.all(np.abs(r * PI2 - 1) <= 1e-15)
    b2 = dirichlet_basis(Interval(2.0), 100)
    assert all(weyl_ratio(b2, n) == pytest.approx(4 / PI2, rel=1e-15) for n in range(1, 101))


def test_weyl_unit_square():
    b = dirichlet_basis(Rectangle(1.0, 1.0), 5000)
    assert weyl_ratio(b, 5000) == pytest.approx(1 / (16 * PI2), rel=0.1)
    with pytest.raises(IndexError):
        weyl_ratio(b, 5001)


def test_operator_trace_and_hs_norm():
    op = SpectralOperator(dirichlet_basis(Interval(1.0), 3), [1, 0.5, 0.25])
    assert op_trace(op) == 1.75
    assert op_hs_norm(op) == pytest.approx(math.sqrt(21) / 4, rel=1e-15)
    assert np.all(op_frac_power(op, 0).alphas == 1)


def test_hs_norm_against_extended_precision():
    eps = 0.3
    N = 10_000
    op = eigenvalue_power_operator(dirichlet_basis(Interval(1.0), N), -2 * eps)
    with mpmath.workdps(40):
        pi = mpmath.pi
        exact = mpmath.sqrt(mpmath.fsum((n * pi) ** (-8 * eps) for n in range(1, N + 1)))
    assert op_hs_norm(op) == pytest.approx(float(exact), rel=1e-12)


alphas = st.lists(st.floats(0, 1e3, allow_subnormal=False), min_size=1, max_size=40)


@settings(max_examples=200, deadline=None)
@given(alphas)
def test_hs_bound(a):
    op = SpectralOperator(dirichlet_basis(Interval(1.0), 40), a)
    assert op_hs_norm(op) ** 2 <= op_trace(op) * max(a) * (1 + 1e-12) + 1e-300


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=40), st.floats(-2, 2), st.floats(-2, 2))
def test_frac_power_composition(a, p, q):
    op = SpectralOperator(dirichlet_basis(Interval(1.0), 40), a)
    lhs = op_frac_power(op_frac_power(op, p), q).alphas
    rhs = op_frac_power(op, p * q).alphas
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=0)


def test_frac_power_negative_on_zero():
    op = SpectralOperator(dirichlet_basis(Interval(1.0), 2), [1.0, 0.0])
    with pytest.raises(ZeroDivisionError):
        op_frac_power(op, -1)


def test_operator_validation_and_json():
    b = dirichlet_basis(Rectangle(1.0, 2.0), 10)
    with pytest.raises(ValueError):
        SpectralOperator(b, [1.0, -1.0])
    with pytest.raises(ValueError):
        SpectralOperator(b, np.ones(11))
    op = SpectralOperator(b, 1 / np.arange(1, 11) ** 2)
    back = SpectralOperator.from_json(op.to_json())
    assert np.array_equal(back.alphas, op.alphas)
    assert np.array_equal(back.basis.eigenvalues, b.eigenvalues)


def test_parse_domain():
    assert parse_domain("interval:2") == Interval(2.0)
    assert parse_domain("rect:1,3") == Rectangle(1.0, 3.0)
    for bad in ("disk:1", "interval:-1", "rect:1", "interval:x"):
        with pytest.raises(ValueError):
            parse_domain(bad)


def test_simpson_exact_on_cubics():
    x, w = simpson_weights(0.0, 2.0, 4)
    assert np.dot(w, x ** 3 - x) == pytest.approx(2.0, rel=1e-14)
    with pytest.raises(ValueError):
        simpson_weights(0, 1, 3)
