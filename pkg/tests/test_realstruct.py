import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from cwiener.crv import ScalarField
from cwiener.klfield import FieldSample, kl_sample, standard_coefficients
from cwiener.realstruct import (SQRT2, compose, conjugate, decompose, imag_part, pt_norm, real_part,
                                rotation_pair)
from cwiener.spectral import Interval, SpectralOperator, dirichlet_basis
from cwiener.stats import cf_factorization_gap, cross_cov, mc_mean
from cwiener.wiener import sample_bm

from conftest import within_k

BASIS = dirichlet_basis(Interval(1.0), 8)
PAIRS = [(1, 1), (1, -1), (1j, 1), (1 + 1j, -1j), (2, 0.5), (-2j, 1j), (0.5 - 0.5j, 1 + 1j), (1, 2j)]

finite = st.floats(-1e6, 1e6, allow_nan=False, allow_subnormal=False)
coeffs = arrays(np.complex128, 8, elements=st.builds(complex, finite, finite))


def field(c, kind=ScalarField.COMPLEX):
    return FieldSample(BASIS, c, kind)


def test_conjugate_fixes_real_fields():
    x = field([1, -2, 0.5, 0, 3, 4, 5, 6], ScalarField.REAL)
    assert np.array_equal(conjugate(x).coeffs, x.coeffs)


@settings(max_examples=200, deadline=None)
@given(coeffs)
def test_involution_antilinearity_isometry(c):
    z = field(c)
    assert np.array_equal(conjugate(conjugate(z)).coeffs, z.coeffs)
    assert np.array_equal(conjugate(field(1j * c)).coeffs, -1j * conjugate(z).coeffs)
    assert pt_norm(conjugate(z)) == pt_norm(z)
    assert np.array_equal(real_part(z).coeffs.real, c.real)
    assert np.array_equal(imag_part(z).coeffs.real, c.imag)


def test_decompose_example():
    x, y = decompose(FieldSample(dirichlet_basis(Interval(1.0), 2), [1 + 1j, 2 - 1j]))
    assert np.array_equal(x.coeffs.real, [SQRT2, 2 * SQRT2])
    assert np.array_equal(y.coeffs.real, [SQRT2, -SQRT2])
    assert x.scalar_field is ScalarField.REAL


def test_compose_examples():
    b = dirichlet_basis(Interval(1.0), 1)
    zero = compose(FieldSample(b, [0], ScalarField.REAL), FieldSample(b, [0], ScalarField.REAL))
    assert zero.coeffs[0] == 0
    z = compose(FieldSample(b, [1], ScalarField.REAL), FieldSample(b, [1], ScalarField.REAL))
    assert z.coeffs[0] == complex(1 / SQRT2, 1 / SQRT2)
    assert pt_norm(z) == pytest.approx(1.0, rel=1e-15)


def test_round_trip_exact_on_dyadic_values():
    c = np.array([1 + 1j, -2 + 0.5j, 0.25 - 4j, 0, 8j, -1, 3 + 3j, 0.125])
    z = field(c)
    assert np.array_equal(compose(*decompose(z)).coeffs, c)


@settings(max_examples=300, deadline=None)
@given(coeffs)
def test_round_trip_within_one_ulp(c):
    back = compose(*decompose(field(c))).coeffs
    for got, want in ((back.real, c.real), (back.imag, c.imag)):
        assert np.all(np.abs(got - want) <= np.spacing(np.abs(want)))


def test_decompose_gives_iid_standard_parts(stream):
    z = kl_sample(SpectralOperator(BASIS, np.ones(4)), 4, rng=stream, n_samples=100_000)
    x, y = decompose(z)
    for m in range(4):
        a, b = x.coeffs[:, m].real, y.coeffs[:, m].real
        assert cf_factorization_gap(a, b, PAIRS).passes()
        assert within_k(mc_mean(a ** 2), 1) and within_k(mc_mean(b ** 2), 1)
        assert within_k(mc_mean(a), 0) and within_k(mc_mean(b), 0)


def test_compose_of_iid_real_fields_is_proper(stream):
    b = dirichlet_basis(Interval(1.0), 4)
    x = FieldSample(b, standard_coefficients(stream.child("x"), 100_000, 4, "real"), ScalarField.REAL)
    y = FieldSample(b, standard_coefficients(stream.child("y"), 100_000, 4, "real"), ScalarField.REAL)
    z = compose(x, y)
    for m in range(4):
        cov, pcov = cross_cov(z.coeffs[:, m], z.coeffs[:, m])
        assert within_k(cov, 1) and within_k(pcov, 0)


def test_compose_rejects_complex_inputs():
    z = field(np.ones(8) * 1j)
    with pytest.raises(ValueError):
        compose(z, z)
    with pytest.raises(ValueError):
        decompose(real_part(z))


def test_pt_norm_examples():
    assert pt_norm(field(np.zeros(8))) == 0
    one = FieldSample(dirichlet_basis(Interval(1.0), 1), [1 + 1j])
    assert pt_norm(one) == pytest.approx(math.sqrt(2), rel=1e-15)


def test_rotation_pair_examples():
    x = field(np.arange(8) + 1j)
    y, y2 = rotation_pair(x, x)
    assert np.allclose(y.coeffs, SQRT2 * x.coeffs, rtol=1e-15) and np.all(y2.coeffs == 0)


@settings(max_examples=200, deadline=None)
@given(coeffs, coeffs)
def test_rotation_twice_is_identity(a, b):
    x, x2 = field(a), field(b)
    z, z2 = rotation_pair(*rotation_pair(x, x2))
    scale = max(np.abs(a).max(), np.abs(b).max(), 1e-300)
    assert np.abs(z.coeffs - a).max() <= 1e-15 * scale * 4
    assert np.abs(z2.coeffs - b).max() <= 1e-15 * scale * 4


def test_rotation_pair_preserves_joint_law(stream):
    op = SpectralOperator(BASIS, 1 / np.arange(1, 4) ** 2)
    x = kl_sample(op, 3, rng=stream.child("x"), n_samples=100_000)
    x2 = kl_sample(op, 3, rng=stream.child("x2"), n_samples=100_000)
    y, y2 = rotation_pair(x, x2)
    for m in range(3):
        for w1, w2 in PAIRS:
            def cf(u, v):
                return np.exp(1j * (np.real(w1 * np.conj(u[:, m])) + np.real(w2 * np.conj(v[:, m]))))
            assert within_k(mc_mean(cf(y.coeffs, y2.coeffs) - cf(x.coeffs, x2.coeffs)), 0)


def test_rotation_pair_on_paths(stream):
    t = np.linspace(0, 1, 5)
    x = sample_bm(t, stream.child("x"), n_samples=50_000)
    x2 = sample_bm(t, stream.child("x2"), n_samples=50_000)
    y, y2 = rotation_pair(x, x2)
    for j in (2, 4):
        for w1, w2 in PAIRS[:4]:
            def cf(u, v):
                return np.exp(1j * (np.real(w1 * np.conj(u[:, j])) + np.real(w2 * np.conj(v[:, j]))))
            assert within_k(mc_mean(cf(y.values, y2.values) - cf(x.values, x2.values)), 0)
    assert np.array_equal(conjugate(conjugate(x)).values, x.values)
    with pytest.raises(ValueError):
        rotation_pair(x, sample_bm(np.linspace(0, 1, 4), stream, n_samples=50_000))
