import math

import numpy as np
import pytest

from cwiener.feynkac import (GridFunction2D, Potential, fk_mc_estimate, gaussian_bump, heat_step,
                             spectral_expm_oracle, trotter_apply)

L, M, T = 6.0, 32, 0.5
F = GridFunction2D.from_function(gaussian_bump(0.5, 1.5), L, M)
G = GridFunction2D.from_function(gaussian_bump(-0.3 + 0.2j, 1.5), L, M)
V = Potential.gaussian(1.0)


def rel_l2(a, b):
    w = a.weights
    return math.sqrt(float(np.sum(w * np.abs(a.values - b.values) ** 2) / np.sum(w * np.abs(b.values) ** 2)))


def test_heat_step_preserves_constants():
    one = GridFunction2D.from_function(lambda z: np.ones_like(z), 6.0, 64)
    out = heat_step(one, 0.1)
    assert np.abs(out.central() - 1).max() < 1e-6


def test_heat_step_second_moment_grows_by_tau():
    tau = 0.5
    f = GridFunction2D.from_function(gaussian_bump(0, 0.5), 6.0, 64)
    r2 = np.abs(f.nodes) ** 2

    def second_moment(g):
        return float(np.sum(g.weights * r2 * g.values.real) / np.sum(g.weights * g.values.real))

    before, after = second_moment(f), second_moment(heat_step(f, tau))
    assert after - before == pytest.approx(tau, rel=0.01)


@pytest.mark.parametrize("tau", [0.5, 0.05, 0.005])
def test_heat_semigroup(tau):
    f = GridFunction2D.from_function(gaussian_bump(0.3j, 1.0), 6.0, 64)
    two = heat_step(heat_step(f, tau / 2), tau / 2)
    one = heat_step(f, tau)
    diff = np.abs(two.values - one.values)
    mask = np.abs(f.axis) <= 3 + 1e-12
    assert diff[np.ix_(mask, mask)].max() < 1e-4


def test_heat_step_rejects_nonpositive_tau():
    with pytest.raises(ValueError):
        heat_step(F, 0)


def test_trotter_with_zero_potential_is_heat():
    zero = Potential.constant(0)
    assert np.abs(trotter_apply(F, zero, T, 16).values - heat_step(F, T).values).max() < 1e-4


def test_trotter_with_constant_potential():
    c = 0.7
    out = trotter_apply(F, Potential.constant(c), T, 16)
    ref = math.exp(-c * T) * heat_step(F, T).values
    assert np.abs(out.values - ref).max() / np.abs(ref).max() < 1e-3


def test_trotter_self_convergence():
    runs = {n: trotter_apply(F, V, T, n) for n in (8, 16, 32, 64)}
    assert np.abs(runs[32].values - runs[64].values).max() < 1e-3
    diffs = [np.abs(runs[n].values - runs[2 * n].values).max() for n in (8, 16, 32)]
    assert diffs[1] / diffs[0] <= 0.7 and diffs[2] / diffs[1] <= 0.7


def test_spectral_oracle_examples():
    assert np.array_equal(spectral_expm_oracle(F, V, 0.0).values, F.values)
    zero = spectral_expm_oracle(F, Potential.constant(0), T)
    c = 0.4
    shifted = spectral_expm_oracle(F, Potential.constant(c), T)
    assert np.abs(shifted.values - math.exp(-c * T) * zero.values).max() <= 1e-12 * np.abs(zero.values).max()
    assert rel_l2(heat_step(F, T), zero) < 0.01


def test_spectral_oracle_limits():
    big = GridFunction2D.from_function(gaussian_bump(), 6.0, 40)
    with pytest.raises(ValueError):
        spectral_expm_oracle(big, V, T)
    with pytest.raises(ValueError):
        spectral_expm_oracle(F, V, -1.0)


def test_complex_potential_oracle_agrees_with_trotter():
    W = Potential(lambda z: (0.5 + 0.5j) * np.exp(-np.abs(z) ** 2), math.sqrt(0.5))
    assert not W.is_real
    assert rel_l2(trotter_apply(F, W, T, 64), spectral_expm_oracle(F, W, T)) < 0.01


def test_canonical_case_three_estimators(stream):
    oracle = spectral_expm_oracle(F, V, T)
    assert rel_l2(trotter_apply(F, V, T, 64), oracle) < 0.01
    target = oracle.inner(G)
    mc = fk_mc_estimate(F, G, V, T, 200, stream)
    assert abs(mc.value - target) <= max(4 * mc.std_error, 0.05 * abs(target))


def test_mc_zero_potential_matches_heat(stream):
    f = GridFunction2D.from_function(gaussian_bump(0, 1.5), L, M)
    mc = fk_mc_estimate(f, f, Potential.constant(0), T, 100, stream)
    target = heat_step(f, T).inner(f)
    assert abs(mc.value - target) <= max(4 * mc.std_error, 0.02 * abs(target))


def test_mc_short_time_is_identity(stream):
    mc = fk_mc_estimate(F, G, V, 1e-3, 50, stream)
    target = F.inner(G)
    assert abs(mc.value - target) <= 4 * mc.std_error + 1e-3 * abs(target)


def test_mc_sesquilinear(stream):
    base = fk_mc_estimate(F, G, V, T, 20, stream)
    f2 = F.like(2j * F.values)
    g2 = G.like(2j * G.values)
    scaled_f = fk_mc_estimate(f2, G, V, T, 20, stream)
    scaled_g = fk_mc_estimate(F, g2, V, T, 20, stream)
    assert scaled_f.value == pytest.approx(2j * base.value, rel=1e-12)
    assert scaled_g.value == pytest.approx(-2j * base.value, rel=1e-12)


def test_mc_sign_flag_matches_trotter(stream):
    oracle = spectral_expm_oracle(F, V, T, sign=1.0)
    assert rel_l2(trotter_apply(F, V, T, 64, sign=1.0), oracle) < 0.01
    mc = fk_mc_estimate(F, G, V, T, 200, stream, sign=1.0)
    target = oracle.inner(G)
    assert abs(mc.value - target) <= max(4 * mc.std_error, 0.05 * abs(target))


def test_mc_requires_fine_time_steps(stream):
    with pytest.raises(ValueError):
        fk_mc_estimate(F, G, V, T, 10, stream, n_steps=16)


def test_potential_bound_is_checked():
    with pytest.raises(ValueError):
        Potential(lambda z: 2 * np.exp(-np.abs(z) ** 2), 1.0)
    with pytest.raises(ValueError):
        Potential(lambda z: np.ones_like(z), math.nan)
    with pytest.raises(ValueError):
        Potential(lambda z: np.where(np.abs(z) > 5, np.inf, 0), 1.0)
    assert Potential.constant(2).is_real


def test_grid_function_csv_round_trip():
    text = F.to_csv()
    assert text.splitlines()[0] == "i,j,re,im" and len(text.splitlines()) == 1 + M * M
    back = GridFunction2D.from_csv(text, F.header())
    assert np.array_equal(back.values, F.values)


def test_grid_function_validation():
    with pytest.raises(ValueError):
        GridFunction2D(6.0, 4, np.zeros((4, 4)))
    with pytest.raises(ValueError):
        GridFunction2D(6.0, 8, np.full((8, 8), np.nan))


def test_interpolator_reproduces_nodes_and_vanishes_outside():
    interp = F.interpolator()
    assert np.allclose(interp(F.nodes), F.values, atol=1e-12)
    assert interp(np.array([7 + 0j, 0 - 6.5j])).tolist() == [0, 0]
