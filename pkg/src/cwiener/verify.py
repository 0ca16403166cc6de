"""Acceptance suite: each criterion is a function returning a
:class:`CriterionResult` whose checks carry both sides of every comparison.

Every criterion draws from its own child stream of the run seed, so
criteria can be run alone or in any order with identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .crv import GaussianSpec, ScalarField, cf_analytic, sample_gaussian
from .feynkac import (GridFunction2D, Potential, fk_mc_estimate, gaussian_bump, spectral_expm_oracle,
                      trotter_apply)
from .fgf import (TestFunctionRep, poly_bump, product_bump, ls_inner, regularity_profile,
                  regularity_threshold, sample_pairings)
from .klfield import (kl_sample, null_set_diagnostic, standard_coefficients, trace_identity_check,
                      truncation_gap_samples, truncation_tail)
from .realstruct import decompose, rotation_pair
from .rng import Stream, map_chunks
from .spectral import Interval, Rectangle, SpectralOperator, dirichlet_basis, weyl_ratio
from .stats import K_SIGMA, MomentEstimate, cf_factorization_gap, cross_cov, mc_mean
from .wiener import (PathSample, fdd_log_density, fernique_from_sup, kl_bm_sample, sample_bm,
                     sup_sq_samples)

DEFAULT_SEED = 42
CF_PROBES = (1, -1, 1j, -1j, 1 + 1j, 2, -2j, 0.5 - 0.5j)
PROBE_PAIRS = ((1, 1), (1, -1), (1j, 1), (1 + 1j, -1j), (2, 0.5), (-2j, 1j), (0.5 - 0.5j, 1 + 1j), (1, 2j))
BM_MARKS = (0.25, 0.5, 1.0)


def _num(x):
    """JSON-friendly number: floats stay floats, complex becomes ``[re, im]``."""
    if isinstance(x, (complex, np.complexfloating)):
        return [float(x.real), float(x.imag)]
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if x is None:
        return None
    return float(x)


@dataclass
class Check:
    name: str
    value: complex | float
    target: complex | float
    tolerance: float
    std_error: float | None = None
    passed: bool = False

    def to_dict(self) -> dict:
        return {"name": self.name, "value": _num(self.value), "target": _num(self.target),
                "tolerance": _num(self.tolerance), "std_error": _num(self.std_error),
                "passed": bool(self.passed)}


@dataclass
class CriterionResult:
    id: int
    title: str
    checks: list[Check] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.checks) and all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"id": self.id, "title": self.title, "passed": self.passed,
                "checks": [c.to_dict() for c in self.checks]}

    def summary_line(self) -> str:
        failed = [c.name for c in self.checks if not c.passed]
        tail = "" if not failed else f"  (failed: {', '.join(failed)})"
        return f"[{'PASS' if self.passed else 'FAIL'}] criterion {self.id}: {self.title}{tail}"


def gate_estimate(name: str, est: MomentEstimate, target, k: float, rel: float = 0.0) -> Check:
    """``|est - target| <= max(k sigma, rel |target|)``."""
    tol = max(k * est.std_error, rel * abs(target))
    return Check(name, est.value, target, tol, est.std_error, abs(est.value - target) <= tol)


def gate_abs(name: str, value, target, tol: float) -> Check:
    return Check(name, value, target, tol, None, abs(value - target) <= tol)


def _stream(seed: int, cid: int) -> Stream:
    return Stream.from_seed(seed, f"criterion-{cid}")


def _n(samples, default: int) -> int:
    return default if samples is None else int(samples)


def _real_mean(values) -> MomentEstimate:
    est = mc_mean(values)
    return MomentEstimate(est.value.real, est.std_error, est.n_samples)


# -- criteria ---------------------------------------------------------------

def criterion_1(seed=DEFAULT_SEED, k=K_SIGMA, samples=None) -> CriterionResult:
    n = _n(samples, 1_000_000)
    st = _stream(seed, 1)
    res = CriterionResult(1, "scalar Gaussian exponential moments")
    xi = sample_gaussian(GaussianSpec.standard(), st.child("complex"), n)
    res.checks.append(gate_estimate("E exp(-|xi|^2) complex", _real_mean(np.exp(-np.abs(xi) ** 2)), 0.5, k))
    x = sample_gaussian(GaussianSpec.real(), st.child("real"), n).real
    res.checks.append(gate_estimate("E exp(-X^2) real", _real_mean(np.exp(-x ** 2)), 1 / math.sqrt(3), k))
    return res


def criterion_2(seed=DEFAULT_SEED, k=K_SIGMA, samples=None) -> CriterionResult:
    n = _n(samples, 1_000_000)
    spec = GaussianSpec.standard()
    z = sample_gaussian(spec, _stream(seed, 2), n)
    res = CriterionResult(2, "characteristic function of the standard complex Gaussian")
    for w in CF_PROBES:
        w = complex(w)
        est = mc_mean(np.exp(1j * np.real(w * np.conj(z))))
        res.checks.append(gate_estimate(f"cf at w={w}", est, complex(cf_analytic(spec, w)), k))
    return res


def criterion_3(seed=DEFAULT_SEED, k=K_SIGMA, samples=None) -> CriterionResult:
    n = _n(samples, 100_000)
    modes = 4
    basis = dirichlet_basis(Interval(1.0), modes)
    op = SpectralOperator(basis, np.ones(modes))
    z = kl_sample(op, modes, ScalarField.COMPLEX, _stream(seed, 3), n_samples=n)
    x, y = decompose(z)
    res = CriterionResult(3, "proper draws split into independent real parts of unit variance")
    for m in range(modes):
        a, b = x.coeffs[:, m].real, y.coeffs[:, m].real
        gap = cf_factorization_gap(a, b, PROBE_PAIRS)
        res.checks.append(Check(f"mode {m + 1} factorization gap", gap.gap, 0.0, k * gap.std_error,
                                gap.std_error, gap.passes(k)))
        for label, part in (("X", a), ("Y", b)):
            res.checks.append(gate_estimate(f"mode {m + 1} Var {label}", _real_mean(part ** 2), 1.0, k))
    return res


def criterion_4(seed=DEFAULT_SEED, k=K_SIGMA, samples=None, workers=1) -> CriterionResult:
    n = _n(samples, 100_000)
    modes = 100
    basis = dirichlet_basis(Interval(1.0), modes)
    op = SpectralOperator(basis, 1.0 / np.arange(1, modes + 1) ** 2)
    st = _stream(seed, 4)
    norms = np.concatenate(map_chunks(
        lambda first, count: kl_sample(op, modes, ScalarField.COMPLEX, st, count, first).norm_sq(),
        n, 10_000, workers))
    chk = trace_identity_check(op, norms)
    res = CriterionResult(4, "KL trace identity")
    res.checks.append(gate_estimate("E||S||^2 vs trace", chk.empirical, chk.trace, k))
    return res


def criterion_5(seed=DEFAULT_SEED, k=K_SIGMA, samples=None) -> CriterionResult:
    n = _n(samples, 100_000)
    modes = 100
    basis = dirichlet_basis(Interval(1.0), modes)
    op = SpectralOperator(basis, 1.0 / np.arange(1, modes + 1) ** 2)
    st = _stream(seed, 5)
    s5 = kl_sample(op, 5, ScalarField.COMPLEX, st, n)
    s10 = kl_sample(op, 10, ScalarField.COMPLEX, st, n)
    res = CriterionResult(5, "KL truncation tail for coupled partial sums")
    res.checks.append(gate_estimate("E||S10 - S5||^2", _real_mean(truncation_gap_samples(s5, s10)),
                                    truncation_tail(op, 5, 10), k))
    return res


def criterion_6(seed=DEFAULT_SEED, k=K_SIGMA, samples=None) -> CriterionResult:
    n = _n(samples, 2_000)
    zeta = standard_coefficients(_stream(seed, 6), n, 1000, ScalarField.COMPLEX)
    rep = null_set_diagnostic(zeta, ScalarField.COMPLEX, (100, 1000))
    res = CriterionResult(6, "partial sums of |zeta_n|^2 grow linearly")
    res.checks.append(gate_abs("slope over m in [100, 1000]", rep.slope, 1.0, 0.05))
    return res


def criterion_7(seed=DEFAULT_SEED, k=K_SIGMA, samples=None, workers=1) -> CriterionResult:
    n = _n(samples, 100_000)
    st = _stream(seed, 7)
    res = CriterionResult(7, "rotation invariance and Fernique moment stability")
    times = np.array([0.0, 0.5, 1.0])
    x = sample_bm(times, st.child("x"), n_samples=n)
    x2 = sample_bm(times, st.child("x2"), n_samples=n)
    y, y2 = rotation_pair(x, x2)
    a, a2 = x.values[:, -1], x2.values[:, -1]
    b, b2 = y.values[:, -1], y2.values[:, -1]
    for w1, w2 in PROBE_PAIRS:
        w1, w2 = complex(w1), complex(w2)

        def joint(u, v):
            return np.exp(1j * (np.real(w1 * np.conj(u)) + np.real(w2 * np.conj(v))))
        est = mc_mean(joint(b, b2) - joint(a, a2))
        res.checks.append(gate_estimate(f"joint cf difference at ({w1}, {w2})", est, 0j, k))
    grid = np.linspace(0.0, 1.0, 513)
    sups = sup_sq_samples(grid, n, st.child("fernique"), 5000, (1, 2), workers)
    fine = fernique_from_sup(sups[1], 0.1)
    coarse = fernique_from_sup(sups[2], 0.1)
    rel = abs(fine.value - coarse.value) / abs(fine.value)
    res.checks.append(Check("Fernique alpha=0.1 relative change 256 -> 512 steps", rel, 0.0, 0.02,
                            None, rel <= 0.02))
    return res


def criterion_8(seed=DEFAULT_SEED, k=K_SIGMA, samples=None) -> CriterionResult:
    n = _n(samples, 100_000)
    st = _stream(seed, 8)
    res = CriterionResult(8, "complex Brownian motion covariance structure")
    times = np.array((0.0,) + BM_MARKS)
    paths = sample_bm(times, st.child("increments"), n_samples=n)
    kl = kl_bm_sample(200, times, st.child("kl"), horizon=1.0, n_samples=n)
    for label, p in (("increment", paths), ("KL K=200", kl)):
        for i, s in enumerate(BM_MARKS):
            for t in BM_MARKS[i:]:
                cov, pcov = cross_cov(p.at(s), p.at(t))
                res.checks.append(gate_estimate(f"{label} cov(W_{s}, W_{t})", cov, min(s, t), k, 0.01))
                if label == "increment":
                    res.checks.append(gate_estimate(f"{label} pcov(W_{s}, W_{t})", pcov, 0j, k))
    inc = paths.increments()
    for i in range(inc.shape[1]):
        for j in range(i + 1, inc.shape[1]):
            gap = cf_factorization_gap(inc[:, i], inc[:, j], PROBE_PAIRS)
            res.checks.append(Check(f"increments {i + 1},{j + 1} factorization gap", gap.gap, 0.0,
                                    k * gap.std_error, gap.std_error, gap.passes(k)))
    return res


def _midpoint_grid(half: float, points: int):
    h = 2 * half / points
    ax = -half + h * (np.arange(points) + 0.5)
    return (ax[:, None] + 1j * ax[None, :]).ravel(), h * h


def criterion_9(seed=DEFAULT_SEED, k=K_SIGMA, samples=None) -> CriterionResult:
    res = CriterionResult(9, "Chapman-Kolmogorov and normalization of the fdd density")
    y, area = _midpoint_grid(8.0, 800)
    one = PathSample(np.array([0.0, 1.0]), np.stack([np.zeros_like(y), y], axis=1))
    total = math.fsum(np.exp(fdd_log_density(one)) * area)
    res.checks.append(gate_abs("one-step density integral", total, 1.0, 1e-6))
    for x in (0j, 0.7 - 0.4j, 1.5 + 1.0j):
        two = PathSample(np.array([0.0, 0.5, 1.0]),
                         np.stack([np.zeros_like(y), y, np.full_like(y, x)], axis=1))
        mixed = math.fsum(np.exp(fdd_log_density(two)) * area)
        direct = float(np.exp(fdd_log_density(PathSample(np.array([0.0, 1.0]), np.array([0j, x])))))
        res.checks.append(gate_abs(f"two-step vs one-step density at x={x}", mixed, direct, 1e-6))
    return res


def fk_default_case(points: int = 32, half_extent: float = 6.0):
    f = GridFunction2D.from_function(gaussian_bump(0.5, 1.5), half_extent, points)
    g = GridFunction2D.from_function(gaussian_bump(-0.3 + 0.2j, 1.5), half_extent, points)
    return f, g, Potential.gaussian(1.0)


def criterion_10(seed=DEFAULT_SEED, k=K_SIGMA, samples=None, sign=-1.0) -> CriterionResult:
    paths = _n(samples, 200)
    T = 0.5
    f, g, V = fk_default_case()
    res = CriterionResult(10, "Feynman-Kac: Trotter and path Monte Carlo against the dense oracle")
    oracle = spectral_expm_oracle(f, V, T, sign)
    trot = trotter_apply(f, V, T, 64, sign)
    w = f.weights
    rel = math.sqrt(float(np.sum(w * np.abs(trot.values - oracle.values) ** 2))
                    / float(np.sum(w * np.abs(oracle.values) ** 2)))
    res.checks.append(Check("Trotter n=64 relative L2 error", rel, 0.0, 0.01, None, rel <= 0.01))
    target = oracle.inner(g)
    mc = fk_mc_estimate(f, g, V, T, paths, _stream(seed, 10), 32, sign)
    res.checks.append(gate_estimate("path MC (e^{-TH} f, g)", mc, target, k, 0.05))
    return res


def criterion_11(seed=DEFAULT_SEED, k=K_SIGMA, samples=None) -> CriterionResult:
    res = CriterionResult(11, "Weyl ratios")
    basis = dirichlet_basis(Interval(1.0), 1000)
    ratios = np.array([weyl_ratio(basis, n) for n in range(1, 1001)])
    worst = float(np.max(np.abs(ratios * math.pi ** 2 - 1)))
    res.checks.append(Check("interval n^2/lambda_n = 1/pi^2 (max rel dev, n <= 1000)", worst, 0.0,
                            4 * np.finfo(float).eps, None, worst <= 4 * np.finfo(float).eps))
    sq = dirichlet_basis(Rectangle(1.0, 1.0), 5000)
    r = weyl_ratio(sq, 5000)
    target = 1 / (16 * math.pi ** 2)
    res.checks.append(gate_abs("unit square ratio at n=5000", r, target, 0.1 * target))
    return res


def _fgf_checks(res, label, basis, phi, s, n, stream, k, rel, workers):
    p = sample_pairings(s, basis, [phi], n, stream, workers=workers)[:, 0]
    norm_sq = ls_inner(phi, phi, s).real
    res.checks.append(gate_estimate(f"{label} Var<Z,phi>", _real_mean(np.abs(p) ** 2), norm_sq, k, rel))
    res.checks.append(gate_estimate(f"{label} PVar<Z,phi>", mc_mean(p ** 2), 0j, k))
    cf = mc_mean(np.exp(1j * np.real(np.conj(p))))
    res.checks.append(gate_estimate(f"{label} characteristic functional at w=1", cf,
                                    complex(math.exp(-0.25 * norm_sq)), k))


def criterion_12(seed=DEFAULT_SEED, k=K_SIGMA, samples=None, workers=1) -> CriterionResult:
    n = _n(samples, 100_000)
    st = _stream(seed, 12)
    res = CriterionResult(12, "fractional Gaussian field pairing law")
    line = dirichlet_basis(Interval(1.0), 400)
    _fgf_checks(res, "interval", line, TestFunctionRep(poly_bump(2), line), 0.5, n,
                st.child("interval"), k, 0.01, workers)
    sq = dirichlet_basis(Rectangle(1.0, 1.0), 400)
    _fgf_checks(res, "rectangle", sq, TestFunctionRep(product_bump(2), sq), 0.5, n,
                st.child("rectangle"), k, 0.02, workers)
    return res


def criterion_13(seed=DEFAULT_SEED, k=K_SIGMA, samples=None, n_modes=20_000) -> CriterionResult:
    res = CriterionResult(13, "regularity threshold flips at s + d/4")
    for label, domain, s in (("interval s=0", Interval(1.0), 0.0), ("rectangle s=1/2", Rectangle(1.0, 1.0), 0.5)):
        basis = dirichlet_basis(domain, n_modes)
        thr = regularity_threshold(s, basis.dim)
        below, above = regularity_profile(s, basis, [thr - 0.05, thr + 0.05])
        res.checks.append(Check(f"{label} divergent at t={below.t:.2f}", below.decay_exponent, 1.0, 0.0,
                                None, not below.convergent))
        res.checks.append(Check(f"{label} convergent at t={above.t:.2f}", above.decay_exponent, 1.0, 0.0,
                                None, above.convergent))
    return res


CRITERIA = {i: globals()[f"criterion_{i}"] for i in range(1, 14)}
_PARALLEL = {4, 7, 12}


def run_suite(seed=DEFAULT_SEED, k=K_SIGMA, only=None, samples=None, workers=1, fk_sign=-1.0,
              progress=None) -> list[CriterionResult]:
    """Run the selected criteria (all by default) in id order.

    ``samples`` overrides every criterion's default sample count; it is meant
    for quick smoke runs, the gates are calibrated for the defaults.
    """
    ids = sorted(CRITERIA) if not only else sorted(set(only))
    out = []
    for cid in ids:
        if cid not in CRITERIA:
            raise ValueError(f"unknown criterion {cid}")
        kwargs = {"seed": seed, "k": k, "samples": samples}
        if cid in _PARALLEL:
            kwargs["workers"] = workers
        if cid == 10:
            kwargs["sign"] = fk_sign
        result = CRITERIA[cid](**kwargs)
        out.append(result)
        if progress is not None:
            progress(result)
    return out


def suite_report(results: list[CriterionResult], seed: int, k: float) -> dict:
    return {"seed": int(seed), "k_sigma": float(k),
            "passed": all(r.passed for r in results),
            "criteria": [r.to_dict() for r in results]}
