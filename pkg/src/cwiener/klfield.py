"""Karhunen-Loeve sampling of Gaussian fields from a diagonal trace-class
operator, with the covariance, trace and truncation-tail oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .crv import ScalarField
from .io import csv_text
from .rng import Stream, as_stream
from .spectral import SpectralBasis, SpectralOperator, op_trace
from .stats import MomentEstimate, mc_mean, ols_slope


@dataclass(frozen=True, eq=False)
class FieldSample:
    """Truncated coefficients of one or more field realizations.

    ``coeffs`` has shape ``(..., m)``: the last axis indexes basis modes, any
    leading axes index independent samples.
    """

    basis: SpectralBasis
    coeffs: np.ndarray
    scalar_field: ScalarField = ScalarField.COMPLEX

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if coeffs.ndim == 0:
            raise ValueError("coeffs need at least one mode axis")
        if coeffs.shape[-1] > self.basis.size:
            raise ValueError(f"{coeffs.shape[-1]} coefficients exceed basis size {self.basis.size}")
        field = ScalarField(self.scalar_field)
        if field is ScalarField.REAL and np.any(coeffs.imag != 0):
            raise ValueError("REAL field with non-zero imaginary coefficients")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "scalar_field", field)

    @property
    def truncation(self) -> int:
        return self.coeffs.shape[-1]

    @property
    def n_samples(self) -> int:
        return int(np.prod(self.coeffs.shape[:-1], dtype=int))

    def __getitem__(self, idx) -> "FieldSample":
        return FieldSample(self.basis, np.atleast_1d(self.coeffs[idx]), self.scalar_field)

    def norm_sq(self) -> np.ndarray:
        """Squared l2 norm of the coefficients, per sample."""
        return np.sum(np.abs(self.coeffs) ** 2, axis=-1)

    def evaluate(self, points) -> np.ndarray:
        """Realization values ``sum_n coeffs_n w_n(point)``, shape ``(..., n_points)``."""
        w = self.basis.evaluate(points, np.arange(self.truncation))
        return self.coeffs @ w.T

    def to_csv(self) -> str:
        """Rows ``(sample_id, n, re, im)`` with 1-based mode index ``n``."""
        c = self.coeffs.reshape(-1, self.truncation)
        rows = ((i, n + 1, float(c[i, n].real), float(c[i, n].imag))
                for i in range(c.shape[0]) for n in range(c.shape[1]))
        return csv_text(("sample_id", "n", "re", "im"), rows)


def standard_coefficients(stream: Stream, n_samples: int, m: int, scalar_field: ScalarField,
                          first_sample: int = 0) -> np.ndarray:
    """i.i.d. standard coefficients at fixed per-mode stream offsets.

    REAL modes use uniforms ``2n, 2n+1`` and COMPLEX modes ``4n .. 4n+3`` of
    each sample's substream, so truncations of one seed are nested.
    """
    if ScalarField(scalar_field) is ScalarField.REAL:
        return stream.normals(n_samples, m, first_sample).astype(np.complex128)
    return stream.complex_normals(n_samples, m, first_sample)


def kl_sample(op: SpectralOperator, m: int, scalar_field=ScalarField.COMPLEX, rng=0,
              n_samples: int | None = None, first_sample: int = 0) -> FieldSample:
    """Partial KL sum ``S_m = sum_{n<=m} sqrt(alpha_n) xi_n x_n``.

    With ``n_samples=None`` one realization is returned (coeffs shape
    ``(m,)``); otherwise ``coeffs`` has shape ``(n_samples, m)``.
    """
    if not 1 <= m <= op.size:
        raise ValueError(f"truncation {m} outside 1..{op.size}")
    stream = as_stream(rng, "klfield")
    n = 1 if n_samples is None else int(n_samples)
    xi = standard_coefficients(stream, n, m, scalar_field, first_sample)
    coeffs = np.sqrt(op.alphas[:m]) * xi
    if n_samples is None:
        coeffs = coeffs[0]
    return FieldSample(op.basis, coeffs, ScalarField(scalar_field))


def covariance_oracle(op: SpectralOperator, f, g) -> complex:
    """``(A f, g) = sum_n alpha_n f_n conj(g_n)`` for dual-basis coefficient
    sequences ``f`` and ``g``."""
    f = np.asarray(f, dtype=np.complex128)
    g = np.asarray(g, dtype=np.complex128)
    if f.shape != g.shape or f.shape[-1] > op.size:
        raise ValueError("functionals must have equal length, at most the operator size")
    terms = op.alphas[: f.shape[-1]] * f * np.conj(g)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def apply_functional(field: FieldSample, f) -> np.ndarray:
    """``f(S) = sum_n f_n S_n`` per sample (bilinear pairing in the basis)."""
    f = np.asarray(f, dtype=np.complex128)
    m = min(field.truncation, f.shape[-1])
    return field.coeffs[..., :m] @ f[:m]


@dataclass(frozen=True)
class TraceCheck:
    trace: float
    empirical: MomentEstimate
    gap_sigma: float

    def passes(self, k: float = 4.0) -> bool:
        return self.gap_sigma <= k


def trace_identity_check(op: SpectralOperator, samples) -> TraceCheck:
    """Compare ``trace A`` with the empirical ``E ||S||^2``.

    ``samples`` is a full-truncation :class:`FieldSample`, or an array of
    already computed squared norms.
    """
    if isinstance(samples, FieldSample):
        trace = math.fsum(op.alphas[: samples.truncation])
        norms = samples.norm_sq().ravel()
    else:
        trace = op_trace(op)
        norms = np.asarray(samples, dtype=float).ravel()
    est = mc_mean(norms)
    est = MomentEstimate(est.value.real, est.std_error, est.n_samples)
    return TraceCheck(trace, est, est.sigmas_from(trace))


def truncation_tail(op: SpectralOperator, k: int, m: int) -> float:
    """``sum_{n=k+1}^{m} alpha_n``, i.e. ``E ||S_m - S_k||^2``."""
    if not 0 <= k < m <= op.size:
        raise ValueError(f"need 0 <= k < m <= {op.size}, got k={k}, m={m}")
    return math.fsum(op.alphas[k:m])


def truncation_gap_samples(field_k: FieldSample, field_m: FieldSample) -> np.ndarray:
    """``||S_m - S_k||^2`` per sample for coupled truncations ``k < m``."""
    k = field_k.truncation
    diff = field_m.coeffs.copy()
    diff[..., :k] -= field_k.coeffs
    return np.sum(np.abs(diff) ** 2, axis=-1)


@dataclass(frozen=True)
class NullSetReport:
    slope: float
    exp_moment: MomentEstimate
    exp_target: float
    m_range: tuple[int, int]

    def passes(self, k: float = 4.0, slope_tol: float = 0.05) -> bool:
        return abs(self.slope - 1.0) <= slope_tol and self.exp_moment.within(self.exp_target, k)


def null_set_diagnostic(zeta, scalar_field=ScalarField.COMPLEX, m_range=(100, 1000)) -> NullSetReport:
    """Divergence of ``sum_{n<=m} |zeta_n|^2`` for standard coefficients.

    ``zeta`` is an array ``(n_samples, m_max)`` (or a FieldSample) of i.i.d.
    standard coefficients.  The slope of the sample-averaged partial sums
    against ``m`` over ``m_range`` estimates ``E|zeta_n|^2 = 1``.  The
    exponential moment ``E exp(-|zeta|^2)`` is pooled over every coefficient
    and compared with ``1/2`` (complex) or ``1/sqrt(3)`` (real).
    """
    if isinstance(zeta, FieldSample):
        zeta = zeta.coeffs
    zeta = np.atleast_2d(np.asarray(zeta, dtype=np.complex128))
    lo, hi = m_range
    if hi > zeta.shape[1]:
        raise ValueError(f"m_range upper end {hi} exceeds {zeta.shape[1]} modes")
    sq = np.abs(zeta) ** 2
    partial = np.cumsum(sq.mean(axis=0))
    ms = np.arange(lo, hi + 1)
    slope, _ = ols_slope(ms, partial[ms - 1])
    target = 0.5 if ScalarField(scalar_field) is ScalarField.COMPLEX else 1 / math.sqrt(3)
    est = mc_mean(np.exp(-sq).ravel())
    est = MomentEstimate(est.value.real, est.std_error, est.n_samples)
    return NullSetReport(slope, est, target, (lo, hi))
