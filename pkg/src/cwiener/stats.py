"""Monte-Carlo estimators with error bars.

Sums go through :func:`math.fsum` (exactly rounded), after shifting by the
first value; this keeps ``10**6``-term sums of exponentials accurate and makes
every reduction independent of summation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

K_SIGMA = 4.0


class InsufficientDataError(ValueError):
    pass


@dataclass(frozen=True)
class MomentEstimate:
    value: complex
    std_error: float
    n_samples: int

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be >= 1")
        if not self.std_error >= 0:
            raise ValueError("std_error must be >= 0")

    def within(self, target: complex, k: float = K_SIGMA, rel: float = 0.0) -> bool:
        """True if ``|value - target| <= max(k * std_error, rel * |target|)``."""
        return abs(self.value - target) <= max(k * self.std_error, rel * abs(target))

    def sigmas_from(self, target: complex) -> float:
        gap = abs(self.value - target)
        if self.std_error == 0:
            return 0.0 if gap == 0 else math.inf
        return gap / self.std_error

    def scaled(self, factor: float) -> "MomentEstimate":
        return MomentEstimate(self.value * factor, self.std_error * abs(factor), self.n_samples)

    def to_dict(self) -> dict:
        v = complex(self.value)
        return {"re": v.real, "im": v.imag, "std_error": self.std_error, "n": self.n_samples}


def _as_complex_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=np.complex128).ravel()
    return arr


def fsum_complex(values: np.ndarray) -> complex:
    return complex(math.fsum(values.real), math.fsum(values.imag))


def _shifted_mean(arr: np.ndarray) -> complex:
    # shift by the first element: constant data gives its value back exactly
    base = arr[0]
    return complex(base + fsum_complex(arr - base) / arr.size)


def mc_mean(values: Sequence[complex]) -> MomentEstimate:
    """Sample mean with standard error ``sqrt(s_re**2 + s_im**2) / sqrt(n)``.

    ``s_re`` and ``s_im`` are the ``n - 1`` normalised sample standard
    deviations of the real and imaginary parts.  A single value carries an
    infinite error bar.
    """
    arr = _as_complex_array(values)
    n = arr.size
    if n == 0:
        raise InsufficientDataError("mc_mean needs at least one value")
    mean = _shifted_mean(arr)
    if n == 1:
        return MomentEstimate(mean, math.inf, 1)
    dev = arr - mean
    ss = math.fsum(dev.real * dev.real) + math.fsum(dev.imag * dev.imag)
    return MomentEstimate(mean, math.sqrt(ss / (n - 1) / n), n)


def empirical_cf(samples: Sequence[complex], w: complex) -> MomentEstimate:
    """Empirical characteristic function ``mean(exp(i Re(w conj z)))``."""
    arr = _as_complex_array(samples)
    if arr.size == 0:
        raise InsufficientDataError("empirical_cf needs samples")
    return mc_mean(np.exp(1j * np.real(w * np.conj(arr))))


def cross_cov(a: Sequence[complex], b: Sequence[complex]) -> tuple[MomentEstimate, MomentEstimate]:
    """Sample covariance ``E[(a - Ea) conj(b - Eb)]`` and pseudo-covariance
    ``E[(a - Ea)(b - Eb)]``, both with the unbiased ``n / (n - 1)`` factor."""
    a = _as_complex_array(a)
    b = _as_complex_array(b)
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} != {b.size}")
    n = a.size
    if n < 2:
        raise InsufficientDataError("cross_cov needs at least 2 samples")
    da = a - _shifted_mean(a)
    db = b - _shifted_mean(b)
    factor = n / (n - 1)
    cov = mc_mean(da * np.conj(db)).scaled(factor)
    pcov = mc_mean(da * db).scaled(factor)
    return cov, pcov


@dataclass(frozen=True)
class FactorizationGap:
    """``gap`` is the largest gap over the probes and ``std_error`` its error
    bar; ``max_ratio`` is the largest gap-to-error ratio over all probes."""

    gap: float
    std_error: float
    max_ratio: float
    probe: tuple[complex, complex]

    def passes(self, k: float = K_SIGMA) -> bool:
        return self.max_ratio <= k


def cf_factorization_gap(a, b, probes) -> FactorizationGap:
    """Gap between the joint empirical CF of ``(a, b)`` and the product of the
    marginal empirical CFs, maximised over ``probes`` (pairs ``(w1, w2)``).

    At one probe the gap is ``|mean(A B) - mean(A) mean(B)|`` with
    ``A = exp(i Re(w1 conj a))`` and ``B = exp(i Re(w2 conj b))``.  It is
    evaluated as the (1/n) sample covariance of ``A`` and ``B``, which is the
    same number algebraically and gives exactly zero for a constant ``b``.
    """
    a = _as_complex_array(a)
    b = _as_complex_array(b)
    if a.size != b.size:
        raise ValueError(f"length mismatch: {a.size} != {b.size}")
    if a.size < 2:
        raise InsufficientDataError("cf_factorization_gap needs at least 2 samples")
    probes = [(complex(w1), complex(w2)) for w1, w2 in probes]
    if not probes:
        raise ValueError("no probes given")
    gaps = []
    for w1, w2 in probes:
        ea = np.exp(1j * np.real(w1 * np.conj(a)))
        eb = np.exp(1j * np.real(w2 * np.conj(b)))
        est = mc_mean((ea - _shifted_mean(ea)) * (eb - _shifted_mean(eb)))
        gaps.append((abs(est.value), est.std_error))
    i = max(range(len(gaps)), key=lambda j: gaps[j][0])
    ratios = [g / e if e > 0 else (0.0 if g == 0 else math.inf) for g, e in gaps]
    return FactorizationGap(gaps[i][0], gaps[i][1], max(ratios), probes[i])


def ols_slope(x, y) -> tuple[float, float]:
    """Least-squares slope and intercept of ``y`` against ``x``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xc = x - x.mean()
    slope = float(np.dot(xc, y - y.mean()) / np.dot(xc, xc))
    return slope, float(y.mean() - slope * x.mean())
