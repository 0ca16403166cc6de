"""Scalar complex Gaussian random variables.

A law is described by its mean, variance ``E|Z - EZ|^2`` and pseudo-variance
``E(Z - EZ)^2``.  Real Gaussians embed as complex ones with a zero imaginary
part, for which the pseudo-variance equals the variance.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .rng import Stream, as_stream, box_muller
from .stats import InsufficientDataError, MomentEstimate, mc_mean


class ScalarField(str, enum.Enum):
    REAL = "real"
    COMPLEX = "complex"


class InvalidSpecError(ValueError):
    pass


@dataclass(frozen=True)
class GaussianSpec:
    mean: complex = 0j
    variance: float = 1.0
    pseudo_variance: complex = 0j
    scalar_field: ScalarField = ScalarField.COMPLEX

    def __post_init__(self):
        object.__setattr__(self, "mean", complex(self.mean))
        object.__setattr__(self, "variance", float(self.variance))
        object.__setattr__(self, "pseudo_variance", complex(self.pseudo_variance))
        object.__setattr__(self, "scalar_field", ScalarField(self.scalar_field))
        if not self.variance >= 0:
            raise InvalidSpecError(f"variance must be >= 0, got {self.variance}")
        if abs(self.pseudo_variance) > self.variance * (1 + 1e-12):
            raise InvalidSpecError(
                f"|pseudo_variance| = {abs(self.pseudo_variance)} exceeds variance {self.variance}")
        if self.scalar_field is ScalarField.REAL:
            if self.pseudo_variance != self.variance or self.mean.imag != 0:
                raise InvalidSpecError(
                    "a REAL spec needs pseudo_variance == variance and a real mean")

    @classmethod
    def standard(cls) -> "GaussianSpec":
        """Standard proper complex Gaussian: Re, Im i.i.d. N(0, 1/2)."""
        return cls(0j, 1.0, 0j)

    @classmethod
    def real(cls, mean: float = 0.0, variance: float = 1.0) -> "GaussianSpec":
        return cls(complex(mean), variance, complex(variance), ScalarField.REAL)

    @property
    def is_proper(self) -> bool:
        return self.mean == 0 and self.pseudo_variance == 0

    def covariance_factor(self) -> np.ndarray:
        """Lower-triangular ``L`` with ``L @ L.T`` the covariance of (Re Z, Im Z)."""
        v, p = self.variance, self.pseudo_variance
        a = max((v + p.real) / 2, 0.0)
        b = p.imag / 2
        c = max((v - p.real) / 2, 0.0)
        if a == 0.0:
            return np.array([[0.0, 0.0], [0.0, math.sqrt(c)]])
        l11 = math.sqrt(a)
        l21 = b / l11
        # singular when v == |p|: second column vanishes
        l22 = math.sqrt(max(c - l21 * l21, 0.0))
        return np.array([[l11, 0.0], [l21, l22]])


def sample_gaussian(spec: GaussianSpec, rng: Stream | int, size: int | None = None,
                    first_sample: int = 0):
    """Draw from ``spec``; each draw is one substream sample using 2 uniforms.

    Returns a complex scalar when ``size`` is None, else an array of length
    ``size`` (draws ``first_sample .. first_sample + size - 1``).
    """
    stream = as_stream(rng, "crv")
    n = 1 if size is None else int(size)
    u = stream.uniforms(n, 2, first_sample)
    x, y = box_muller(u[:, 0], u[:, 1])
    chol = spec.covariance_factor()
    re = chol[0, 0] * x + spec.mean.real
    im = chol[1, 0] * x + chol[1, 1] * y + spec.mean.imag
    z = re + 1j * im
    return complex(z[0]) if size is None else z


def cf_analytic(spec: GaussianSpec, w):
    """``exp(i Re(w conj(mean)) - (|w|^2 var + Re(w^2 conj(pvar))) / 4)``.

    The dot product is ``w . z = w conj(z)``, so the pseudo-variance term
    enters as ``w^2 conj(PVar)``; for the specs used here PVar is real or
    zero and the conjugation is immaterial.
    """
    w = np.asarray(w, dtype=np.complex128)
    phase = np.real(w * np.conj(spec.mean))
    quad = np.abs(w) ** 2 * spec.variance + np.real(w * w * np.conj(spec.pseudo_variance))
    out = np.exp(1j * phase - quad / 4)
    return complex(out) if out.ndim == 0 else out


class MomentSummary(NamedTuple):
    mean: MomentEstimate
    variance: MomentEstimate
    pseudo_variance: MomentEstimate


def estimate_moments(samples) -> MomentSummary:
    """Mean, variance and pseudo-variance with standard errors.

    Variance and pseudo-variance are taken about the sample mean with the
    unbiased ``n / (n - 1)`` factor; their errors come from the spread of
    ``|z - m|^2`` and ``(z - m)^2`` (fourth-moment based).
    """
    z = np.asarray(samples, dtype=np.complex128).ravel()
    n = z.size
    if n < 2:
        raise InsufficientDataError("estimate_moments needs at least 2 samples")
    mean = mc_mean(z)
    dev = z - mean.value
    factor = n / (n - 1)
    var = mc_mean(np.abs(dev) ** 2).scaled(factor)
    var = MomentEstimate(var.value.real, var.std_error, n)
    pvar = mc_mean(dev * dev).scaled(factor)
    return MomentSummary(mean, var, pvar)
