"""Coefficientwise conjugation as a real structure, the sqrt(2) split of a
complex field into two real ones, and the rotation pair ``(X +- X') / sqrt 2``.

All operations act on :class:`~cwiener.klfield.FieldSample`; ``conjugate``,
``pt_norm`` and ``rotation_pair`` also accept :class:`~cwiener.wiener.PathSample`.
"""

from __future__ import annotations

import math

import numpy as np

from .crv import ScalarField
from .klfield import FieldSample
from .wiener import PathSample

SQRT2 = math.sqrt(2.0)


def _check_conformal(a: FieldSample, b: FieldSample):
    if a.basis is not b.basis and a.basis.domain != b.basis.domain:
        raise ValueError("fields live on different bases")
    if a.coeffs.shape != b.coeffs.shape:
        raise ValueError(f"shape mismatch: {a.coeffs.shape} != {b.coeffs.shape}")


def conjugate(z):
    """Real structure: conjugate every coefficient (eigenfunctions are real)."""
    if isinstance(z, PathSample):
        return PathSample(z.times, np.conj(z.values), z.start.conjugate())
    return FieldSample(z.basis, np.conj(z.coeffs), z.scalar_field)


def real_part(z: FieldSample) -> FieldSample:
    """``(z + sigma z) / 2``."""
    return FieldSample(z.basis, z.coeffs.real.astype(np.complex128), ScalarField.REAL)


def imag_part(z: FieldSample) -> FieldSample:
    """``(z - sigma z) / (2i)``."""
    return FieldSample(z.basis, z.coeffs.imag.astype(np.complex128), ScalarField.REAL)


def decompose(z: FieldSample) -> tuple[FieldSample, FieldSample]:
    """``X = sqrt(2) Re z``, ``Y = sqrt(2) Im z``, both REAL."""
    if z.scalar_field is not ScalarField.COMPLEX:
        raise ValueError("decompose expects a COMPLEX field")
    x = FieldSample(z.basis, (SQRT2 * z.coeffs.real).astype(np.complex128), ScalarField.REAL)
    y = FieldSample(z.basis, (SQRT2 * z.coeffs.imag).astype(np.complex128), ScalarField.REAL)
    return x, y


def compose(x: FieldSample, y: FieldSample) -> FieldSample:
    """``(X + iY) / sqrt(2)`` from two REAL fields on the same basis."""
    if x.scalar_field is not ScalarField.REAL or y.scalar_field is not ScalarField.REAL:
        raise ValueError("compose expects two REAL fields")
    _check_conformal(x, y)
    re = x.coeffs.real / SQRT2
    im = y.coeffs.real / SQRT2
    return FieldSample(x.basis, re + 1j * im, ScalarField.COMPLEX)


def pt_norm(z) -> np.ndarray | float:
    """``sqrt(||Re z||^2 + ||Im z||^2)`` in the coefficient l2 norm, per sample."""
    c = z.values if isinstance(z, PathSample) else z.coeffs
    out = np.sqrt(np.sum(c.real ** 2, axis=-1) + np.sum(c.imag ** 2, axis=-1))
    return float(out) if np.ndim(out) == 0 else out


def rotation_pair(x, x2):
    """``((X + X') / sqrt 2, (X - X') / sqrt 2)``."""
    if isinstance(x, PathSample):
        if not isinstance(x2, PathSample) or x.values.shape != x2.values.shape \
                or not np.array_equal(x.times, x2.times):
            raise ValueError("paths must share the time grid and shape")
        y = (x.values + x2.values) / SQRT2
        y2 = (x.values - x2.values) / SQRT2
        return (PathSample(x.times, y, complex(y.flat[0]) if y.size else 0j),
                PathSample(x.times, y2, complex(y2.flat[0]) if y2.size else 0j))
    _check_conformal(x, x2)
    if x.scalar_field is not x2.scalar_field:
        raise ValueError("fields must share the scalar field")
    return (FieldSample(x.basis, (x.coeffs + x2.coeffs) / SQRT2, x.scalar_field),
            FieldSample(x.basis, (x.coeffs - x2.coeffs) / SQRT2, x.scalar_field))
