"""Complex fractional Gaussian fields of order ``s`` on intervals and
rectangles, in the Dirichlet eigenbasis.

The field has coefficients ``lambda_n^s xi_n`` with ``xi_n`` standard proper
complex, so that ``<Z, phi> ~ CN(0, ||phi||_{L_s}^2, 0)`` with
``||phi||_{L_s} = ||(-Laplace)^s phi||_{L2}``.  Note this is the covariance
``((-Laplace)^{2s} phi, phi)``; the common convention ``(phi, (-Laplace)^{-s} phi)``
is a different object.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .crv import ScalarField
from .klfield import FieldSample, standard_coefficients
from .rng import as_stream
from .spectral import DEFAULT_PANELS, Interval, Rectangle, SpectralBasis, simpson_weights
from .stats import ols_slope

DEFAULT_MODES = 400


class TestFunctionRep:
    """A test function with cached L2 projections onto the first ``n_modes``
    eigenfunctions (composite Simpson, ``panels`` per axis).

    ``evaluator`` takes a 1-D array of points on an interval, or two
    broadcastable arrays ``(x, y)`` on a rectangle.
    """

    __test__ = False  # not a pytest class

    def __init__(self, evaluator: Callable, basis: SpectralBasis, n_modes: int | None = None,
                 panels: int = DEFAULT_PANELS):
        self.evaluator = evaluator
        self.basis = basis
        self.n_modes = basis.size if n_modes is None else int(n_modes)
        if not 1 <= self.n_modes <= basis.size:
            raise ValueError(f"n_modes must be in 1..{basis.size}")
        self.panels = panels
        self.projections, self.l2_norm_sq = self._project()
        self.projections.setflags(write=False)

    def _project(self) -> tuple[np.ndarray, float]:
        idx = self.basis.indices[: self.n_modes]
        d = self.basis.domain
        if isinstance(d, Interval):
            x, w = simpson_weights(0.0, d.length, self.panels)
            phi = np.asarray(self.evaluator(x), dtype=np.complex128)
            wave = math.sqrt(2 / d.length) * np.sin(np.outer(x, idx[:, 0]) * math.pi / d.length)
            proj = (w * phi) @ wave
            norm = float(np.sum(w * np.abs(phi) ** 2))
            return proj, norm
        x, wx = simpson_weights(0.0, d.lx, self.panels)
        y, wy = simpson_weights(0.0, d.ly, self.panels)
        phi = np.asarray(self.evaluator(x[:, None], y[None, :]), dtype=np.complex128)
        phi = np.broadcast_to(phi, (x.size, y.size))
        jmax, kmax = int(idx[:, 0].max()), int(idx[:, 1].max())
        sx = math.sqrt(2 / d.lx) * np.sin(np.outer(x, np.arange(1, jmax + 1)) * math.pi / d.lx)
        sy = math.sqrt(2 / d.ly) * np.sin(np.outer(y, np.arange(1, kmax + 1)) * math.pi / d.ly)
        weighted = phi * np.outer(wx, wy)
        table = sx.T @ weighted @ sy
        proj = table[idx[:, 0] - 1, idx[:, 1] - 1]
        norm = float(np.sum(np.abs(phi) ** 2 * np.outer(wx, wy)))
        return proj, norm

    def projection_defect(self) -> float:
        """``| sum |proj|^2 - ||phi||^2 |`` (truncated Parseval check)."""
        return abs(float(np.sum(np.abs(self.projections) ** 2)) - self.l2_norm_sq)


def frac_laplacian_apply(coeffs, s: float, basis: SpectralBasis) -> np.ndarray:
    """Scale coefficient ``n`` by ``lambda_n ** s`` (last axis indexes modes)."""
    coeffs = np.asarray(coeffs, dtype=np.complex128)
    m = coeffs.shape[-1]
    if m > basis.size:
        raise ValueError("more coefficients than basis modes")
    return coeffs * basis.eigenvalues[:m] ** s


def ls_inner(phi: TestFunctionRep, psi: TestFunctionRep, s: float, n_modes: int | None = None) -> complex:
    """Truncated ``(phi, psi)_{L_s} = sum lambda_n^{2s} (phi, w_n) conj((psi, w_n))``."""
    if phi.basis is not psi.basis and phi.basis.domain != psi.basis.domain:
        raise ValueError("test functions use different bases")
    n = min(phi.n_modes, psi.n_modes) if n_modes is None else int(n_modes)
    if n > min(phi.n_modes, psi.n_modes):
        raise ValueError("projections are not cached that far")
    terms = phi.basis.eigenvalues[:n] ** (2 * s) * phi.projections[:n] * np.conj(psi.projections[:n])
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def sample_fgf(s: float, basis: SpectralBasis, n_modes: int | None = None, rng=0,
               n_samples: int | None = None, first_sample: int = 0) -> FieldSample:
    """Truncated complex fractional Gaussian field, coefficients ``lambda_n^s xi_n``."""
    n = basis.size if n_modes is None else int(n_modes)
    if not 1 <= n <= basis.size:
        raise ValueError(f"n_modes must be in 1..{basis.size}")
    stream = as_stream(rng, "fgf")
    rows = 1 if n_samples is None else int(n_samples)
    xi = standard_coefficients(stream, rows, n, ScalarField.COMPLEX, first_sample)
    coeffs = basis.eigenvalues[:n] ** s * xi
    return FieldSample(basis, coeffs[0] if n_samples is None else coeffs, ScalarField.COMPLEX)


def pair(field: FieldSample, phi: TestFunctionRep) -> np.ndarray | complex:
    """``<Z, phi> = sum_n coeffs_n (phi, w_n)``; no conjugation on ``phi``."""
    m = field.truncation
    if m > phi.n_modes:
        raise ValueError(f"field has {m} modes but only {phi.n_modes} projections are cached")
    out = field.coeffs @ phi.projections[:m]
    return complex(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class RegularityRow:
    t: float
    partial_sum: float
    tail_ratio: float
    decay_exponent: float

    @property
    def convergent(self) -> bool:
        """Terms decaying faster than ``1/n`` make the series summable."""
        return self.decay_exponent > 1.0


def regularity_profile(s: float, basis: SpectralBasis, t_grid: Sequence[float],
                       n_modes: int | None = None) -> list[RegularityRow]:
    """For each ``t``: ``sum_{n<=N} lambda_n^{2(s-t)}`` (``E||Z||^2`` in ``L_{-t}``),
    the share of that sum carried by the last quarter of the modes, and the
    power-law decay exponent of the terms fitted on ``n in [N/2, N]``.

    A flat, non-vanishing tail ratio together with an exponent ``<= 1``
    signals divergence as ``N -> infinity``.
    """
    n = basis.size if n_modes is None else int(n_modes)
    lam = basis.eigenvalues[:n]
    idx = np.arange(n // 2, n)
    log_n = np.log(idx + 1.0)
    rows = []
    for t in t_grid:
        terms = lam ** (2 * (s - t))
        total = math.fsum(terms)
        tail = math.fsum(terms[(3 * n) // 4:])
        slope, _ = ols_slope(log_n, np.log(terms[idx]))
        rows.append(RegularityRow(float(t), total, tail / total, -slope))
    return rows


def regularity_threshold(s: float, dim: int) -> float:
    """The field lives in ``L_{-t}`` exactly when ``t > s + d/4``."""
    return s + dim / 4


def product_bump(power: int = 2, lx: float = 1.0, ly: float = 1.0):
    """``(x (lx - x))^p (y (ly - y))^p`` for rectangles."""
    return lambda x, y: (x * (lx - x)) ** power * (y * (ly - y)) ** power


def poly_bump(power: int = 2, length: float = 1.0):
    """``(x (L - x))^p`` on an interval."""
    return lambda x: (x * (length - x)) ** power


def sample_pairings(s: float, basis: SpectralBasis, test_functions: Sequence[TestFunctionRep],
                    n_samples: int, rng=0, n_modes: int | None = None, chunk: int = 5000,
                    workers: int = 1) -> np.ndarray:
    """``<Z_i, phi_j>`` for ``n_samples`` draws of :func:`sample_fgf`, shape
    ``(n_samples, len(test_functions))``, generated in memory-bounded chunks."""
    from .rng import map_chunks

    n = basis.size if n_modes is None else int(n_modes)
    proj = np.stack([phi.projections[:n] for phi in test_functions], axis=1)

    def run(first, count):
        return sample_fgf(s, basis, n, rng, count, first).coeffs @ proj

    return np.concatenate(map_chunks(run, n_samples, chunk, workers), axis=0)
