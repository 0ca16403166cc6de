"""Complex Brownian motion on [0, T].

Convention: increments are proper complex Gaussians with ``E|dW|^2 = dt``,
so ``E|W_t|^2 = t`` and ``cov(W_s, W_t) = min(s, t)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .io import csv_text
from .rng import as_stream
from .stats import MomentEstimate, mc_mean


@dataclass(frozen=True, eq=False)
class PathSample:
    """Complex paths on a shared time grid; ``values`` is ``(..., len(times))``."""

    times: np.ndarray
    values: np.ndarray
    start: complex = 0j

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=np.complex128)
        if times.ndim != 1 or times.size == 0:
            raise ValueError("times must be a non-empty 1-D array")
        if times[0] != 0:
            raise ValueError("times must start at 0")
        if np.any(np.diff(times) <= 0):
            raise ValueError("times must be strictly increasing")
        if values.shape[-1] != times.size:
            raise ValueError("values and times lengths differ")
        if np.any(values[..., 0] != complex(self.start)):
            raise ValueError("values[0] must equal start")
        times.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "start", complex(self.start))

    @property
    def n_samples(self) -> int:
        return int(np.prod(self.values.shape[:-1], dtype=int))

    def at(self, t: float) -> np.ndarray:
        """Values at the grid time ``t`` (must be a grid point)."""
        hits = np.flatnonzero(np.isclose(self.times, t, rtol=0, atol=1e-12))
        if hits.size == 0:
            raise KeyError(f"time {t} is not on the grid")
        return self.values[..., hits[0]]

    def increments(self) -> np.ndarray:
        return np.diff(self.values, axis=-1)

    def to_csv(self) -> str:
        """Rows ``(sample_id, t, re, im)``."""
        v = self.values.reshape(-1, self.times.size)
        rows = ((i, float(t), float(v[i, j].real), float(v[i, j].imag))
                for i in range(v.shape[0]) for j, t in enumerate(self.times))
        return csv_text(("sample_id", "t", "re", "im"), rows)


def _check_times(times) -> np.ndarray:
    times = np.asarray(times, dtype=float)
    if times.ndim != 1 or times.size == 0 or times[0] != 0:
        raise ValueError("time grid must be 1-D and start at 0")
    if np.any(np.diff(times) <= 0):
        raise ValueError("time grid must be strictly increasing")
    return times


def sample_bm(times, rng=0, start: complex = 0j, n_samples: int | None = None,
              first_sample: int = 0) -> PathSample:
    """Increment sampler: ``W_{t_k} - W_{t_{k-1}} = sqrt(dt_k) xi_k`` with
    ``xi_k`` standard proper complex (4 uniforms per increment)."""
    times = _check_times(times)
    stream = as_stream(rng, "wiener")
    n = 1 if n_samples is None else int(n_samples)
    steps = times.size - 1
    vals = np.full((n, times.size), complex(start), dtype=np.complex128)
    if steps:
        xi = stream.complex_normals(n, steps, first_sample)
        vals[:, 1:] = start + np.cumsum(np.sqrt(np.diff(times)) * xi, axis=1)
    return PathSample(times, vals[0] if n_samples is None else vals, start)


def bm_cov_oracle(s: float, t: float, horizon: float = math.inf) -> float:
    if not (0 <= s <= horizon and 0 <= t <= horizon):
        raise ValueError(f"times ({s}, {t}) outside [0, {horizon}]")
    return min(s, t)


def kl_bm_basis(n_modes: int, grid, horizon: float) -> np.ndarray:
    """``h_k(t) = sqrt(2T) sin((k - 1/2) pi t / T) / ((k - 1/2) pi)``, shape
    ``(len(grid), n_modes)``; the derivatives are orthonormal in L2[0, T]."""
    freq = (np.arange(1, n_modes + 1) - 0.5) * math.pi
    t = np.asarray(grid, dtype=float)
    return math.sqrt(2 * horizon) * np.sin(np.outer(t / horizon, freq)) / freq


def kl_bm_variance(n_modes: int, t: float, horizon: float) -> float:
    """Exact ``E|W_t|^2`` of the ``n_modes``-term KL path."""
    return float(np.sum(kl_bm_basis(n_modes, [t], horizon) ** 2))


def kl_bm_sample(n_modes: int, grid, rng=0, horizon: float | None = None,
                 n_samples: int | None = None, first_sample: int = 0) -> PathSample:
    """Truncated KL series ``sum_{k<=K} xi_k h_k(t)``; ``horizon`` defaults to
    the last grid time."""
    if n_modes < 1:
        raise ValueError("need at least one KL mode")
    grid = _check_times(grid)
    T = float(grid[-1]) if horizon is None else float(horizon)
    stream = as_stream(rng, "wiener-kl")
    n = 1 if n_samples is None else int(n_samples)
    xi = stream.complex_normals(n, n_modes, first_sample)
    vals = xi @ kl_bm_basis(n_modes, grid, T).T
    vals[:, 0] = 0
    return PathSample(grid, vals[0] if n_samples is None else vals, 0j)


def fdd_log_density(path: PathSample, variance_scale: float = 1.0) -> np.ndarray:
    """Log density of the path's marks under complex BM started at ``start``.

    Each increment is CN(0, c dt, 0) with ``c = variance_scale``:
    ``sum_k [-|dx_k|^2 / (c dt_k) - log(pi c dt_k)]``.  ``c = 1`` is this
    package's convention; ``c = 2`` reproduces the ``exp(-|dx|^2 / (2 dt))``
    weight with its matching normaliser.
    """
    if path.times.size < 2:
        raise ValueError("need at least two time points")
    dt = np.diff(path.times) * variance_scale
    dx = path.increments()
    return np.sum(-np.abs(dx) ** 2 / dt - np.log(math.pi * dt), axis=-1)


def shift_path(path: PathSample, x0: complex) -> PathSample:
    return PathSample(path.times, path.values + x0, path.start + x0)


def fernique_moment(paths: PathSample, alpha: float) -> MomentEstimate:
    """Estimate ``E exp(alpha sup_t |W_t|^2)`` with the sup over grid points."""
    return fernique_from_sup(np.max(np.abs(paths.values) ** 2, axis=-1).ravel(), alpha)


def coarsen(path: PathSample, step: int) -> PathSample:
    """Keep every ``step``-th grid point (the last point is always kept)."""
    idx = np.arange(0, path.times.size, step)
    if idx[-1] != path.times.size - 1:
        idx = np.append(idx, path.times.size - 1)
    return PathSample(path.times[idx], path.values[..., idx], path.start)


def sup_sq_samples(times, n_samples: int, rng=0, chunks_of: int = 5000, coarsen_by=(1,),
                   workers: int = 1) -> dict[int, np.ndarray]:
    """``sup_t |W_t|^2`` per path on ``times`` and on nested coarsenings.

    Returns ``{step: array}`` where ``step`` keeps every ``step``-th grid
    point; all coarsenings share the same paths.
    """
    from .rng import map_chunks

    def run(first, count):
        paths = sample_bm(times, rng, n_samples=count, first_sample=first)
        return {k: np.max(np.abs(coarsen(paths, k).values) ** 2, axis=-1) for k in coarsen_by}

    parts = map_chunks(run, n_samples, chunks_of, workers)
    return {k: np.concatenate([p[k] for p in parts]) for k in coarsen_by}


def fernique_from_sup(sup_sq, alpha: float) -> MomentEstimate:
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    est = mc_mean(np.exp(alpha * np.asarray(sup_sq, dtype=float)))
    return MomentEstimate(est.value.real, est.std_error, est.n_samples)
