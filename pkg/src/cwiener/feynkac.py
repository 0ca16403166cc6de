"""Feynman-Kac on a truncated grid of the complex plane.

Three independent routes to ``(exp(-T H) f, g)`` with ``H = -Delta_BM + V``,
where ``Delta_BM`` generates the transition semigroup of the package's
complex Brownian motion (``E|W_t|^2 = t``, i.e. a quarter of the Laplacian):

* :func:`trotter_apply` alternates :func:`heat_step` with multiplication by
  ``exp(-tau V)``;
* :func:`spectral_expm_oracle` exponentiates a 5-point finite-difference
  Hamiltonian by dense eigendecomposition;
* :func:`fk_mc_estimate` averages ``exp(-int V) f(x(T))`` over Brownian paths.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
import scipy.linalg
from scipy.interpolate import RectBivariateSpline

from .io import csv_text
from .rng import as_stream
from .stats import MomentEstimate

MAX_ORACLE_POINTS = 32


@dataclass(frozen=True, eq=False)
class GridFunction2D:
    """Complex values on the uniform ``M x M`` grid of ``[-L, L]^2``;
    ``values[i, j]`` sits at ``x_i + i y_j``."""

    half_extent: float
    points: int
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if not self.half_extent > 0:
            raise ValueError("half_extent must be positive")
        if self.points < 8:
            raise ValueError("need at least 8 points per axis")
        values = np.asarray(self.values, dtype=np.complex128)
        if values.shape != (self.points, self.points):
            raise ValueError(f"values must be {self.points}x{self.points}, got {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("grid values must be finite")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_function(cls, fn: Callable, half_extent: float = 6.0, points: int = 32):
        x = axis_nodes(half_extent, points)
        z = x[:, None] + 1j * x[None, :]
        return cls(half_extent, points, np.broadcast_to(fn(z), z.shape))

    @property
    def spacing(self) -> float:
        return 2 * self.half_extent / (self.points - 1)

    @property
    def axis(self) -> np.ndarray:
        return axis_nodes(self.half_extent, self.points)

    @property
    def nodes(self) -> np.ndarray:
        x = self.axis
        return x[:, None] + 1j * x[None, :]

    @property
    def weights(self) -> np.ndarray:
        w = np.full(self.points, self.spacing)
        w[0] = w[-1] = self.spacing / 2
        return np.outer(w, w)

    def like(self, values) -> "GridFunction2D":
        return GridFunction2D(self.half_extent, self.points, values)

    def inner(self, other: "GridFunction2D") -> complex:
        """Trapezoid ``(self, other)_{L2} = int self conj(other)``."""
        terms = (self.weights * self.values * np.conj(other.values)).ravel()
        return complex(math.fsum(terms.real), math.fsum(terms.imag))

    def central(self) -> np.ndarray:
        """Values on the central half of the grid (``|x|, |y| <= L/2``)."""
        mask = np.abs(self.axis) <= self.half_extent / 2 + 1e-12
        return self.values[np.ix_(mask, mask)]

    def interpolator(self) -> Callable[[np.ndarray], np.ndarray]:
        """Bicubic spline of the grid data; zero outside the square."""
        x = self.axis
        sr = RectBivariateSpline(x, x, self.values.real, kx=3, ky=3)
        si = RectBivariateSpline(x, x, self.values.imag, kx=3, ky=3)
        L = self.half_extent

        def evaluate(z):
            z = np.asarray(z, dtype=np.complex128)
            xr, yi = z.real.ravel(), z.imag.ravel()
            out = sr(xr, yi, grid=False) + 1j * si(xr, yi, grid=False)
            out[(np.abs(xr) > L) | (np.abs(yi) > L)] = 0
            return out.reshape(z.shape)

        return evaluate

    def header(self) -> dict:
        return {"L": self.half_extent, "M": self.points}

    def to_csv(self) -> str:
        rows = ((i, j, float(self.values[i, j].real), float(self.values[i, j].imag))
                for i in range(self.points) for j in range(self.points))
        return csv_text(("i", "j", "re", "im"), rows)

    @classmethod
    def from_csv(cls, text: str, header: dict | str) -> "GridFunction2D":
        if isinstance(header, str):
            header = json.loads(header)
        M = int(header["M"])
        values = np.zeros((M, M), dtype=np.complex128)
        lines = text.strip().splitlines()
        if lines[0].split(",") != ["i", "j", "re", "im"]:
            raise ValueError("unexpected CSV header")
        for line in lines[1:]:
            i, j, re, im = line.split(",")
            values[int(i), int(j)] = complex(float(re), float(im))
        return cls(float(header["L"]), M, values)


def axis_nodes(half_extent: float, points: int) -> np.ndarray:
    return np.linspace(-half_extent, half_extent, points)


@dataclass(frozen=True, eq=False)
class Potential:
    """Bounded potential ``V: C -> C``; the bound is checked on a probe grid."""

    evaluator: Callable[[np.ndarray], np.ndarray]
    bound: float
    probe_extent: float = 6.0
    probe_points: int = 64

    def __post_init__(self):
        if not (math.isfinite(self.bound) and self.bound >= 0):
            raise ValueError(f"bound must be finite and >= 0, got {self.bound}")
        x = axis_nodes(self.probe_extent, self.probe_points)
        vals = self(x[:, None] + 1j * x[None, :])
        if not np.all(np.isfinite(vals)):
            raise ValueError("potential is not finite on the probe grid")
        if np.abs(vals).max() > self.bound * (1 + 1e-12):
            raise ValueError(f"|V| exceeds the stated bound {self.bound}")

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        return np.broadcast_to(np.asarray(self.evaluator(z), dtype=np.complex128), z.shape)

    @property
    def is_real(self) -> bool:
        x = axis_nodes(self.probe_extent, self.probe_points)
        return bool(np.all(self(x[:, None] + 1j * x[None, :]).imag == 0))

    @classmethod
    def constant(cls, c: complex) -> "Potential":
        return cls(lambda z: np.full(np.shape(z), c, dtype=np.complex128), abs(c))

    @classmethod
    def gaussian(cls, height: float = 1.0) -> "Potential":
        return cls(lambda z: height * np.exp(-np.abs(z) ** 2), abs(height))


def gaussian_bump(center: complex = 0j, width: float = 1.0, amplitude: complex = 1.0):
    """``amplitude * exp(-|z - center|^2 / width^2)`` as a callable."""
    return lambda z: amplitude * np.exp(-np.abs(np.asarray(z) - center) ** 2 / width ** 2)


# tau / h^2 above which the sampled Gaussian kernel is used directly; its
# trapezoid (aliasing) error is about 2 exp(-pi^2 tau / h^2) < 1e-8 there
DIRECT_KERNEL_RATIO = 2.0


@lru_cache(maxsize=64)
def _heat_kernel_1d(points: int, spacing: float, tau: float) -> np.ndarray:
    """Axis kernel of one heat step (per-axis variance ``tau / 2``),
    ``K[i, j] = k(i - j)``.

    Resolved steps (``tau >= 2 h^2``) use the sampled kernel
    ``k(m) = h (pi tau)^(-1/2) exp(-(m h)^2 / tau)``.  Shorter steps read the
    grid data as samples of their band-limited interpolant and apply the
    heat semigroup to it exactly,
    ``k(m) = (1/pi) int_0^pi exp(-tau theta^2 / (4 h^2)) cos(m theta) dtheta``,
    which tends to the identity as ``tau -> 0`` instead of blowing up.
    """
    m = np.arange(points)
    if tau >= DIRECT_KERNEL_RATIO * spacing ** 2:
        k = spacing / math.sqrt(math.pi * tau) * np.exp(-(m * spacing) ** 2 / tau)
    else:
        nodes, wts = np.polynomial.legendre.leggauss(max(256, 4 * points))
        theta = (nodes + 1) * (math.pi / 2)
        symbol = np.exp(-tau * theta ** 2 / (4 * spacing ** 2)) * wts * (math.pi / 2)
        k = np.cos(np.outer(m, theta)) @ symbol / math.pi
    idx = np.abs(m[:, None] - m[None, :])
    return k[idx]


def heat_step(f: GridFunction2D, tau: float) -> GridFunction2D:
    """One step of the complex-BM transition semigroup,
    ``(p_tau f)(z) = (pi tau)^(-1) int exp(-|z - z'|^2 / tau) f(z') dz'``,
    as a kernel-weighted sum over the grid, separable in x and y.  Outside the
    square ``f`` is taken to be zero."""
    if not tau > 0:
        raise ValueError("tau must be positive")
    K = _heat_kernel_1d(f.points, f.spacing, float(tau))
    return f.like(K @ f.values @ K.T)


def trotter_apply(f: GridFunction2D, V: Potential, T: float, n: int, sign: float = -1.0) -> GridFunction2D:
    """``[p_{T/n} exp(sign (T/n) V)]^n f``; ``sign=-1`` gives ``exp(-T H) f``."""
    if n < 1:
        raise ValueError("need at least one Trotter step")
    tau = T / n
    K = _heat_kernel_1d(f.points, f.spacing, float(tau))
    mult = np.exp(sign * tau * V(f.nodes))
    vals = f.values
    for _ in range(n):
        vals = K @ (mult * vals) @ K.T
    return f.like(vals)


def _fd_hamiltonian(points: int, spacing: float, potential: np.ndarray) -> np.ndarray:
    # quarter 5-point Laplacian (generator of E|W_t|^2 = t), zero outside the grid
    lap1 = (np.diag(np.full(points, -2.0)) + np.diag(np.ones(points - 1), 1)
            + np.diag(np.ones(points - 1), -1)) / spacing ** 2
    eye = np.eye(points)
    lap = np.kron(lap1, eye) + np.kron(eye, lap1)
    return -0.25 * lap + np.diag(potential.ravel())


def spectral_expm_oracle(f: GridFunction2D, V: Potential, T: float, sign: float = -1.0) -> GridFunction2D:
    """``exp(-T H_h) f`` with ``H_h = -(1/4) Delta_5pt - sign V`` exponentiated
    densely (eigendecomposition for real ``V``, Pade ``expm`` otherwise)."""
    if f.points > MAX_ORACLE_POINTS:
        raise ValueError(f"spectral oracle limited to M <= {MAX_ORACLE_POINTS}, got {f.points}")
    if T < 0:
        raise ValueError("T must be >= 0")
    if T == 0:
        return f.like(f.values.copy())
    pot = -sign * V(f.nodes)
    H = _fd_hamiltonian(f.points, f.spacing, pot)
    vec = f.values.ravel()
    if np.all(pot.imag == 0):
        evals, evecs = np.linalg.eigh(H.real)
        out = evecs @ (np.exp(-T * evals) * (evecs.T @ vec))
    else:
        out = scipy.linalg.expm(-T * H) @ vec
    return f.like(out.reshape(f.values.shape))


def fk_mc_estimate(f: GridFunction2D, g: GridFunction2D, V: Potential, T: float,
                   paths_per_start: int, rng=0, n_steps: int = 32, sign: float = -1.0,
                   chunk: int = 64) -> MomentEstimate:
    """Path Monte-Carlo estimate of ``(exp(-T H) f, g)``.

    For every grid node ``z0``: average ``exp(sign int_0^T V(x(s)) ds) f(x(T))``
    over ``paths_per_start`` Brownian paths from ``z0`` (left-endpoint rule
    on ``n_steps`` steps, ``f`` read through its bicubic interpolant), then
    sum ``weight(z0) conj(g(z0)) * average`` over nodes.  The error bar is the
    Monte-Carlo part; trapezoid error on the smooth, decaying data used here
    is far below it.
    """
    if f.points != g.points or f.half_extent != g.half_extent:
        raise ValueError("f and g must share the grid")
    if n_steps < 32:
        raise ValueError("path time step must be <= T/32")
    stream = as_stream(rng, "feynkac")
    dt = T / n_steps
    interp = f.interpolator()
    starts = f.nodes.ravel()
    coef = (f.weights * np.conj(g.values)).ravel()
    active = np.flatnonzero(coef != 0)
    means = np.zeros(starts.size, dtype=np.complex128)
    variances = np.zeros(starts.size)
    for lo in range(0, active.size, chunk):
        idx = active[lo:lo + chunk]
        n_paths = idx.size * paths_per_start
        # sample ids are start_index * paths_per_start + p, independent of chunking
        sample_ids = (idx[:, None] * paths_per_start + np.arange(paths_per_start)[None, :]).ravel()
        xi = _complex_normals_for(stream, sample_ids, n_steps)
        x = np.empty((n_paths, n_steps + 1), dtype=np.complex128)
        x[:, 0] = np.repeat(starts[idx], paths_per_start)
        x[:, 1:] = x[:, :1] + np.cumsum(math.sqrt(dt) * xi, axis=1)
        action = V(x[:, :-1]).sum(axis=1) * dt
        vals = np.exp(sign * action) * interp(x[:, -1])
        vals = vals.reshape(idx.size, paths_per_start)
        means[idx] = vals.mean(axis=1)
        if paths_per_start > 1:
            variances[idx] = (np.abs(vals - means[idx][:, None]) ** 2).sum(axis=1) / (paths_per_start - 1)
    terms = coef * means
    value = complex(math.fsum(terms.real), math.fsum(terms.imag))
    var_terms = np.abs(coef) ** 2 * variances / paths_per_start
    std = math.sqrt(math.fsum(var_terms))
    return MomentEstimate(value, std, int(active.size * paths_per_start))


def _complex_normals_for(stream, sample_ids: np.ndarray, n_coords: int) -> np.ndarray:
    """Standard complex normals for arbitrary (sorted-contiguous or not) sample ids."""
    ids = np.asarray(sample_ids)
    if ids.size and np.all(np.diff(ids) == 1):
        return stream.complex_normals(ids.size, n_coords, int(ids[0]))
    out = np.empty((ids.size, n_coords), dtype=np.complex128)
    # group contiguous runs to keep calls vectorised
    breaks = np.flatnonzero(np.diff(ids) != 1) + 1
    for run in np.split(np.arange(ids.size), breaks):
        out[run] = stream.complex_normals(run.size, n_coords, int(ids[run[0]]))
    return out
