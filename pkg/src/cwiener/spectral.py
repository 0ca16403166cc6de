"""Dirichlet Laplacian eigenbases on intervals and rectangles, and diagonal
non-negative operators over them."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Union

import numpy as np

DEFAULT_PANELS = 2048


@dataclass(frozen=True)
class Interval:
    length: float = 1.0

    def __post_init__(self):
        if not self.length > 0:
            raise ValueError(f"interval length must be positive, got {self.length}")

    dim = 1

    @property
    def area(self) -> float:
        return self.length

    def to_dict(self) -> dict:
        return {"kind": "interval", "L": self.length}


@dataclass(frozen=True)
class Rectangle:
    lx: float = 1.0
    ly: float = 1.0

    def __post_init__(self):
        if not (self.lx > 0 and self.ly > 0):
            raise ValueError(f"rectangle sides must be positive, got {self.lx}, {self.ly}")

    dim = 2

    @property
    def area(self) -> float:
        return self.lx * self.ly

    def to_dict(self) -> dict:
        return {"kind": "rectangle", "Lx": self.lx, "Ly": self.ly}


Domain = Union[Interval, Rectangle]


def parse_domain(text: str) -> Domain:
    """Parse ``interval:L`` or ``rect:Lx,Ly``."""
    kind, _, args = text.partition(":")
    kind = kind.strip().lower()
    if kind == "interval":
        return Interval(float(args) if args else 1.0)
    if kind in ("rect", "rectangle"):
        parts = [float(a) for a in args.split(",")] if args else [1.0, 1.0]
        if len(parts) != 2:
            raise ValueError(f"rectangle needs two sides, got {text!r}")
        return Rectangle(*parts)
    raise ValueError(f"unknown domain {text!r}")


def domain_from_dict(d: dict) -> Domain:
    if d["kind"] == "interval":
        return Interval(d["L"])
    return Rectangle(d["Lx"], d["Ly"])


@dataclass(frozen=True, eq=False)
class SpectralBasis:
    """First ``size`` Dirichlet eigenpairs of ``domain``, sorted by eigenvalue.

    ``indices`` holds the sine wave numbers of each mode: ``(n,)`` on an
    interval, ``(j, k)`` on a rectangle.
    """

    domain: Domain
    eigenvalues: np.ndarray
    indices: np.ndarray

    @property
    def size(self) -> int:
        return len(self.eigenvalues)

    @property
    def dim(self) -> int:
        return self.domain.dim

    def evaluate(self, points, modes=None) -> np.ndarray:
        """Eigenfunction values, shape ``(n_points, n_modes)``.

        ``points`` is a 1-D array on an interval, or an ``(n, 2)`` array on a
        rectangle.  ``modes`` selects a subset (default: all).
        """
        idx = self.indices if modes is None else self.indices[np.asarray(modes)]
        pts = np.asarray(points, dtype=float)
        if isinstance(self.domain, Interval):
            L = self.domain.length
            pts = pts.reshape(-1)
            return math.sqrt(2 / L) * np.sin(np.outer(pts, idx[:, 0]) * (math.pi / L))
        pts = pts.reshape(-1, 2)
        lx, ly = self.domain.lx, self.domain.ly
        sx = np.sin(np.outer(pts[:, 0], idx[:, 0]) * (math.pi / lx))
        sy = np.sin(np.outer(pts[:, 1], idx[:, 1]) * (math.pi / ly))
        return (2 / math.sqrt(lx * ly)) * sx * sy

    def to_dict(self) -> dict:
        return {"domain": self.domain.to_dict(), "N": self.size,
                "eigenvalues": self.eigenvalues.tolist()}


def dirichlet_basis(domain: Domain, n_modes: int) -> SpectralBasis:
    """Closed-form Dirichlet eigenpairs.

    Interval(L): ``lambda_n = (n pi / L)^2``, ``w_n = sqrt(2/L) sin(n pi x / L)``.
    Rectangle: products of sines with ``lambda = pi^2 (j^2/Lx^2 + k^2/Ly^2)``,
    sorted by eigenvalue with ties ordered by ``(j, k)``.
    """
    if n_modes < 1:
        raise ValueError("need at least one mode")
    if isinstance(domain, Interval):
        n = np.arange(1, n_modes + 1)
        lam = n.astype(float) ** 2 * (math.pi / domain.length) ** 2
        return SpectralBasis(domain, lam, n[:, None])
    if not isinstance(domain, Rectangle):
        raise TypeError(f"unsupported domain {domain!r}")
    lx2, ly2 = domain.lx ** 2, domain.ly ** 2
    # Weyl count N(lam) ~ area lam / (4 pi); grow the cutoff until it holds n_modes
    cut = 4 * math.pi * n_modes / domain.area + math.pi ** 2 * (1 / lx2 + 1 / ly2)
    while True:
        jmax = int(math.sqrt(cut * lx2) / math.pi) + 1
        kmax = int(math.sqrt(cut * ly2) / math.pi) + 1
        j, k = np.meshgrid(np.arange(1, jmax + 1), np.arange(1, kmax + 1), indexing="ij")
        j, k = j.ravel(), k.ravel()
        scaled = j ** 2 / lx2 + k ** 2 / ly2
        keep = scaled * math.pi ** 2 <= cut
        if keep.sum() >= n_modes:
            break
        cut *= 1.5
    j, k, scaled = j[keep], k[keep], scaled[keep]
    order = np.lexsort((k, j, scaled))[:n_modes]
    lam = math.pi ** 2 * scaled[order]
    return SpectralBasis(domain, lam, np.stack([j[order], k[order]], axis=1))


def weyl_ratio(basis: SpectralBasis, n: int) -> float:
    """``n^2 * lambda_n^(-d)`` (1-based ``n``)."""
    if not 1 <= n <= basis.size:
        raise IndexError(f"mode {n} outside 1..{basis.size}")
    return n * n / basis.eigenvalues[n - 1] ** basis.dim


def simpson_weights(a: float, b: float, panels: int = DEFAULT_PANELS) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of composite Simpson's rule with an even panel count."""
    if panels < 2 or panels % 2:
        raise ValueError("Simpson's rule needs an even number of panels")
    x = np.linspace(a, b, panels + 1)
    w = np.ones(panels + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return x, w * (b - a) / panels / 3.0


def gram_deviation(basis: SpectralBasis, panels: int = DEFAULT_PANELS) -> float:
    """Max deviation of the Simpson Gram matrix from the identity."""
    if isinstance(basis.domain, Interval):
        x, w = simpson_weights(0.0, basis.domain.length, panels)
        vals = basis.evaluate(x)
        gram = (vals * w[:, None]).T @ vals
    else:
        # tensor structure: integrate each axis separately
        d = basis.domain
        x, wx = simpson_weights(0.0, d.lx, panels)
        y, wy = simpson_weights(0.0, d.ly, panels)
        jx = np.sin(np.outer(x, basis.indices[:, 0]) * math.pi / d.lx) * math.sqrt(2 / d.lx)
        ky = np.sin(np.outer(y, basis.indices[:, 1]) * math.pi / d.ly) * math.sqrt(2 / d.ly)
        gram = ((jx * wx[:, None]).T @ jx) * ((ky * wy[:, None]).T @ ky)
    return float(np.abs(gram - np.eye(basis.size)).max())


def _second_difference(w: np.ndarray, h: float, axis: int) -> np.ndarray:
    """Richardson-extrapolated second difference on the even interior nodes."""
    n = w.shape[axis]
    centre = np.take(w, np.arange(2, n - 2, 2), axis=axis)
    d1 = (np.take(w, np.arange(3, n - 1, 2), axis=axis) - 2 * centre
          + np.take(w, np.arange(1, n - 3, 2), axis=axis)) / h ** 2
    d2 = (np.take(w, np.arange(4, n, 2), axis=axis) - 2 * centre
          + np.take(w, np.arange(0, n - 4, 2), axis=axis)) / (2 * h) ** 2
    return (4 * d1 - d2) / 3


def eigen_residual(basis: SpectralBasis, mode: int, points: int = 4097) -> float:
    """Relative residual of ``-Laplace w = lambda w`` for the 0-based ``mode``,
    using Richardson-extrapolated central second differences on interior
    grid nodes (``points`` per axis on an interval, ``sqrt``-scaled on a
    rectangle)."""
    lam = basis.eigenvalues[mode]
    if isinstance(basis.domain, Interval):
        x = np.linspace(0, basis.domain.length, points)
        w = basis.evaluate(x, [mode])[:, 0]
        lap = _second_difference(w, x[1] - x[0], 0)
        ref = lam * w[2:-2:2]
    else:
        d = basis.domain
        m = 2 * int(math.sqrt(points) * 4) + 1
        x = np.linspace(0, d.lx, m)
        y = np.linspace(0, d.ly, m)
        X, Y = np.meshgrid(x, y, indexing="ij")
        w = basis.evaluate(np.stack([X.ravel(), Y.ravel()], axis=1), [mode])[:, 0].reshape(m, m)
        lap = (_second_difference(w, x[1] - x[0], 0)[:, 2:-2:2]
               + _second_difference(w, y[1] - y[0], 1)[2:-2:2, :])
        ref = lam * w[2:-2:2, 2:-2:2]
    return float(np.abs(-lap - ref).max() / np.abs(ref).max())


@dataclass(frozen=True, eq=False)
class SpectralOperator:
    """Diagonal operator with eigenvalues ``alphas`` over ``basis``."""

    basis: SpectralBasis
    alphas: np.ndarray = field(repr=False)

    def __post_init__(self):
        alphas = np.asarray(self.alphas, dtype=float)
        if alphas.ndim != 1 or len(alphas) > self.basis.size:
            raise ValueError("alphas must be a 1-D array no longer than the basis")
        if np.any(alphas < 0) or not np.all(np.isfinite(alphas)):
            raise ValueError("alphas must be finite and non-negative")
        object.__setattr__(self, "alphas", alphas)

    @property
    def size(self) -> int:
        return len(self.alphas)

    def to_dict(self) -> dict:
        return {"domain": self.basis.domain.to_dict(), "N": self.size,
                "eigenvalues": self.basis.eigenvalues[: self.size].tolist(),
                "alpha": self.alphas.tolist()}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, d: dict) -> "SpectralOperator":
        basis = dirichlet_basis(domain_from_dict(d["domain"]), int(d["N"]))
        stored = np.asarray(d["eigenvalues"], dtype=float)
        if not np.allclose(stored, basis.eigenvalues[: len(stored)], rtol=1e-12, atol=0):
            raise ValueError("stored eigenvalues do not match the regenerated basis")
        return cls(basis, np.asarray(d["alpha"], dtype=float))

    @classmethod
    def from_json(cls, text: str) -> "SpectralOperator":
        return cls.from_dict(json.loads(text))


def op_trace(op: SpectralOperator) -> float:
    return math.fsum(op.alphas)


def op_hs_norm(op: SpectralOperator) -> float:
    return math.sqrt(math.fsum(op.alphas * op.alphas))


def op_frac_power(op: SpectralOperator, exponent: float) -> SpectralOperator:
    """Elementwise power ``alpha_n ** exponent``; ``0 ** 0`` is taken as 1."""
    if exponent < 0 and np.any(op.alphas == 0):
        raise ZeroDivisionError("negative power of a zero eigenvalue")
    if exponent == 0:
        return SpectralOperator(op.basis, np.ones_like(op.alphas))
    return SpectralOperator(op.basis, op.alphas ** exponent)


def eigenvalue_power_operator(basis: SpectralBasis, exponent: float, n_modes: int | None = None):
    """Operator with ``alpha_n = lambda_n ** exponent``."""
    n = basis.size if n_modes is None else n_modes
    return SpectralOperator(basis, basis.eigenvalues[:n] ** exponent)
