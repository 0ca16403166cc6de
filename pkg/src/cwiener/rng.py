"""Counter-based random streams.

Every draw is a pure function of ``(key, sample index, uniform offset)``, so
results never depend on chunking, call order or worker count.  The mixing
function is the SplitMix64 finalizer; a stream key is split into per-sample
keys, and each per-sample key is itself run as a SplitMix64 sequence.
"""

from __future__ import annotations

import hashlib
import math

import numpy as np

GOLDEN = 0x9E3779B97F4A7C15
# second Weyl increment, used inside a sample so sample keys and draws differ
INNER = 0xD1B54A32D192ED03
MASK64 = (1 << 64) - 1

_GOLDEN = np.uint64(GOLDEN)
_INNER = np.uint64(INNER)
_TWO53 = 2.0**-53


def mix64(x):
    """SplitMix64 finalizer on a uint64 array (bijective on 64 bits)."""
    z = np.asarray(x, dtype=np.uint64).copy()
    z ^= z >> np.uint64(30)
    z *= np.uint64(0xBF58476D1CE4E5B9)
    z ^= z >> np.uint64(27)
    z *= np.uint64(0x94D049BB133111EB)
    z ^= z >> np.uint64(31)
    return z


def _mix_int(x: int) -> int:
    return int(mix64(np.array([x & MASK64], dtype=np.uint64))[0])


def tag_hash(tag: str | int) -> int:
    if isinstance(tag, int):
        return _mix_int(tag)
    digest = hashlib.blake2b(tag.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def box_muller(u1, u2):
    """Standard normal pair from two uniforms in [0, 1)."""
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    angle = 2.0 * math.pi * u2
    return radius * np.cos(angle), radius * np.sin(angle)


class Stream:
    """Immutable handle on a family of per-sample substreams.

    Sample ``i`` of the stream owns an independent sequence of uniforms; the
    ``j``-th uniform of sample ``i`` is always the same number.  Use
    :meth:`child` to obtain statistically independent streams.
    """

    __slots__ = ("key",)

    def __init__(self, key: int):
        self.key = int(key) & MASK64

    @classmethod
    def from_seed(cls, seed: int, tag: str | int = "root") -> "Stream":
        return cls(_mix_int(_mix_int(int(seed)) ^ tag_hash(tag)))

    def child(self, tag: str | int) -> "Stream":
        return Stream(_mix_int(self.key ^ tag_hash(tag)) ^ _mix_int(self.key + GOLDEN))

    def __repr__(self) -> str:
        return f"Stream(0x{self.key:016x})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Stream) and other.key == self.key

    def __hash__(self) -> int:
        return hash(self.key)

    def sample_keys(self, n_samples: int, first_sample: int = 0) -> np.ndarray:
        idx = np.arange(first_sample, first_sample + n_samples, dtype=np.uint64)
        return mix64(np.uint64(self.key) + (idx + np.uint64(1)) * _GOLDEN)

    def uniforms(self, n_samples: int, n_uniforms: int, first_sample: int = 0,
                 offset: int = 0) -> np.ndarray:
        """Uniforms in [0, 1), shape ``(n_samples, n_uniforms)``."""
        keys = self.sample_keys(n_samples, first_sample)[:, None]
        ctr = np.arange(offset, offset + n_uniforms, dtype=np.uint64)[None, :]
        bits = mix64(keys + (ctr + np.uint64(1)) * _INNER)
        return (bits >> np.uint64(11)).astype(np.float64) * _TWO53

    def normals(self, n_samples: int, n_coords: int, first_sample: int = 0,
                coord_offset: int = 0) -> np.ndarray:
        """Real N(0, 1) draws; coordinate ``c`` uses uniforms ``2c`` and ``2c+1``."""
        u = self.uniforms(n_samples, 2 * n_coords, first_sample, 2 * coord_offset)
        return box_muller(u[:, 0::2], u[:, 1::2])[0]

    def complex_normals(self, n_samples: int, n_coords: int, first_sample: int = 0,
                        coord_offset: int = 0) -> np.ndarray:
        """Standard proper complex draws (Re, Im i.i.d. N(0, 1/2)).

        Coordinate ``c`` consumes uniforms ``4c .. 4c+3``: the first pair feeds
        the real part, the second pair the imaginary part.
        """
        u = self.uniforms(n_samples, 4 * n_coords, first_sample, 4 * coord_offset)
        re = box_muller(u[:, 0::4], u[:, 1::4])[0]
        im = box_muller(u[:, 2::4], u[:, 3::4])[0]
        return (re + 1j * im) * math.sqrt(0.5)


def as_stream(rng, tag: str = "root") -> Stream:
    """Accept a :class:`Stream` or an integer seed."""
    if isinstance(rng, Stream):
        return rng
    if isinstance(rng, (int, np.integer)):
        return Stream.from_seed(int(rng), tag)
    raise TypeError(f"expected Stream or integer seed, got {type(rng).__name__}")


def chunk_bounds(n_samples: int, chunk: int):
    """``(first, count)`` pairs covering ``range(n_samples)`` in order."""
    if chunk < 1:
        raise ValueError("chunk must be >= 1")
    return [(lo, min(chunk, n_samples - lo)) for lo in range(0, n_samples, chunk)]


def map_chunks(fn, n_samples: int, chunk: int = 10_000, workers: int = 1) -> list:
    """Apply ``fn(first_sample, count)`` over sample chunks, results in chunk order.

    Draws depend only on sample indices, so the results do not depend on
    ``chunk`` or ``workers``.
    """
    bounds = chunk_bounds(n_samples, chunk)
    if workers <= 1 or len(bounds) == 1:
        return [fn(lo, n) for lo, n in bounds]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda b: fn(*b), bounds))
