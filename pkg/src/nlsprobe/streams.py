"""Counter-based random streams.

Every draw is a pure function of (seed, counter, lane), built from the
splitmix64 finalizer, so ensemble members can be generated independently,
in any order, on any worker, with bit-identical results.
"""

from __future__ import annotations

import numpy as np

_U = np.uint64
_GOLDEN = _U(0x9E3779B97F4A7C15)
_MIX1 = _U(0xBF58476D1CE4E5B9)
_MIX2 = _U(0x94D049BB133111EB)
_LANE_SALT = _U(0xD6E8FEB86659FD93)

_COORD_OFFSET = 1 << 20  # cube coordinates fit signed 21-bit lanes
_COORD_BITS = 21


def mix64(z: np.ndarray) -> np.ndarray:
    """splitmix64 finalizer, vectorized over uint64 arrays (wrapping mod 2^64)."""
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> _U(30))) * _MIX1
        z = (z ^ (z >> _U(27))) * _MIX2
    return z ^ (z >> _U(31))


def pack_coords(*coords) -> np.ndarray:
    """Pack integer lattice coordinates into a single uint64 counter."""
    packed = np.zeros(np.broadcast(*coords).shape, dtype=np.uint64)
    for j, c in enumerate(coords):
        c = np.asarray(c, dtype=np.int64)
        if np.any(np.abs(c) >= _COORD_OFFSET):
            raise ValueError("coordinate out of packable range")
        packed |= (c + _COORD_OFFSET).astype(np.uint64) << _U(j * _COORD_BITS)
    return packed


def uniforms(seed: int, counters, lane: int = 0) -> np.ndarray:
    """Uniform draws on (0, 1], one per counter."""
    counters = np.asarray(counters, dtype=np.uint64)
    with np.errstate(over="ignore"):
        key = mix64(_U(seed & 0xFFFFFFFFFFFFFFFF) * _GOLDEN + _U(lane) * _LANE_SALT + _GOLDEN)
        shifted = counters + _GOLDEN
    bits = mix64(mix64(shifted) ^ key)
    return (bits >> _U(11)).astype(np.float64) * 2.0**-53 + 2.0**-54


def complex_gaussians(seed: int, counters, sigma2: float = 1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussians with E|g|^2 = sigma2.

    Real and imaginary parts are independent N(0, sigma2/2).
    """
    u1 = uniforms(seed, counters, lane=0)
    u2 = uniforms(seed, counters, lane=1)
    radius = np.sqrt(-sigma2 * np.log(u1))
    return radius * np.exp(2j * np.pi * u2)


def real_gaussians(seed: int, counters, lane: int = 0) -> np.ndarray:
    """Standard normal draws, one per counter (Box-Muller, cosine branch)."""
    u1 = uniforms(seed, counters, lane=2 * lane)
    u2 = uniforms(seed, counters, lane=2 * lane + 1)
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * np.pi * u2)
