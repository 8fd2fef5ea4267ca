"""Seeded value-noise used for grass texture and audience/stand speckle.

Lattice values come from an integer hash so the field is a pure function of
(coordinates, seed); no global RNG state is involved.
"""

from __future__ import annotations

import numpy as np

_M = np.uint64(0xFFFFFFFFFFFFFFFF)


def _hash_lattice(ix: np.ndarray, iy: np.ndarray, seed: int) -> np.ndarray:
    """Hash integer lattice coordinates to floats in [0, 1)."""
    x = ix.astype(np.uint64) * np.uint64(0x9E3779B97F4A7C15)
    y = iy.astype(np.uint64) * np.uint64(0xC2B2AE3D27D4EB4F)
    h = x ^ y ^ np.uint64(seed & 0xFFFFFFFFFFFFFFFF)
    h ^= h >> np.uint64(30)
    h *= np.uint64(0xBF58476D1CE4E5B9)
    h ^= h >> np.uint64(27)
    h *= np.uint64(0x94D049BB133111EB)
    h ^= h >> np.uint64(31)
    return (h >> np.uint64(11)).astype(np.float32) * np.float32(1.0 / (1 << 53))


def value_noise(x: np.ndarray, y: np.ndarray, seed: int) -> np.ndarray:
    """Smooth value noise in [0, 1) at continuous coordinates (x, y)."""
    x0 = np.floor(x)
    y0 = np.floor(y)
    fx = (x - x0).astype(np.float32)
    fy = (y - y0).astype(np.float32)
    ix = x0.astype(np.int64)
    iy = y0.astype(np.int64)
    # smoothstep interpolation weights
    sx = fx * fx * (3.0 - 2.0 * fx)
    sy = fy * fy * (3.0 - 2.0 * fy)
    v00 = _hash_lattice(ix, iy, seed)
    v10 = _hash_lattice(ix + 1, iy, seed)
    v01 = _hash_lattice(ix, iy + 1, seed)
    v11 = _hash_lattice(ix + 1, iy + 1, seed)
    top = v00 + sx * (v10 - v00)
    bot = v01 + sx * (v11 - v01)
    return top + sy * (bot - top)


def fbm(x: np.ndarray, y: np.ndarray, seed: int, octaves: int = 3, gain: float = 0.5) -> np.ndarray:
    """Fractal sum of value-noise octaves, normalized to [0, 1)."""
    total = np.zeros(np.broadcast(x, y).shape, dtype=np.float32)
    amp = 1.0
    norm = 0.0
    freq = 1.0
    for o in range(octaves):
        total += amp * value_noise(x * freq, y * freq, seed + o * 1013)
        norm += amp
        amp *= gain
        freq *= 2.0
    return total / np.float32(norm)
