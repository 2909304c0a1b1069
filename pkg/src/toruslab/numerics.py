"""Shared numeric helpers: compensated sums, memory guards, slope fits."""

from __future__ import annotations

import math

import numpy as np

TWO_PI = 2.0 * math.pi

#: default cap on any single dense allocation (bytes)
DEFAULT_MEMORY_CAP = 1 << 30


class MemoryCapExceeded(RuntimeError):
    """A requested dense array would exceed the configured memory cap."""


def check_memory(n_items: int, itemsize: int, cap: int = DEFAULT_MEMORY_CAP) -> None:
    need = int(n_items) * int(itemsize)
    if need > cap:
        raise MemoryCapExceeded(
            f"allocation of {need} bytes exceeds cap of {cap} bytes"
        )


def csum(values: np.ndarray) -> complex:
    """Compensated complex sum.

    Uses math.fsum (exact rounding) for small arrays and numpy's pairwise
    reduction for large ones, so error stays far below 1e-12 relative even
    for sums with 1e6+ terms.
    """
    arr = np.asarray(values)
    if arr.size == 0:
        return 0.0 + 0.0j
    if arr.size <= 65536:
        if np.iscomplexobj(arr):
            return complex(math.fsum(arr.real.ravel()), math.fsum(arr.imag.ravel()))
        return complex(math.fsum(arr.ravel()), 0.0)
    return complex(np.sum(arr))


def rel_err(a: complex, b: complex, floor: float = 0.0) -> float:
    """|a-b| relative to the larger magnitude (optionally floored)."""
    scale = max(abs(a), abs(b), floor)
    if scale == 0.0:
        return 0.0
    return abs(a - b) / scale


def slope_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Least-squares slope and intercept of y against x."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    A = np.vstack([x, np.ones_like(x)]).T
    sol, *_ = np.linalg.lstsq(A, y, rcond=None)
    return float(sol[0]), float(sol[1])


def spread_factor(values) -> float:
    """max/min over positive entries; inf when degenerate."""
    vals = [float(v) for v in values if v > 0]
    if not vals:
        return math.inf
    return max(vals) / min(vals)


_LEGGAUSS_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def leggauss(order: int) -> tuple[np.ndarray, np.ndarray]:
    """Cached Gauss-Legendre nodes/weights on [-1, 1]."""
    got = _LEGGAUSS_CACHE.get(order)
    if got is None:
        got = np.polynomial.legendre.leggauss(order)
        got = (got[0].copy(), got[1].copy())
        _LEGGAUSS_CACHE[order] = got
    return got


def leggauss_on(a: float, b: float, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights mapped to [a, b]."""
    x, w = leggauss(order)
    half = 0.5 * (b - a)
    return a + (x + 1.0) * half, w * half
