"""Seeded random stream shared by the Python API and the numba kernels.

The generator is SplitMix64 (Steele, Lea & Flood 2014; reference code by
S. Vigna).  Its whole state is one unsigned 64-bit word kept in a length-1
``np.uint64`` array, so jitted kernels can draw from the same stream the
Python wrapper hands them without copying.

Derived draws:

* ``uniform_real(lo, hi)``: top 53 bits scaled to ``[0, 1)``, then affine.
* ``uniform_int(lo, hi)``: unbiased rejection on the low end
  (threshold ``(2**64 - n) % n``), then ``lo + r % n``.
* ``shuffle``: Fisher-Yates from the last index down, ``j = uniform_int(0, i)``.
"""

from __future__ import annotations

import numba as nb
import numpy as np

GOLDEN_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_INV53 = 1.0 / 9007199254740992.0  # 2**-53
_MASK64 = (1 << 64) - 1


class ParameterError(ValueError):
    """Raised for an invalid draw range."""


@nb.njit(cache=True)
def mix64(z):
    z = (z ^ (z >> _S30)) * _MIX1
    z = (z ^ (z >> _S27)) * _MIX2
    return z ^ (z >> _S31)


@nb.njit(cache=True)
def next_u64(state):
    state[0] = state[0] + GOLDEN_GAMMA
    return mix64(state[0])


@nb.njit(cache=True)
def next_float(state):
    return np.float64(next_u64(state) >> _S11) * _INV53


@nb.njit(cache=True)
def draw_real(state, lo, hi):
    v = lo + (hi - lo) * next_float(state)
    if v >= hi:
        return lo
    return v


@nb.njit(cache=True)
def draw_int(state, lo, hi):
    n = np.uint64(hi - lo) + np.uint64(1)
    if n == np.uint64(0):
        # full 64-bit range
        return lo + np.int64(next_u64(state))
    threshold = (np.uint64(0) - n) % n
    r = next_u64(state)
    while r < threshold:
        r = next_u64(state)
    return lo + np.int64(r % n)


@nb.njit(cache=True)
def shuffle_inplace(state, arr):
    # 1-D only: on 2-D input the row swap below would go through a view
    for i in range(arr.shape[0] - 1, 0, -1):
        j = draw_int(state, 0, i)
        tmp = arr[i]
        arr[i] = arr[j]
        arr[j] = tmp


@nb.njit(cache=True)
def permutation(state, n):
    out = np.arange(n)
    shuffle_inplace(state, out)
    return out


def derive_seed(base_seed: int, index: int) -> int:
    """Mix a base seed with a point index into a run seed.

    ``run_seed = mix64((base_seed + (index + 1) * GOLDEN_GAMMA) mod 2**64)``.
    """
    z = (int(base_seed) + (int(index) + 1) * int(GOLDEN_GAMMA)) & _MASK64
    return int(mix64(np.uint64(z)))


class RngStream:
    """An infinite, seeded SplitMix64 stream.

    >>> a, b = RngStream(42), RngStream(42)
    >>> [a.uniform_int(1, 6) for _ in range(5)] == [b.uniform_int(1, 6) for _ in range(5)]
    True
    """

    def __init__(self, seed: int):
        if seed < 0 or seed > _MASK64:
            raise ParameterError(f"seed must be an unsigned 64-bit integer, got {seed}")
        self.seed = int(seed)
        self.state = np.array([seed], dtype=np.uint64)

    def next_u64(self) -> int:
        return int(next_u64(self.state))

    def uniform_real(self, lo: float, hi: float) -> float:
        if lo > hi:
            raise ParameterError(f"uniform_real: lo={lo} > hi={hi}")
        if lo == hi:
            return float(lo)
        return float(draw_real(self.state, float(lo), float(hi)))

    def uniform_int(self, lo: int, hi: int) -> int:
        if lo > hi:
            raise ParameterError(f"uniform_int: lo={lo} > hi={hi}")
        return int(draw_int(self.state, int(lo), int(hi)))

    def shuffle(self, items: list) -> None:
        """Shuffle ``items`` in place (Fisher-Yates)."""
        for i in range(len(items) - 1, 0, -1):
            j = self.uniform_int(0, i)
            items[i], items[j] = items[j], items[i]

    def permutation(self, n: int) -> np.ndarray:
        return permutation(self.state, n)

    def getstate(self) -> int:
        return int(self.state[0])

    def __repr__(self):
        return f"RngStream(seed={self.seed}, state={self.getstate():#018x})"
