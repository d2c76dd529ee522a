"""Vectorized integer line keys.

For an integer point ``p`` and a primitive direction ``d`` whose first nonzero
entry ``d[i] > 0``, the row ``(d, d[i] * p - p[i] * d)`` identifies the line
exactly (its second half is ``d[i]`` times the canonical basepoint). Rows are
packed into single int64 codes by mixed radix when the a-priori bounds allow.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd

import numpy as np

# coordinates above this magnitude go to the pure-Python paths
INT_SAFE = 1 << 28
_PACK_LIMIT = 1 << 62


def integer_coords(points) -> tuple[np.ndarray, int] | None:
    """Return (int64 array, scale) with ``array == scale * points``, or None if too large."""
    den = 1
    for p in points:
        for c in p:
            if isinstance(c, Fraction) and c.denominator != 1:
                den = den * c.denominator // gcd(den, c.denominator)
    rows = [[int(c * den) for c in p] for p in points]
    if any(abs(c) > INT_SAFE for r in rows for c in r):
        return None
    arr = np.array(rows, dtype=np.int64)
    if arr.ndim == 1:
        arr = arr.reshape(len(rows), -1)
    return arr, den


def normalize_directions(diff: np.ndarray) -> np.ndarray:
    """Primitive, sign-normalized copies of the nonzero integer rows of ``diff``."""
    g = np.gcd.reduce(diff, axis=1)
    d = diff // g[:, None]
    lead = (d != 0).argmax(axis=1)
    sign = np.sign(d[np.arange(len(d)), lead])
    return d * sign[:, None]


def key_rows(base: np.ndarray, dirs: np.ndarray) -> np.ndarray:
    """Rows ``[d | d[i] * p - p[i] * d]`` for normalized ``dirs`` through ``base``."""
    lead = (dirs != 0).argmax(axis=1)
    idx = np.arange(len(dirs))
    q = dirs[idx, lead][:, None] * base - base[idx, lead][:, None] * dirs
    return np.concatenate([dirs, q], axis=1)


class RowPacker:
    """Mixed-radix packing of key rows with per-column bounds ``[-bound, bound]``."""

    def __init__(self, bounds):
        self.bounds = np.asarray(bounds, dtype=np.int64)
        radix = [2 * int(b) + 1 for b in bounds]
        total = 1
        mult = []
        for r in radix:
            mult.append(total)
            total *= r
        self.ok = total < _PACK_LIMIT
        self.mult = np.array(mult if self.ok else [0] * len(radix), dtype=np.int64)

    @classmethod
    def for_points(cls, coords: np.ndarray) -> "RowPacker":
        span = (coords.max(axis=0) - coords.min(axis=0)) if len(coords) else np.zeros(coords.shape[1], np.int64)
        big = int(np.abs(coords).max()) if len(coords) else 0
        dmax = int(span.max()) if len(span) else 0
        qb = 2 * dmax * big
        return cls([int(s) for s in span] + [qb] * coords.shape[1])

    @classmethod
    def for_keys(cls, dir_bound: int, coord_bound: int, d: int) -> "RowPacker":
        return cls([dir_bound] * d + [2 * dir_bound * coord_bound] * d)

    def pack(self, rows: np.ndarray) -> np.ndarray:
        return ((rows + self.bounds) * self.mult).sum(axis=1)


def group_codes(codes: np.ndarray):
    """``np.unique`` with first index, inverse and counts."""
    return np.unique(codes, return_index=True, return_inverse=True, return_counts=True)


def group_rows(rows: np.ndarray, packer: RowPacker | None = None):
    """Group identical rows; returns (first_index, inverse, counts) in a deterministic order."""
    if packer is not None and packer.ok:
        _, first, inv, counts = group_codes(packer.pack(rows))
        return first, inv.ravel(), counts
    _, first, inv, counts = np.unique(rows, axis=0, return_index=True, return_inverse=True, return_counts=True)
    return first, inv.ravel(), counts


def popcount_hamming(packed: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamming distances between bit-packed sign rows ``packed[a]`` and ``packed[b]``."""
    x = np.bitwise_xor(packed[a], packed[b])
    return np.bitwise_count(x).sum(axis=1, dtype=np.int64)


def pack_signs(positive: np.ndarray) -> np.ndarray:
    """Pack a boolean (rows x planes) matrix into uint64 words per row."""
    rows, cols = positive.shape
    words = max(1, -(-cols // 64))
    out = np.zeros((rows, words), dtype=np.uint64)
    for c in range(cols):
        w, bit = divmod(c, 64)
        out[:, w] |= positive[:, c].astype(np.uint64) << np.uint64(bit)
    return out
