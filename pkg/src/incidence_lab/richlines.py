"""k-rich lines and point-line incidences of finite point sets.

The fast path hashes every pair of points by its canonical line, then recounts
the members of each surviving line exactly. :func:`rich_lines_oracle` is the
quadratic-times-linear slow path used to check it.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

import numpy as np

from . import _intkeys
from .exact import CapExceeded, GeometryError, LineKey, canonical_line, collinear, point

DEFAULT_PAIR_CAP = 10**5


class IncidenceReport:
    """Rich lines of a point set, stored column-wise.

    Line ``i`` has ``counts[i]`` member points, namely
    ``points[members[offsets[i]:offsets[i + 1]]]``, ordered along the line.
    Line keys are only materialized on demand, since lattice sweeps produce
    millions of lines.
    """

    def __init__(self, k: int, points: Sequence, offsets: np.ndarray, members: np.ndarray, keys=None):
        self.k = k
        self.points = points
        self.offsets = np.asarray(offsets, dtype=np.int64)
        self.members = np.asarray(members, dtype=np.int64)
        self._keys = keys

    @property
    def counts(self) -> np.ndarray:
        return np.diff(self.offsets)

    @property
    def distinct_lines(self) -> int:
        return len(self.offsets) - 1

    @property
    def total_incidences(self) -> int:
        return int(self.offsets[-1])

    def line_members(self, i: int) -> np.ndarray:
        return self.members[self.offsets[i]:self.offsets[i + 1]]

    def line_points(self, i: int) -> list:
        return [self.points[j] for j in self.line_members(i)]

    @property
    def keys(self) -> list[LineKey]:
        if self._keys is None:
            m, o = self.members, self.offsets
            self._keys = [canonical_line(self.points[m[o[i]]], self.points[m[o[i] + 1]])
                          for i in range(self.distinct_lines)]
        return self._keys

    @property
    def lines(self) -> dict[LineKey, int]:
        return dict(zip(self.keys, (int(c) for c in self.counts)))

    def to_json(self) -> dict:
        order = sorted(range(self.distinct_lines), key=lambda i: self.keys[i])
        counts = self.counts
        return {
            "k": self.k,
            "distinct_lines": self.distinct_lines,
            "incidences": self.total_incidences,
            "lines": [dict(self.keys[i].to_json(), count=int(counts[i])) for i in order],
        }

    def summary_row(self) -> dict:
        return {"N": len(self.points), "k": self.k,
                "distinct_lines": self.distinct_lines, "incidences": self.total_incidences}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _prepare(points: Iterable, k: int) -> list:
    if k < 2:
        raise GeometryError(f"richness threshold must be >= 2, got {k}")
    pts = [point(p) for p in points]
    if len(set(pts)) != len(pts):
        raise GeometryError("duplicate input points")
    if pts and len({len(p) for p in pts}) != 1:
        raise GeometryError("points of mixed dimension")
    return pts


def _empty(k, pts) -> IncidenceReport:
    return IncidenceReport(k, pts, np.zeros(1, np.int64), np.zeros(0, np.int64), keys=[])


def _order_along(pts, key: LineKey, idx: list[int]) -> list[int]:
    return sorted(idx, key=lambda j: sum(Fraction(c) * v for c, v in zip(pts[j], key.direction)))


def _from_mapping(k, pts, groups: dict[LineKey, list[int]]) -> IncidenceReport:
    keys = sorted(groups)
    offsets = [0]
    members = []
    for key in keys:
        members.extend(_order_along(pts, key, groups[key]))
        offsets.append(len(members))
    return IncidenceReport(k, pts, np.array(offsets), np.array(members, dtype=np.int64), keys=keys)


def _enumerate_python(pts, k) -> IncidenceReport:
    groups: dict[LineKey, set[int]] = {}
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            s = groups.setdefault(canonical_line(pts[i], pts[j]), set())
            s.add(i)
            s.add(j)
    return _from_mapping(k, pts, {key: list(v) for key, v in groups.items() if len(v) >= k})


def enumerate_rich_lines(points: Iterable, k: int, pair_cap: int | None = DEFAULT_PAIR_CAP) -> IncidenceReport:
    """All lines containing at least ``k`` of the given distinct points.

    Pairs are hashed by canonical line; each surviving line's members are
    then collected as the union of its pairs' endpoints, so no pair
    multiplicity ``C(c, 2)`` is ever inverted.
    """
    pts = _prepare(points, k)
    n = len(pts)
    pairs = n * (n - 1) // 2
    if pair_cap is not None and pairs > pair_cap:
        raise CapExceeded("pair", pair_cap, pairs)
    if n < k:
        return _empty(k, pts)
    conv = _intkeys.integer_coords(pts)
    packer = _intkeys.RowPacker.for_points(conv[0]) if conv else None
    if packer is None or not packer.ok:
        return _enumerate_python(pts, k)
    P = conv[0]

    codes, first_i, first_j = [], [], []
    for i in range(n - 1):
        dirs = _intkeys.normalize_directions(P[i + 1:] - P[i])
        rows = _intkeys.key_rows(np.broadcast_to(P[i], dirs.shape), dirs)
        codes.append(packer.pack(rows))
        first_i.append(np.full(n - 1 - i, i, dtype=np.int32))
        first_j.append(np.arange(i + 1, n, dtype=np.int32))
    codes = np.concatenate(codes)
    pi = np.concatenate(first_i)
    pj = np.concatenate(first_j)
    del first_i, first_j

    _, inv, mult = np.unique(codes, return_inverse=True, return_counts=True)
    del codes
    # a line with c >= k members carries C(c, 2) >= C(k, 2) pairs
    keep = mult[inv] >= comb(k, 2)
    inv, pi, pj = inv[keep], pi[keep], pj[keep]
    if len(inv) == 0:
        return _empty(k, pts)

    # exact member recount: distinct (line, point) incidences
    inc = np.unique(np.concatenate([inv * n + pi, inv * n + pj]))
    lid, pid = np.divmod(inc, n)
    counts = np.bincount(lid)
    rich = counts >= k
    lid_keep = rich[lid]
    lid, pid = lid[lid_keep], pid[lid_keep]
    new_id = np.cumsum(rich) - 1
    lid = new_id[lid]

    # order members along each line by projection on the line direction
    first = np.searchsorted(lid, np.arange(rich.sum()))
    rep_a, rep_b = pid[first], pid[first + 1]
    dirs = _intkeys.normalize_directions(P[rep_b] - P[rep_a])
    t = (P[pid] * dirs[lid]).sum(axis=1)
    order = np.lexsort((t, lid))
    members = pid[order]
    offsets = np.concatenate([[0], np.cumsum(np.bincount(lid, minlength=int(rich.sum())))])
    return IncidenceReport(k, pts, offsets, members)


def rich_lines_oracle(points: Iterable, k: int) -> IncidenceReport:
    """Slow reference: for every pair scan all points with the collinearity predicate.

    A line is emitted once, by the pair of its two lowest-index members, so no
    hashing of lines is involved.
    """
    pts = _prepare(points, k)
    n = len(pts)
    groups = {}
    for i in range(n):
        for j in range(i + 1, n):
            p, q = pts[i], pts[j]
            # a collinear point before j means a lower pair owns this line
            if any(collinear(p, q, pts[m]) for m in range(j) if m != i):
                continue
            members = [i, j] + [m for m in range(j + 1, n) if collinear(p, q, pts[m])]
            if len(members) >= k:
                groups[canonical_line(pts[i], pts[j])] = members
    return _from_mapping(k, pts, groups)


def incidences_per_line(points: Iterable, lines: Iterable[LineKey]) -> np.ndarray:
    """Number of the given points on each line, in line order."""
    pts = [point(p) for p in points]
    lines = list(lines)
    out = np.zeros(len(lines), np.int64)
    if not pts or not lines:
        return out
    conv = _intkeys.integer_coords(pts + [ln.basepoint for ln in lines])
    if conv is not None:
        allc = conv[0]
        P, B = allc[:len(pts)], allc[len(pts):]
        D = np.array([ln.direction for ln in lines], dtype=np.int64)
        packer = _intkeys.RowPacker.for_keys(int(np.abs(D).max()), int(np.abs(allc).max()), D.shape[1])
        if packer.ok:
            by_dir: dict[tuple, list[int]] = {}
            for i, ln in enumerate(lines):
                by_dir.setdefault(ln.direction, []).append(i)
            for d, idx in by_dir.items():
                idx = np.array(idx)
                line_codes = packer.pack(_intkeys.key_rows(B[idx], D[idx]))
                uniq, inv = np.unique(line_codes, return_inverse=True)
                dirs = np.broadcast_to(np.array(d, dtype=np.int64), P.shape)
                pt_codes = packer.pack(_intkeys.key_rows(P, dirs))
                pos = np.minimum(np.searchsorted(uniq, pt_codes), len(uniq) - 1)
                hits = np.bincount(pos[uniq[pos] == pt_codes], minlength=len(uniq))
                out[idx] = hits[inv.ravel()]
            return out
    for i, ln in enumerate(lines):
        out[i] = sum(1 for p in pts if ln.contains(p))
    return out


def count_incidences(points: Iterable, lines: Iterable[LineKey]) -> int:
    """Number of (point, line) pairs with the point on the line; repeated lines count once."""
    return int(incidences_per_line(points, list(dict.fromkeys(lines))).sum())


@dataclass(frozen=True)
class StRatio:
    """Measured ratio ``I / (n^(2/3) m^(2/3) + n + m)``; the normalizer is inexact."""

    incidences: int
    n_points: int
    n_lines: int
    normalizer: float
    ratio: float


def st_bound_ratio(points2d: Iterable, lines2d: Iterable[LineKey]) -> StRatio:
    """Planar incidence count relative to the Szemeredi-Trotter bound (a measurement)."""
    pts = [point(p) for p in points2d]
    lines = list(dict.fromkeys(lines2d))
    if any(len(p) != 2 for p in pts) or any(ln.dim != 2 for ln in lines):
        raise GeometryError("st_bound_ratio expects planar points and lines")
    n, m = len(pts), len(lines)
    incid = count_incidences(pts, lines)
    norm = (n * m) ** (2 / 3) + n + m
    return StRatio(incid, n, m, norm, incid / norm if norm else 0.0)
