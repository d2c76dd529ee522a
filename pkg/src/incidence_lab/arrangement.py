"""Cells of line/plane arrangements and the distance structures on them.

A cell is identified by its sign vector, stored as an int bitmask (bit ``i``
set means the positive side of plane ``i``). Cells are found by breadth-first
search over single sign flips. A flip across plane ``i`` is admitted iff that
plane carries a facet of the current cell, decided by exact Fourier-Motzkin
elimination restricted to the plane; the facet point, pushed off the plane,
is the new cell's witness.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, gcd
from typing import Sequence

import numpy as np

from .exact import (CapExceeded, GeometryError, Hyperplane, _norm_scalar, _rank, det,
                    general_position_check, plane_side)

DEFAULT_PLANE_CAP = 16


# -- exact feasibility -------------------------------------------------------

def _normalize_row(row):
    g = 0
    for v in row:
        g = gcd(g, v)
    return tuple(v // g for v in row) if g > 1 else tuple(row)


def _prune(rows, var_count):
    """Drop trivially true constant rows; keep only the tightest offset per coefficient vector.

    Returns None if a constant row is violated.
    """
    best: dict[tuple, int] = {}
    for r in rows:
        r = _normalize_row(r)
        coef, b = r[:var_count], r[var_count]
        if not any(coef):
            if b <= 0:
                return None
            continue
        if coef not in best or b < best[coef]:
            best[coef] = b
    return [c + (b,) for c, b in best.items()]


def _pick(lower, upper):
    if lower is None and upper is None:
        return Fraction(0)
    if upper is None:
        return lower + 1
    if lower is None:
        return upper - 1
    return (lower + upper) / 2


def strict_feasible(rows: Sequence[Sequence[int]], d: int):
    """Interior point of ``{x : a . x + b > 0 for every row (a, b)}``, or None.

    Variables are eliminated in order x_0, ..., x_{d-1}; back-substitution
    picks the midpoint of each resulting open interval (``+-1`` past a missing
    side).
    """
    cur = _prune([tuple(int(v) for v in r) for r in rows], d)
    if cur is None:
        return None
    systems = [cur]
    for var in range(d):
        pos = [r for r in cur if r[var] > 0]
        neg = [r for r in cur if r[var] < 0]
        nxt = [r for r in cur if r[var] == 0]
        for p in pos:
            for q in neg:
                nxt.append(tuple(-q[var] * a + p[var] * b for a, b in zip(p, q)))
        cur = _prune(nxt, d)
        if cur is None:
            return None
        systems.append(cur)
    x = [Fraction(0)] * d
    for var in reversed(range(d)):
        lower = upper = None
        for r in systems[var]:
            a = r[var]
            if a == 0:
                continue
            rest = r[d] + sum(r[j] * x[j] for j in range(var + 1, d))
            bound = Fraction(-rest, 1) / a
            if a > 0:
                lower = bound if lower is None else max(lower, bound)
            else:
                upper = bound if upper is None else min(upper, bound)
        if lower is not None and upper is not None and not lower < upper:
            return None  # unreachable for an exact projection
        x[var] = _pick(lower, upper)
    return tuple(_norm_scalar(v) for v in x)


def _rows(planes: Sequence[Hyperplane], mask: int):
    rows = []
    for i, h in enumerate(planes):
        s = 1 if (mask >> i) & 1 else -1
        rows.append(tuple(s * a for a in h.normal) + (s * h.offset,))
    return rows


def facet_point(planes: Sequence[Hyperplane], mask: int, i: int):
    """A point of plane ``i`` strictly inside all other half-spaces of the cell ``mask``, or None.

    Solved as a feasibility problem in ``d - 1`` variables by substituting
    the lead variable of plane ``i``.
    """
    h = planes[i]
    d = h.dim
    a, b = h.normal, h.offset
    j = next(c for c, v in enumerate(a) if v != 0)
    keep = [c for c in range(d) if c != j]
    reduced = []
    for r in _rows([p for l, p in enumerate(planes) if l != i],
                   _drop_bit(mask, i)):
        coef = [a[j] * r[c] - r[j] * a[c] for c in keep]
        reduced.append(tuple(coef) + (a[j] * r[d] - r[j] * b,))
    sub = strict_feasible(reduced, d - 1)
    if sub is None:
        return None
    x = [Fraction(0)] * d
    for c, v in zip(keep, sub):
        x[c] = Fraction(v)
    x[j] = -(b + sum(a[c] * x[c] for c in keep)) / a[j]
    return tuple(x)


def _drop_bit(mask: int, i: int) -> int:
    low = mask & ((1 << i) - 1)
    return low | ((mask >> (i + 1)) << i)


def _push_off(planes, mask, f, i):
    """Move the facet point ``f`` off plane ``i`` into the side given by ``mask``."""
    n = planes[i].normal
    s = 1 if (mask >> i) & 1 else -1
    eps = Fraction(1)
    for l, row in enumerate(_rows(planes, mask)):
        if l == i:
            continue
        g = sum(c * x for c, x in zip(row, f)) + row[-1]
        slope = s * sum(c * v for c, v in zip(row, n))
        if slope < 0:
            eps = min(eps, g / (-2 * slope))
    return tuple(_norm_scalar(x + s * eps * v) for x, v in zip(f, n))


def _as_mask(signs, m: int) -> int:
    if isinstance(signs, int):
        return signs
    if isinstance(signs, str):
        signs = [1 if c == "+" else -1 for c in signs]
    signs = list(signs)
    if len(signs) != m or any(s not in (1, -1) for s in signs):
        raise GeometryError("sign vector must have one +-1 entry per plane")
    return sum(1 << i for i, s in enumerate(signs) if s > 0)


def feasible(planes: Sequence[Hyperplane], signs):
    """Exact interior witness of the open cell with the given sign vector, or None."""
    planes = list(planes)
    d = planes[0].dim if planes else 0
    if d not in (2, 3):
        raise GeometryError("feasibility is implemented for d in {2, 3}")
    return strict_feasible(_rows(planes, _as_mask(signs, len(planes))), d)


def mask_to_str(mask: int, m: int) -> str:
    return "".join("+" if (mask >> i) & 1 else "-" for i in range(m))


# -- arrangement --------------------------------------------------------------

@dataclass
class Cell:
    index: int
    mask: int
    witness: tuple
    level: int | None = None

    def signs(self, m: int) -> str:
        return mask_to_str(self.mask, m)


@dataclass
class NeighborhoodStats:
    """Per-cell neighborhood sizes and incident-plane counts for one radius."""

    rho: int
    ball_sizes: np.ndarray
    incident_planes: np.ndarray

    @property
    def sum_ball(self) -> int:
        return int(self.ball_sizes.sum())

    @property
    def sum_incident(self) -> int:
        return int(self.incident_planes.sum())

    @property
    def max_ball(self) -> int:
        return int(self.ball_sizes.max()) if len(self.ball_sizes) else 0

    @property
    def edges(self) -> int:
        return (self.sum_ball - len(self.ball_sizes)) // 2


def _seed_point(planes, d):
    for den in itertools.count(2):
        for nums in itertools.product(range(-den, den + 1), repeat=d):
            p = tuple(Fraction(nu, den) + Fraction(i + 1, 7 * den * den) for i, nu in enumerate(nums))
            if all(h.evaluate(p) != 0 for h in planes):
                return tuple(_norm_scalar(c) for c in p)


class ArrangementIndex:
    """All cells of the arrangement of ``planes`` with their flip adjacency."""

    def __init__(self, planes: Sequence[Hyperplane], cap: int = DEFAULT_PLANE_CAP):
        planes = list(planes)
        if not planes:
            raise GeometryError("empty arrangement")
        d = planes[0].dim
        if d not in (2, 3) or any(h.dim != d for h in planes):
            raise GeometryError("arrangements are supported in d in {2, 3} with uniform dimension")
        if len(set(planes)) != len(planes):
            raise GeometryError("duplicate planes")
        if len(planes) > cap:
            raise CapExceeded("plane", cap, len(planes))
        self.planes = planes
        self.d = d
        self.m = len(planes)
        self.cells: list[Cell] = []
        self.by_mask: dict[int, int] = {}
        self.adjacency: list[list[tuple[int, int]]] = []
        self.facets: list[int] = []
        self._build()

    def _add(self, mask, witness) -> int:
        idx = len(self.cells)
        self.cells.append(Cell(idx, mask, witness))
        self.by_mask[mask] = idx
        self.adjacency.append([])
        self.facets.append(0)
        return idx

    def _build(self):
        seed = _seed_point(self.planes, self.d)
        mask = sum(1 << i for i, h in enumerate(self.planes) if plane_side(h, seed) > 0)
        self._add(mask, seed)
        infeasible = set()
        queue = deque([0])
        while queue:
            ci = queue.popleft()
            mask = self.cells[ci].mask
            for i in range(self.m):
                t = mask ^ (1 << i)
                nj = self.by_mask.get(t)
                if nj is None:
                    if t in infeasible:
                        continue
                    # t is a cell iff plane i carries a facet of the current cell
                    f = facet_point(self.planes, mask, i)
                    if f is None:
                        infeasible.add(t)
                        continue
                    nj = self._add(t, _push_off(self.planes, t, f, i))
                    queue.append(nj)
                if not (self.facets[ci] >> i) & 1:
                    self.facets[ci] |= 1 << i
                    self.adjacency[ci].append((i, nj))
                if not (self.facets[nj] >> i) & 1:
                    self.facets[nj] |= 1 << i
                    self.adjacency[nj].append((i, ci))

    def __len__(self):
        return len(self.cells)

    # distances -------------------------------------------------------------

    def cell_distance(self, a: int, b: int) -> int:
        """Number of planes separating cells ``a`` and ``b``."""
        return (self.cells[a].mask ^ self.cells[b].mask).bit_count()

    def _bfs(self, sources, rho: int) -> list[int]:
        seen = {s: 0 for s in sources}
        queue = deque(sources)
        while queue:
            c = queue.popleft()
            if seen[c] == rho:
                continue
            for _, nb in self.adjacency[c]:
                if nb not in seen:
                    seen[nb] = seen[c] + 1
                    queue.append(nb)
        return sorted(seen)

    def neighborhood(self, c: int, rho: int) -> list[int]:
        """Cells at distance at most ``rho`` from ``c``, including ``c``."""
        if rho < 0:
            raise GeometryError("rho must be non-negative")
        return self._bfs([c], rho)

    def _plane_index(self, h) -> int:
        if isinstance(h, int):
            if not 0 <= h < self.m:
                raise GeometryError(f"plane index {h} out of range")
            return h
        try:
            return self.planes.index(h)
        except ValueError:
            raise GeometryError(f"{h!r} is not a plane of this arrangement") from None

    def zone(self, h) -> list[int]:
        """Cells with a facet on ``h``."""
        i = self._plane_index(h)
        return [c for c in range(len(self.cells)) if (self.facets[c] >> i) & 1]

    def rho_zone(self, h, rho: int) -> list[int]:
        """Cells within distance ``rho`` of some cell of the zone of ``h``."""
        return self._bfs(self.zone(h), rho)

    # levels ------------------------------------------------------------------

    def _check_vertical(self):
        for h in self.planes:
            if h.normal[-1] == 0:
                raise GeometryError(f"{h!r} is vertical; levels are undefined")

    def level(self, c: int) -> int:
        """Number of planes strictly below the cell, by a downward ray from its witness."""
        self._check_vertical()
        cell = self.cells[c]
        if cell.level is None:
            w = cell.witness
            below = 0
            for h in self.planes:
                # height of h above the witness's projection
                z = -(sum(a * x for a, x in zip(h.normal[:-1], w[:-1])) + h.offset) / Fraction(h.normal[-1])
                if z < w[-1]:
                    below += 1
            cell.level = below
        return cell.level

    def level_from_signs(self, c: int) -> int:
        """Level read off the sign vector: plane below iff the cell is on its upper side."""
        self._check_vertical()
        mask = self.cells[c].mask
        return sum(1 for i, h in enumerate(self.planes) if ((mask >> i) & 1) == (h.normal[-1] > 0))

    def cells_at_level_le(self, rho: int) -> list[int]:
        return [c for c in range(len(self.cells)) if self.level(c) <= rho]

    # short-distance graph ---------------------------------------------------

    def short_distance_graph(self, rho: int) -> NeighborhoodStats:
        """|B_rho| and incident-plane counts n_j for every cell."""
        if rho < 1:
            raise GeometryError("rho must be at least 1")
        sizes = np.zeros(len(self.cells), np.int64)
        incident = np.zeros(len(self.cells), np.int64)
        for c in range(len(self.cells)):
            ball = self.neighborhood(c, rho)
            sizes[c] = len(ball)
            planes = 0
            for b in ball:
                planes |= self.facets[b]
            incident[c] = planes.bit_count()
        return NeighborhoodStats(rho, sizes, incident)

    def close_pairs_bruteforce(self, rho: int) -> int:
        """Unordered pairs of distinct cells at Hamming distance <= rho (all-pairs check)."""
        masks = np.array([c.mask for c in self.cells], dtype=np.uint64)
        total = 0
        for i in range(len(masks) - 1):
            dist = np.bitwise_count(masks[i + 1:] ^ masks[i])
            total += int((dist <= rho).sum())
        return total

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "planes": [{"normal": list(h.normal), "offset": h.offset} for h in self.planes],
            "cells": [{"signs": c.signs(self.m), "witness": [str(x) for x in c.witness]} for c in self.cells],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def enumerate_cells(planes: Sequence[Hyperplane], cap: int = DEFAULT_PLANE_CAP) -> ArrangementIndex:
    return ArrangementIndex(planes, cap)


def cell_count_formula(n: int, d: int) -> int:
    """Cells of a simple arrangement of n hyperplanes in R^d."""
    return sum(comb(n, i) for i in range(d + 1))


def random_generic_planes(n: int, d: int = 3, seed: int = 0, coef: int = 50) -> list[Hyperplane]:
    """Seeded random planes in general position with no vertical member.

    Normals are drawn from ``[-coef, coef]^d``, offsets from ``[-coef, coef]``
    (numpy PCG64 via ``default_rng(seed)``); a candidate is rejected if it
    breaks general position with the planes already accepted.
    """
    rng = np.random.default_rng(seed)
    planes: list[Hyperplane] = []
    while len(planes) < n:
        row = [int(v) for v in rng.integers(-coef, coef + 1, size=d + 1)]
        if row[d - 1] == 0:
            continue
        h = Hyperplane(tuple(row[:d]), row[d])
        if h in planes or not _extends_general_position(planes, h, d):
            continue
        planes.append(h)
    return planes


def _extends_general_position(planes, h, d) -> bool:
    new = len(planes)
    allp = planes + [h]
    size = min(len(allp), d)
    for idx in itertools.combinations(range(new), size - 1):
        if _rank([allp[i].normal for i in idx + (new,)]) < size:
            return False
    for idx in itertools.combinations(range(new), d):
        sub = [allp[i] for i in idx + (new,)]
        if det([p.normal + (p.offset,) for p in sub]) == 0:
            return False
    return True


def is_generic(planes: Sequence[Hyperplane]) -> bool:
    return general_position_check(planes, planes[0].dim).passed
