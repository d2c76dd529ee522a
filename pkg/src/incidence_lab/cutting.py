"""Cuttings into singletons and the segment-cutting checks built on them.

Points are compared through their sign vectors with respect to the cutting:
for points off every plane, the number of planes crossing the segment between
two points is the Hamming distance of their sign vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Iterable, Sequence

import numpy as np

from . import _intkeys
from .exact import GeometryError, Hyperplane, LineKey, point
from .lattice import LatticeSpec
from .richlines import DEFAULT_PAIR_CAP, IncidenceReport, enumerate_rich_lines, incidences_per_line


class PreconditionError(GeometryError):
    """The supplied cutting does not cut the point set into singletons."""


def _iroot(N: int, d: int):
    r = round(N ** (1 / d))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c**d == N:
            return c
    return N ** (1 / d)


@dataclass(frozen=True)
class Cutting:
    planes: tuple[Hyperplane, ...]
    n_points: int
    d: int

    def __len__(self):
        return len(self.planes)

    @property
    def constant_C(self):
        """``|planes| / N^(1/d)``; exact when N is a perfect d-th power."""
        root = _iroot(self.n_points, self.d)
        if isinstance(root, int):
            return Fraction(len(self.planes), root) if root else Fraction(0)
        return len(self.planes) / root


def grid_cutting(spec: LatticeSpec) -> Cutting:
    """The planes ``x_i = j + 1/2`` separating ``{1..n}^d`` into singletons."""
    if spec.n < 2:
        raise GeometryError("grid cutting needs n >= 2")
    planes = []
    for i in range(spec.d):
        for j in range(1, spec.n):
            normal = [0] * spec.d
            normal[i] = 2
            planes.append(Hyperplane(tuple(normal), -(2 * j + 1)))
    return Cutting(tuple(planes), spec.size, spec.d)


def sign_matrix(points: Sequence, planes: Sequence[Hyperplane]) -> np.ndarray:
    """Exact signs (int8) of every plane's linear form at every point."""
    pts = [point(p) for p in points]
    if not planes:
        return np.zeros((len(pts), 0), np.int8)
    conv = _intkeys.integer_coords(pts)
    if conv is not None and pts:
        P, den = conv
        Nm = np.array([h.normal for h in planes], dtype=object)
        off = np.array([h.offset for h in planes], dtype=object)
        bound = int(np.abs(P).max()) * int(np.abs(Nm).sum(axis=1).max()) + den * int(np.abs(off).max())
        if bound < 1 << 62:
            vals = P @ Nm.astype(np.int64).T + den * off.astype(np.int64)
            return np.sign(vals).astype(np.int8)
    out = np.zeros((len(pts), len(planes)), np.int8)
    for i, p in enumerate(pts):
        for j, h in enumerate(planes):
            v = h.evaluate(p)
            out[i, j] = (v > 0) - (v < 0)
    return out


@dataclass
class CuttingVerdict:
    passed: bool
    on_plane: tuple | None = None
    collision: tuple | None = None

    def certificate(self) -> dict:
        if self.passed:
            return {"verdict": "PASS"}
        if self.on_plane is not None:
            p, h = self.on_plane
            return {"verdict": "FAIL", "on_plane": {"point": [str(c) for c in p],
                                                    "normal": list(h.normal), "offset": h.offset}}
        p, q = self.collision
        return {"verdict": "FAIL", "same_cell": [[str(c) for c in p], [str(c) for c in q]]}


def is_proper_cutting(points: Sequence, planes: Iterable[Hyperplane]) -> CuttingVerdict:
    """PASS iff no point is on a plane and all sign vectors are distinct."""
    pts = [point(p) for p in points]
    planes = list(planes)
    S = sign_matrix(pts, planes)
    zero = np.argwhere(S == 0)
    if len(zero):
        i, j = zero[0]
        return CuttingVerdict(False, on_plane=(pts[i], planes[j]))
    if len(pts) < 2:
        return CuttingVerdict(True)
    packed = _intkeys.pack_signs(S > 0)
    _, first, inv, counts = np.unique(packed, axis=0, return_index=True, return_inverse=True, return_counts=True)
    inv = inv.ravel()
    dup = np.nonzero(first[inv] != np.arange(len(pts)))[0]
    if len(dup):
        j = dup[0]
        return CuttingVerdict(False, collision=(pts[first[inv[j]]], pts[j]))
    return CuttingVerdict(True)


def _require_proper(points, cutting: Cutting):
    verdict = is_proper_cutting(points, cutting.planes)
    if not verdict.passed:
        raise PreconditionError(f"cutting is not proper: {verdict.certificate()}")


def segment_threshold(n_planes: int, k: int) -> int:
    """rho = ceil(3 n / k)."""
    return ceil(Fraction(3 * n_planes, k))


@dataclass
class SolymosiReport:
    """Per rich line: its point count, cheap consecutive segments and total crossings."""

    k: int
    rho: int
    n_planes: int
    line_counts: np.ndarray
    cheap_segments: np.ndarray
    total_crossings: np.ndarray
    rich: IncidenceReport = field(repr=False)
    segment_pairs: np.ndarray = field(repr=False, default=None)
    segment_crossings: np.ndarray = field(repr=False, default=None)

    @property
    def required(self) -> np.ndarray:
        return -(-self.line_counts // 6)

    @property
    def expensive_segments(self) -> np.ndarray:
        return self.line_counts - 1 - self.cheap_segments

    @property
    def failures(self) -> np.ndarray:
        bad = ((self.cheap_segments < self.required)
               | (self.total_crossings > self.n_planes)
               | (3 * self.expensive_segments > self.k))
        return np.nonzero(bad)[0]

    @property
    def passed(self) -> bool:
        return len(self.failures) == 0


def _consecutive(rich: IncidenceReport):
    """Consecutive member pairs along each line and their line ids."""
    m = rich.members
    if len(m) < 2:
        return np.zeros((0, 2), np.int64), np.zeros(0, np.int64)
    line_of = np.repeat(np.arange(rich.distinct_lines), rich.counts)
    same = line_of[1:] == line_of[:-1]
    pairs = np.stack([m[:-1][same], m[1:][same]], axis=1)
    return pairs, line_of[1:][same]


def solymosi_rich_line_check(points: Sequence, cutting: Cutting, k: int,
                             rich: IncidenceReport | None = None,
                             pair_cap: int | None = DEFAULT_PAIR_CAP) -> SolymosiReport:
    """Crossing counts of consecutive segments along every k-rich line.

    Each line must have at least ``ceil(k_l / 6)`` segments crossed by at most
    ``rho = ceil(3 |H| / k)`` planes, at most ``k / 3`` segments crossed by more,
    and at most ``|H|`` crossings in total.
    """
    if k < 2:
        raise GeometryError("k must be at least 2")
    pts = [point(p) for p in points]
    _require_proper(pts, cutting)
    if rich is None:
        rich = enumerate_rich_lines(pts, k, pair_cap=pair_cap)
    rho = segment_threshold(len(cutting), k)
    packed = _intkeys.pack_signs(sign_matrix(pts, cutting.planes) > 0)
    pairs, line_id = _consecutive(rich)
    cross = _intkeys.popcount_hamming(packed, pairs[:, 0], pairs[:, 1]) if len(pairs) else np.zeros(0, np.int64)
    L = rich.distinct_lines
    cheap = np.bincount(line_id, weights=(cross <= rho), minlength=L).astype(np.int64)
    total = np.bincount(line_id, weights=cross, minlength=L).astype(np.int64)
    return SolymosiReport(k, rho, len(cutting), rich.counts.copy(), cheap, total, rich, pairs, cross)


@dataclass
class IncidenceSweepRecord:
    N: int
    n_planes: int
    k: int
    rho: int
    rich_line_count: int
    incidences: int
    close_pairs: int
    close_pairs_distinct: bool
    solymosi_passed: bool

    @property
    def proof_inequality(self) -> bool:
        """I <= 6 * (close pairs on rich lines)."""
        return self.incidences <= 6 * self.close_pairs

    @property
    def ratio(self) -> Fraction:
        """I * k^3 / N^2."""
        return Fraction(self.incidences * self.k**3, self.N**2) if self.N else Fraction(0)

    @property
    def passed(self) -> bool:
        return self.proof_inequality and self.close_pairs_distinct and self.solymosi_passed


def incidence_bound_sweep(points: Sequence, cutting: Cutting, k: int,
                          pair_cap: int | None = DEFAULT_PAIR_CAP,
                          rich: IncidenceReport | None = None) -> IncidenceSweepRecord:
    """Incidences of the k-rich lines against the close pairs they contribute."""
    sol = solymosi_rich_line_check(points, cutting, k, rich=rich, pair_cap=pair_cap)
    close = sol.segment_pairs[sol.segment_crossings <= sol.rho]
    # one point per cell, so point indices stand for cells
    if len(close):
        lo, hi = close.min(axis=1), close.max(axis=1)
        n = len(sol.rich.points)
        distinct = len(np.unique(lo * n + hi)) == len(close)
    else:
        distinct = True
    return IncidenceSweepRecord(
        N=len(sol.rich.points), n_planes=len(cutting), k=k, rho=sol.rho,
        rich_line_count=sol.rich.distinct_lines, incidences=sol.rich.total_incidences,
        close_pairs=len(close), close_pairs_distinct=distinct, solymosi_passed=sol.passed)


@dataclass
class BootstrapReport:
    N: int
    M: int
    incidences: int
    n_planes: int
    max_cells_met: int
    max_points_on_line: int
    kept_lines: int
    kept_incidences: int

    @property
    def k(self) -> Fraction:
        """Average-richness threshold I / (2M), kept exact."""
        return Fraction(self.incidences, 2 * self.M)

    @property
    def proof_case(self) -> str:
        return "I" if self.k < 2 else "II"

    @property
    def regime(self) -> str:
        """Which branch of the three-case incidence bound the pair (N, M) falls in."""
        if self.M > self.N**2:
            return "M>N^2"
        if self.M**3 > self.N**2:
            return "N^(2/3)<M<=N^2"
        return "M<=N^(2/3)"

    @property
    def ratio_linear(self) -> Fraction:
        return Fraction(self.incidences, self.M)

    @property
    def ratio_middle(self) -> float:
        return self.incidences / (self.N**0.5 * self.M**0.75)

    @property
    def ratio_low(self) -> float:
        return self.incidences / (self.N ** (1 / 3) * self.M)

    @property
    def checks(self) -> dict[str, bool]:
        out = {
            "cells_met<=|H|+1": self.max_cells_met <= self.n_planes + 1,
            "points_per_line<=|H|+1": self.max_points_on_line <= self.n_planes + 1,
            "I<=M(|H|+1)": self.incidences <= self.M * (self.n_planes + 1),
            # discarding lines with fewer than k points loses fewer than M k = I/2 incidences
            "kept>=I/2": 2 * self.kept_incidences >= self.incidences,
        }
        if self.proof_case == "I":
            out["I<4M"] = self.incidences < 4 * self.M
        return out

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def bootstrap_iii(points: Sequence, cutting: Cutting, lines: Sequence[LineKey]) -> BootstrapReport:
    """Exact quantities behind the incidence bound for M arbitrary lines."""
    lines = list(dict.fromkeys(lines))
    if not lines:
        raise GeometryError("bootstrap needs at least one line")
    pts = [point(p) for p in points]
    _require_proper(pts, cutting)
    per_line = incidences_per_line(pts, lines)
    I = int(per_line.sum())
    M = len(lines)
    D = np.array([ln.direction for ln in lines], dtype=object)
    Nm = np.array([h.normal for h in cutting.planes], dtype=object)
    transversal = (D @ Nm.T != 0).sum(axis=1)
    kept = 2 * M * per_line >= I
    return BootstrapReport(
        N=len(pts), M=M, incidences=I, n_planes=len(cutting),
        max_cells_met=int(transversal.max()) + 1, max_points_on_line=int(per_line.max()),
        kept_lines=int(kept.sum()), kept_incidences=int(per_line[kept].sum()))
