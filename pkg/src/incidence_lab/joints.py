"""Intersection points and joints of line families, and the conditional joints bound."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cutting import Cutting, PreconditionError, is_proper_cutting
from .exact import CapExceeded, GeometryError, LineKey, _norm_scalar, _rank

DEFAULT_LINE_CAP = 5000


@dataclass(frozen=True)
class IntersectionPoint:
    location: tuple
    incident_lines: tuple[LineKey, ...]
    is_joint: bool


def _cross(u, v):
    return (u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0])


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def intersect(l1: LineKey, l2: LineKey):
    """Exact intersection point of two distinct lines, or None (parallel or skew)."""
    if l1.dim != l2.dim:
        raise GeometryError("lines of different dimension")
    b1 = [Fraction(c) for c in l1.basepoint]
    w = [Fraction(c) - a for a, c in zip(b1, l2.basepoint)]
    d1, d2 = l1.direction, l2.direction
    if l1.dim == 2:
        den = d1[0] * d2[1] - d1[1] * d2[0]
        if den == 0:
            return None
        s = (w[0] * d2[1] - w[1] * d2[0]) / den
    elif l1.dim == 3:
        c = _cross(d1, d2)
        cc = _dot(c, c)
        if cc == 0 or _dot(w, c) != 0:
            return None
        s = _dot(_cross(w, d2), c) / cc
    else:
        raise GeometryError("intersections are implemented for d in {2, 3}")
    return tuple(_norm_scalar(b + s * v) for b, v in zip(b1, d1))


def _is_joint(lines: Sequence[LineKey]) -> bool:
    return len(lines) >= 3 and lines[0].dim == 3 and _rank([ln.direction for ln in lines]) == 3


def intersections(lines: Sequence[LineKey], cap: int = DEFAULT_LINE_CAP) -> list[IntersectionPoint]:
    """Every point where at least two of the lines meet, sorted by location."""
    lines = list(dict.fromkeys(lines))
    if len(lines) > cap:
        raise CapExceeded("line", cap, len(lines))
    groups: dict[tuple, set[int]] = {}
    for i in range(len(lines)):
        for j in range(i + 1, len(lines)):
            p = intersect(lines[i], lines[j])
            if p is not None:
                s = groups.setdefault(p, set())
                s.add(i)
                s.add(j)
    out = []
    for loc in sorted(groups):
        inc = tuple(sorted(lines[i] for i in groups[loc]))
        out.append(IntersectionPoint(loc, inc, _is_joint(inc)))
    return out


def detect_joints(lines: Sequence[LineKey], cap: int = DEFAULT_LINE_CAP) -> list[IntersectionPoint]:
    """Points where at least three non-coplanar lines meet."""
    return [p for p in intersections(lines, cap) if p.is_joint]


@dataclass
class JointsBoundReport:
    n: int
    m: int
    n_planes: int
    constant_C: float
    max_points_per_line: int
    min_lines_per_point: int
    incidences_by_line: int
    incidences_by_point: int

    @property
    def bound(self) -> float:
        """C^(3/2) m^(3/2)."""
        return float(self.constant_C) ** 1.5 * self.m ** 1.5

    @property
    def slack(self) -> float:
        return self.bound / self.n if self.n else float("inf")

    @property
    def checks(self) -> dict[str, bool]:
        return {
            "points_per_line<=|H|+1": self.max_points_per_line <= self.n_planes + 1,
            "lines_per_point>=2": self.n == 0 or self.min_lines_per_point >= 2,
            "incidence_sums_agree": self.incidences_by_line == self.incidences_by_point,
            "2n<=I<=m(|H|+1)": 2 * self.n <= self.incidences_by_line <= self.m * (self.n_planes + 1),
            "n<=C^1.5 m^1.5": self.n <= self.bound,
        }

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        return {"n": self.n, "m": self.m, "C": float(self.constant_C), "bound": self.bound,
                "slack": self.slack, "checks": self.checks, "passed": self.passed}


def joints_bound_check(lines: Sequence[LineKey], cutting: Cutting, subset: Sequence[tuple] | None = None,
                       joints_only: bool = False) -> JointsBoundReport:
    """Verify the incidence chain giving ``|J0| <= C^(3/2) m^(3/2)``.

    ``J0`` defaults to all intersection points (or all joints with
    ``joints_only``); ``C`` is measured from the cutting as
    ``|cutting| / |J0|^(1/3)``.
    """
    lines = list(dict.fromkeys(lines))
    points = intersections(lines)
    if joints_only:
        points = [p for p in points if p.is_joint]
    if subset is not None:
        wanted = set(subset)
        points = [p for p in points if p.location in wanted]
        if len(points) != len(wanted):
            raise GeometryError("subset contains points that are not intersections of the lines")
    locs = [p.location for p in points]
    verdict = is_proper_cutting(locs, cutting.planes)
    if not verdict.passed:
        raise PreconditionError(f"cutting does not separate J0: {verdict.certificate()}")
    n = len(locs)
    measured = Cutting(cutting.planes, n, 3).constant_C if n else 0.0
    # counted from the lines' side independently of the grouping by location
    per_line = {ln: sum(1 for q in locs if ln.contains(q)) for ln in lines}
    return JointsBoundReport(
        n=n, m=len(lines), n_planes=len(cutting), constant_C=measured,
        max_points_per_line=max(per_line.values(), default=0),
        min_lines_per_point=min((len(p.incident_lines) for p in points), default=0),
        incidences_by_line=sum(per_line.values()),
        incidences_by_point=sum(len(p.incident_lines) for p in points))
