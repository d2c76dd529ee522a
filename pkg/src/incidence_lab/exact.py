"""Exact rational points, hyperplanes, canonical line keys and predicates.

Coordinates are ``int`` or :class:`fractions.Fraction`; both hash and compare
consistently, so points are plain tuples. Hyperplanes store a primitive,
sign-normalized integer row ``normal . x + offset = 0``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Iterable, Sequence

Point = tuple  # tuple of int | Fraction


class GeometryError(ValueError):
    """Usage error in a geometric operation (dimension mismatch, p == q, ...)."""


class DegenerateInputError(GeometryError):
    """An input point lies exactly on a plane where that is not allowed."""


def _norm_scalar(x) -> int | Fraction:
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, Rational):
        return _norm_scalar(Fraction(x.numerator, x.denominator))
    if isinstance(x, str):
        return _norm_scalar(Fraction(x))
    if hasattr(x, "dtype") and x.dtype.kind in "iu":  # numpy integer scalar
        return int(x)
    raise TypeError(f"coordinate {x!r} is not an exact rational")


def point(*coords) -> Point:
    """Build an exact point; ``point(1, 2, 3)`` or ``point([1, 2, 3])``."""
    if len(coords) == 1 and not isinstance(coords[0], (int, Fraction, str)):
        coords = tuple(coords[0])
    return tuple(_norm_scalar(c) for c in coords)


def _lcm(a: int, b: int) -> int:
    return a * b // gcd(a, b)


def primitive(vec: Iterable) -> tuple[int, ...]:
    """Scale a rational vector to a primitive integer vector with first nonzero entry positive."""
    vec = [Fraction(v) for v in vec]
    den = 1
    for v in vec:
        den = _lcm(den, v.denominator)
    ints = [int(v * den) for v in vec]
    g = 0
    for v in ints:
        g = gcd(g, v)
    if g == 0:
        raise GeometryError("zero vector has no primitive representative")
    ints = [v // g for v in ints]
    lead = next(v for v in ints if v != 0)
    if lead < 0:
        ints = [-v for v in ints]
    return tuple(ints)


@dataclass(frozen=True, order=True)
class Hyperplane:
    """The hyperplane ``normal . x + offset = 0`` in primitive integer form."""

    normal: tuple[int, ...]
    offset: int

    def __post_init__(self):
        row = primitive(tuple(self.normal) + (self.offset,))
        if all(v == 0 for v in row[:-1]):
            raise GeometryError("hyperplane normal must be nonzero")
        # first nonzero entry of the normal positive
        lead = next(v for v in row[:-1] if v != 0)
        if lead < 0:
            row = tuple(-v for v in row)
        object.__setattr__(self, "normal", tuple(row[:-1]))
        object.__setattr__(self, "offset", row[-1])

    @classmethod
    def from_coefficients(cls, normal: Sequence, offset=0) -> "Hyperplane":
        return cls(tuple(normal), offset)

    @classmethod
    def axis(cls, i: int, value, d: int = 3) -> "Hyperplane":
        """The plane ``x_i = value``."""
        normal = [0] * d
        normal[i] = 1
        return cls(tuple(normal), -Fraction(value))

    @property
    def dim(self) -> int:
        return len(self.normal)

    def evaluate(self, p: Point):
        return sum(a * x for a, x in zip(self.normal, p)) + self.offset

    def __repr__(self):
        return f"Hyperplane({self.normal}|{self.offset})"


def plane_side(h: Hyperplane, p: Point) -> int:
    """Sign (-1, 0, +1) of ``h.normal . p + h.offset``."""
    if h.dim != len(p):
        raise GeometryError(f"plane of dimension {h.dim} vs point of dimension {len(p)}")
    v = h.evaluate(p)
    return (v > 0) - (v < 0)


def segment_crossings(p: Point, q: Point, planes: Iterable[Hyperplane]) -> int:
    """Number of planes strictly separating ``p`` from ``q``.

    Raises :class:`DegenerateInputError` if an endpoint lies on a plane.
    """
    if len(p) != len(q):
        raise GeometryError("endpoints of different dimension")
    if p == q:
        raise GeometryError("segment endpoints coincide")
    count = 0
    for h in planes:
        sp, sq = plane_side(h, p), plane_side(h, q)
        if sp == 0 or sq == 0:
            raise DegenerateInputError(f"segment endpoint lies on {h!r}")
        if sp != sq:
            count += 1
    return count


@dataclass(frozen=True, order=True)
class LineKey:
    """Canonical form of an affine line.

    ``direction`` is primitive with its first nonzero entry positive; if that
    entry sits at index ``i``, ``basepoint`` is the unique point of the line
    with coordinate ``i`` equal to zero.
    """

    direction: tuple[int, ...]
    basepoint: Point = field(compare=True)

    @property
    def dim(self) -> int:
        return len(self.direction)

    @property
    def lead_index(self) -> int:
        return next(i for i, v in enumerate(self.direction) if v != 0)

    def at(self, t) -> Point:
        return tuple(_norm_scalar(b + t * v) for b, v in zip(self.basepoint, self.direction))

    def contains(self, p: Point) -> bool:
        i = self.lead_index
        t = Fraction(p[i] - self.basepoint[i], self.direction[i])
        return all(b + t * v == x for b, v, x in zip(self.basepoint, self.direction, p))

    def to_json(self) -> dict:
        return {"direction": list(self.direction), "basepoint": [str(c) for c in self.basepoint]}

    @classmethod
    def from_json(cls, obj: dict) -> "LineKey":
        return line_through(point(obj["basepoint"]), obj["direction"])


def line_through(p: Point, direction: Sequence) -> LineKey:
    """Canonical key of the line through ``p`` with the given direction."""
    d = primitive(direction)
    if len(d) != len(p):
        raise GeometryError("direction and point differ in dimension")
    i = next(j for j, v in enumerate(d) if v != 0)
    t = Fraction(p[i]) / d[i]
    base = tuple(_norm_scalar(Fraction(x) - t * v) for x, v in zip(p, d))
    return LineKey(d, base)


def canonical_line(p: Point, q: Point) -> LineKey:
    """Canonical key of the line through two distinct points."""
    if len(p) != len(q):
        raise GeometryError("points of different dimension")
    if p == q:
        raise GeometryError("a line needs two distinct points")
    return line_through(p, [b - a for a, b in zip(p, q)])


def _rank(rows: Sequence[Sequence]) -> int:
    """Exact rank by Gaussian elimination over the rationals."""
    m = [[Fraction(x) for x in r] for r in rows]
    if not m:
        return 0
    rank, ncols = 0, len(m[0])
    for c in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        for r in range(rank + 1, len(m)):
            f = m[r][c] / m[rank][c]
            if f:
                m[r] = [a - f * b for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


def det(rows: Sequence[Sequence]):
    """Exact determinant of a square matrix (Bareiss)."""
    m = [[Fraction(x) for x in r] for r in rows]
    n = len(m)
    sign, prev = 1, Fraction(1)
    for k in range(n - 1):
        if m[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if m[r][k] != 0), None)
            if swap is None:
                return 0
            m[k], m[swap] = m[swap], m[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev
        prev = m[k][k]
    return _norm_scalar(sign * m[-1][-1]) if n else 1


def collinear(p: Point, q: Point, r: Point) -> bool:
    """True iff the three points lie on one affine line (coincidences allowed)."""
    if len(p) == 3:
        u0, u1, u2 = q[0] - p[0], q[1] - p[1], q[2] - p[2]
        v0, v1, v2 = r[0] - p[0], r[1] - p[1], r[2] - p[2]
        return u0 * v1 == u1 * v0 and u0 * v2 == u2 * v0 and u1 * v2 == u2 * v1
    u = [b - a for a, b in zip(p, q)]
    v = [c - a for a, c in zip(p, r)]
    return all(u[i] * v[j] == u[j] * v[i] for i, j in itertools.combinations(range(len(u)), 2))


def lines_coplanar(l1: LineKey, l2: LineKey, l3: LineKey, common: Point) -> bool:
    """Whether three lines through ``common`` have linearly dependent directions."""
    for ln in (l1, l2, l3):
        if not ln.contains(common):
            raise GeometryError(f"{ln} does not pass through {common}")
    return _rank([l1.direction, l2.direction, l3.direction]) < 3


@dataclass
class GeneralPositionReport:
    """Violations of general position; empty ``violations`` means PASS."""

    d: int
    violations: list[tuple[str, tuple[int, ...]]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations


def general_position_check(planes: Sequence[Hyperplane], d: int) -> GeneralPositionReport:
    """Check that every ``min(|H|, d)`` planes are independent and no ``d+1`` share a point.

    Violations are reported as ``("rank-deficient", idx)`` for tuples whose
    normals are dependent (parallel pairs, triples meeting in no single point)
    and ``("common-point", idx)`` for ``d+1`` planes through one point.
    """
    report = GeneralPositionReport(d)
    planes = list(planes)
    for h in planes:
        if h.dim != d:
            raise GeometryError(f"plane {h!r} is not {d}-dimensional")
    size = min(len(planes), d)
    for idx in itertools.combinations(range(len(planes)), size):
        if _rank([planes[i].normal for i in idx]) < size:
            report.violations.append(("rank-deficient", idx))
    for idx in itertools.combinations(range(len(planes)), d + 1):
        rows = [planes[i].normal + (planes[i].offset,) for i in idx]
        if _rank([planes[i].normal for i in idx]) == d and det(rows) == 0:
            report.violations.append(("common-point", idx))
    return report


class CapExceeded(GeometryError):
    """A size cap would be exceeded; ``cap`` names the limit."""

    def __init__(self, cap: str, limit, requested):
        super().__init__(f"{cap} cap exceeded: requested {requested}, limit {limit}")
        self.cap, self.limit, self.requested = cap, limit, requested
