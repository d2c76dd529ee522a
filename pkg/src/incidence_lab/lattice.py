"""Cube lattices and the rich-line families that realize the lower bounds.

Range endpoints ``n/4k``, ``n/2k`` and ``n/2`` are floors throughout; empty
ranges give empty families and an :class:`EmptyRangeWarning`.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import _intkeys
from .exact import CapExceeded, GeometryError, LineKey, line_through

DEFAULT_LATTICE_CAP = 2 * 10**6
DEFAULT_LINE_CAP = 2 * 10**5


class EmptyRangeWarning(UserWarning):
    """A floored parameter range is empty, so the generated family is empty."""


@dataclass(frozen=True)
class LatticeSpec:
    n: int
    d: int = 3

    def __post_init__(self):
        if self.n < 1 or self.d < 1:
            raise GeometryError(f"invalid lattice spec n={self.n}, d={self.d}")

    @property
    def size(self) -> int:
        return self.n ** self.d


def cube_lattice(spec: LatticeSpec, cap: int = DEFAULT_LATTICE_CAP) -> list[tuple[int, ...]]:
    """The points of ``{1, ..., n}^d`` in lexicographic order."""
    if spec.size > cap:
        raise CapExceeded("lattice", cap, spec.size)
    return list(itertools.product(range(1, spec.n + 1), repeat=spec.d))


def totients(m: int) -> np.ndarray:
    """Euler's phi for 0..m by a sieve (``phi[0] = 0``)."""
    phi = np.arange(m + 1, dtype=np.int64)
    for p in range(2, m + 1):
        if phi[p] == p:  # p is prime
            phi[p::p] -= phi[p::p] // p
    return phi


def totient_sum(m: int) -> int:
    """Sum of phi(i) for i = 1..m."""
    if m < 1:
        raise GeometryError("totient_sum needs m >= 1")
    return int(totients(m)[1:].sum())


def _u_range(n: int, k: int) -> tuple[int, int]:
    return n // (4 * k), n // (2 * k)


def rich_directions_d(n: int, k: int, d: int) -> list[tuple[int, ...]]:
    """Direction tuples ``(u_1, ..., u_d)`` of the d-dimensional lattice family.

    ``floor(n/4k) <= u_1 <= floor(n/2k)``, ``1 <= u_2..u_{d-1} <= floor(n/2k)``,
    ``1 <= u_d <= u_{d-1}`` and ``gcd(u_{d-1}, u_d) = 1``. For ``d = 2`` the
    middle chain is empty and the last two constraints apply to ``u_1``.
    """
    if d < 2:
        raise GeometryError("dimension must be at least 2")
    if not 2 <= k <= n:
        raise GeometryError(f"need 2 <= k <= n, got k={k}, n={n}")
    lo, hi = _u_range(n, k)
    if lo < 1:
        warnings.warn(f"floor(n/4k) = 0 for n={n}, k={k}: empty direction family", EmptyRangeWarning, stacklevel=2)
        return []
    out = []
    if d == 2:
        for u1 in range(lo, hi + 1):
            out.extend((u1, u2) for u2 in range(1, u1 + 1) if math.gcd(u1, u2) == 1)
        return out
    middle = itertools.product(range(1, hi + 1), repeat=d - 3)
    for u1, mid in itertools.product(range(lo, hi + 1), list(middle)):
        for v in range(1, hi + 1):
            out.extend((u1, *mid, v, w) for w in range(1, v + 1) if math.gcd(v, w) == 1)
    return out


def origin_rich_directions(n: int, k: int) -> list[tuple[int, int, int]]:
    """Closest-to-origin points ``(u, v, w)`` of the origin lines of the 3D family."""
    return rich_directions_d(n, k, 3)


def _lattice_counts(base: np.ndarray, dirs: np.ndarray, n: int) -> np.ndarray:
    """Lattice points of ``{1..n}^d`` on lines ``base + t * dirs`` (integer base, primitive dirs)."""
    lo = np.full(len(base), np.iinfo(np.int64).min // 4)
    hi = np.full(len(base), np.iinfo(np.int64).max // 4)
    for c in range(base.shape[1]):
        p, dc = base[:, c], dirs[:, c]
        pos, neg, zero = dc > 0, dc < 0, dc == 0
        # t * dc in [1 - p, n - p]
        a, b = 1 - p, n - p
        with np.errstate(divide="ignore", invalid="ignore"):
            safe = np.where(zero, 1, dc)
            lo_c = np.where(pos, -((-a) // safe), np.where(neg, -((-b) // safe), lo))
            hi_c = np.where(pos, b // safe, np.where(neg, a // safe, hi))
        outside = zero & ((p < 1) | (p > n))
        lo = np.maximum(lo, lo_c)
        hi = np.where(outside, lo - 1, np.minimum(hi, hi_c))
    return np.maximum(hi - lo + 1, 0)


def line_lattice_points(line: LineKey, spec: LatticeSpec) -> int:
    """Exact number of points of ``{1..n}^d`` on the line."""
    d = line.direction
    if len(d) != spec.d:
        raise GeometryError("line and lattice dimension differ")
    i = line.lead_index
    # b[i] = 0, so any integer point has parameter t = j / d[i]
    start = None
    for r in range(d[i]):
        cand = [Fraction(b) + Fraction(r, d[i]) * v for b, v in zip(line.basepoint, d)]
        if all(c.denominator == 1 for c in cand):
            start = [int(c) for c in cand]
            break
    if start is None:
        return 0
    return int(_lattice_counts(np.array([start], np.int64), np.array([d], np.int64), spec.n)[0])


@dataclass
class RichLineFamily:
    """Deduplicated shifted lines with their multiplicities and lattice counts.

    Line ``i`` passes through the integer point ``anchors[i]`` with direction
    ``directions[i]``.
    """

    k: int
    n: int
    directions: np.ndarray
    anchors: np.ndarray
    multiplicity: np.ndarray
    lattice_counts: np.ndarray
    dropped: int = 0
    warnings: list[str] = field(default_factory=list)

    @property
    def distinct_count(self) -> int:
        return len(self.multiplicity)

    def key(self, i: int) -> LineKey:
        return line_through(tuple(int(c) for c in self.anchors[i]), [int(c) for c in self.directions[i]])

    @property
    def lines(self) -> dict[LineKey, int]:
        return {self.key(i): int(m) for i, m in enumerate(self.multiplicity)}

    def keys(self) -> list[LineKey]:
        return [self.key(i) for i in range(self.distinct_count)]

    def iter_json_lines(self):
        for i in range(self.distinct_count):
            rec = self.key(i).to_json()
            rec["multiplicity"] = int(self.multiplicity[i])
            rec["lattice_points"] = int(self.lattice_counts[i])
            yield json.dumps(rec, sort_keys=True)


def _empty_family(k, n, note) -> RichLineFamily:
    z = np.zeros((0, 3), np.int64)
    e = np.zeros(0, np.int64)
    return RichLineFamily(k, n, z, z, e, e, warnings=[note])


def shifted_rich_lines(n: int, k: int, cap: int = 10**7) -> RichLineFamily:
    """Origin lines through each ``(u, v, w)`` shifted by every vector of ``{1..n/2}^3``.

    Lines are merged by canonical key (sorted code order) with their
    multiplicities; lines with fewer than ``k`` lattice points are dropped and
    counted in ``dropped``.
    """
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        dirs = origin_rich_directions(n, k)
    for w in caught:
        warnings.warn(w.message, w.category, stacklevel=2)
    half = n // 2
    if not dirs or half < 1:
        return _empty_family(k, n, f"empty range for n={n}, k={k}")
    total = len(dirs) * half**3
    if total > cap:
        raise CapExceeded("shifted-line", cap, total)

    D = np.array(dirs, dtype=np.int64)
    S = np.array(list(itertools.product(range(1, half + 1), repeat=3)), dtype=np.int64)
    base = np.repeat(S, len(D), axis=0)
    dd = np.tile(D, (len(S), 1))
    packer = _intkeys.RowPacker.for_keys(int(D.max()), n, 3)
    first, _, mult = _intkeys.group_rows(_intkeys.key_rows(base, dd), packer)
    anchors, ldirs = base[first], dd[first]
    counts = _lattice_counts(anchors, ldirs, n)
    ok = counts >= k
    fam = RichLineFamily(k, n, ldirs[ok], anchors[ok], mult[ok], counts[ok], dropped=int((~ok).sum()))
    if fam.dropped:
        fam.warnings.append(f"{fam.dropped} lines below k={k} dropped")
    return fam


def axis_parallel_lines(n: int, axes=(0, 1, 2)) -> list[LineKey]:
    """Lattice lines of ``{1..n}^3`` parallel to the given coordinate axes."""
    lines = []
    for ax in axes:
        direction = [0, 0, 0]
        direction[ax] = 1
        others = [c for c in range(3) if c != ax]
        for a, b in itertools.product(range(1, n + 1), repeat=2):
            p = [0, 0, 0]
            p[others[0]], p[others[1]] = a, b
            lines.append(line_through(tuple(p), direction))
    return lines


def _primitive_directions():
    """Primitive sign-normalized integer 3-vectors by increasing max-norm."""
    r = 1
    while True:
        shell = [v for v in itertools.product(range(-r, r + 1), repeat=3) if max(map(abs, v)) == r]
        for v in sorted(shell):
            lead = next(c for c in v if c != 0)
            if lead > 0 and math.gcd(math.gcd(v[0], v[1]), v[2]) == 1:
                yield v
        r += 1


@dataclass
class ExampleIIILines:
    case: str
    lines: list[LineKey]
    k: int | None = None
    k_raw: float | None = None
    clamped: bool = False
    family: RichLineFamily | None = None


def example_iii_case(N: int, M: int) -> str:
    """Which construction regime applies: "a" (M > N^2/16), "b" (M < N^(2/3)) or "c"."""
    n = round(N ** (1 / 3))
    if n**3 != N:
        raise GeometryError(f"N={N} is not a perfect cube")
    if 16 * M > N * N:
        return "a"
    if M < n * n:
        return "b"
    return "c"


def example_iii_lines(N: int, M: int, cap: int = DEFAULT_LINE_CAP) -> ExampleIIILines:
    """Line families showing the incidence bounds for M lines are attained on the lattice.

    Case (a) draws M lines through the lattice point (1,1,1); case (b) takes M
    of the x-parallel lattice lines; case (c) is the rich-line family with
    ``k = round(N^(1/2) / M^(1/4))`` clamped to ``[2, n]``.
    """
    if M < 1:
        raise GeometryError("M must be positive")
    case = example_iii_case(N, M)
    n = round(N ** (1 / 3))
    if case == "a":
        if M > cap:
            raise CapExceeded("line", cap, M)
        lines = [line_through((1, 1, 1), v) for v in itertools.islice(_primitive_directions(), M)]
        return ExampleIIILines("a", lines)
    if case == "b":
        return ExampleIIILines("b", axis_parallel_lines(n, axes=(0,))[:M])
    k_raw = math.sqrt(N) / M**0.25
    k = min(max(round(k_raw), 2), n)
    fam = shifted_rich_lines(n, k)
    return ExampleIIILines("c", fam.keys(), k=k, k_raw=k_raw, clamped=k != round(k_raw), family=fam)
