from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incidence_lab.exact import (
    DegenerateInputError,
    GeometryError,
    Hyperplane,
    LineKey,
    canonical_line,
    collinear,
    det,
    general_position_check,
    line_through,
    lines_coplanar,
    plane_side,
    point,
    primitive,
    segment_crossings,
)

coord = st.integers(-20, 20)
pt3 = st.tuples(coord, coord, coord)


def test_point_normalizes_integral_fractions():
    p = point(Fraction(4, 2), Fraction(1, 3), 5)
    assert p == (2, Fraction(1, 3), 5)
    assert type(p[0]) is int


def test_hyperplane_is_primitive_and_sign_normalized():
    h = Hyperplane.from_coefficients((-2, 4, 0), 6)
    assert h.normal == (1, -2, 0) and h.offset == -3
    assert Hyperplane.from_coefficients((Fraction(1, 2), 0, 0), Fraction(-1, 4)) == Hyperplane((2, 0, 0), -1)


def test_axis_plane():
    h = Hyperplane.axis(1, Fraction(3, 2))
    assert plane_side(h, (0, 1, 0)) == -1
    assert plane_side(h, (0, 2, 0)) == 1
    assert plane_side(h, (9, Fraction(3, 2), 9)) == 0


def test_plane_side_dimension_mismatch():
    with pytest.raises(GeometryError):
        plane_side(Hyperplane((1, 0, 0), 0), (1, 2))


def test_segment_crossings_basic():
    planes = [Hyperplane.axis(0, Fraction(2 * j + 1, 2)) for j in range(1, 4)]
    assert segment_crossings((1, 0, 0), (4, 0, 0), planes) == 3
    assert segment_crossings((1, 0, 0), (1, 5, 5), planes) == 0


def test_segment_crossings_rejects_endpoint_on_plane():
    with pytest.raises(DegenerateInputError):
        segment_crossings((0, 0, 0), (1, 1, 1), [Hyperplane((1, 0, 0), 0)])


def test_segment_crossings_rejects_point_segment():
    with pytest.raises(GeometryError):
        segment_crossings((1, 1, 1), (1, 1, 1), [])


def test_canonical_line_is_order_independent():
    a = canonical_line((1, 2, 3), (3, 6, 9))
    b = canonical_line((3, 6, 9), (-1, -2, -3))
    assert a == b
    assert a.direction == (1, 2, 3)
    assert a.basepoint == (0, 0, 0)


def test_line_key_json_round_trip():
    ln = canonical_line((1, Fraction(1, 3), 2), (4, 1, 0))
    assert LineKey.from_json(ln.to_json()) == ln


def test_canonical_line_rejects_equal_points():
    with pytest.raises(GeometryError):
        canonical_line((1, 1, 1), (1, 1, 1))


def test_det_matches_cofactor_expansion():
    m = [[2, -1, 3], [0, 4, 5], [1, 1, -2]]
    cof = (m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
           - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
           + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]))
    assert det(m) == cof


def test_lines_coplanar():
    o = (0, 0, 0)
    x, y, z = (line_through(o, v) for v in ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    diag = line_through(o, (1, 1, 0))
    assert not lines_coplanar(x, y, z, o)
    assert lines_coplanar(x, y, diag, o)
    with pytest.raises(GeometryError):
        lines_coplanar(x, y, line_through((0, 0, 1), (1, 0, 0)), o)


def test_general_position_coordinate_planes():
    planes = [Hyperplane.axis(i, 0) for i in range(3)]
    assert general_position_check(planes, 3).passed


def test_general_position_detects_common_point():
    planes = [Hyperplane.axis(i, 0) for i in range(3)] + [Hyperplane((1, 1, 1), 0)]
    rep = general_position_check(planes, 3)
    assert not rep.passed
    assert any(v[0] == "common-point" for v in rep.violations)


def test_general_position_detects_parallel_normals():
    planes = [Hyperplane((1, 0, 0), 0), Hyperplane((1, 0, 0), -1), Hyperplane((0, 1, 0), 0)]
    rep = general_position_check(planes, 3)
    assert any(v[0] == "rank-deficient" for v in rep.violations)


def _parametric_collinear(p, q, r):
    # oracle: r = p + t (q - p) for a single rational t, or p == q
    d = [b - a for a, b in zip(p, q)]
    if not any(d):
        return True
    i = next(j for j, v in enumerate(d) if v)
    t = Fraction(r[i] - p[i], d[i])
    return all(p[j] + t * d[j] == r[j] for j in range(len(p)))


@given(pt3, pt3, pt3)
def test_collinear_matches_parametric_oracle(p, q, r):
    assert collinear(p, q, r) == _parametric_collinear(p, q, r)


@given(pt3, pt3, st.integers(-5, 5))
def test_points_on_line_are_collinear(p, q, t):
    if p == q:
        return
    r = tuple(a + t * (b - a) for a, b in zip(p, q))
    assert collinear(p, q, r)
    assert canonical_line(p, q).contains(r)


@given(st.lists(st.integers(-30, 30), min_size=2, max_size=4))
def test_primitive_properties(v):
    if not any(v):
        with pytest.raises(GeometryError):
            primitive(v)
        return
    w = primitive(v)
    from math import gcd
    from functools import reduce
    assert reduce(gcd, w) == 1
    assert next(c for c in w if c) > 0
    # parallel to v
    for a, b in combinations(range(len(v)), 2):
        assert v[a] * w[b] == v[b] * w[a]


@settings(max_examples=50)
@given(st.lists(pt3, min_size=2, max_size=2, unique=True), st.lists(st.tuples(
    st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)), st.integers(-10, 10)), max_size=6))
def test_segment_crossings_counts_sign_changes(pq, raw):
    p, q = pq
    planes = [Hyperplane(n, c) for n, c in raw if any(n)]
    if any(plane_side(h, p) == 0 or plane_side(h, q) == 0 for h in planes):
        return
    expect = sum(plane_side(h, p) != plane_side(h, q) for h in planes)
    assert segment_crossings(p, q, planes) == expect
