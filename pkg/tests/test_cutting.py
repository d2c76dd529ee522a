from fractions import Fraction
from itertools import product
from math import ceil

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from incidence_lab.cutting import (
    Cutting,
    PreconditionError,
    bootstrap_iii,
    grid_cutting,
    incidence_bound_sweep,
    is_proper_cutting,
    segment_threshold,
    sign_matrix,
    solymosi_rich_line_check,
)
from incidence_lab.exact import Hyperplane, segment_crossings
from incidence_lab.lattice import LatticeSpec, cube_lattice
from incidence_lab.richlines import enumerate_rich_lines


@pytest.mark.parametrize("d", [2, 3])
def test_grid_cutting_is_proper(d):
    for n in range(2, 33):
        if n**d > 40000:
            continue
        spec = LatticeSpec(n, d)
        cut = grid_cutting(spec)
        assert len(cut) == d * (n - 1)
        assert is_proper_cutting(cube_lattice(spec), cut.planes).passed


def test_constant_c_is_exact():
    assert grid_cutting(LatticeSpec(2)).constant_C == Fraction(3, 2)
    assert grid_cutting(LatticeSpec(4)).constant_C == Fraction(9, 4)


def test_collision_certificate():
    pts = list(product((1, 2), repeat=3))
    verdict = is_proper_cutting(pts, [Hyperplane.axis(0, Fraction(3, 2)), Hyperplane.axis(1, Fraction(3, 2))])
    assert not verdict.passed
    assert verdict.collision == ((1, 1, 1), (1, 1, 2))
    assert verdict.certificate()["verdict"] == "FAIL"


def test_on_plane_certificate():
    verdict = is_proper_cutting([(1, 1, 1), (2, 2, 2)], [Hyperplane.axis(0, 1)])
    assert verdict.on_plane[0] == (1, 1, 1)


def test_sign_matrix_against_evaluate():
    pts = [(1, Fraction(1, 2), 3), (-4, 2, 0), (0, 0, 0)]
    planes = [Hyperplane((1, -2, 3), 1), Hyperplane((0, 1, 0), 0)]
    S = sign_matrix(pts, planes)
    for i, p in enumerate(pts):
        for j, h in enumerate(planes):
            v = h.evaluate(p)
            assert S[i, j] == (v > 0) - (v < 0)


def test_sign_hamming_equals_segment_crossings():
    spec = LatticeSpec(4)
    pts = cube_lattice(spec)
    cut = grid_cutting(spec)
    S = sign_matrix(pts, cut.planes)
    rng = np.random.default_rng(1)
    for _ in range(50):
        a, b = rng.choice(len(pts), size=2, replace=False)
        assert int((S[a] != S[b]).sum()) == segment_crossings(pts[a], pts[b], cut.planes)


def test_segment_threshold():
    assert segment_threshold(9, 2) == 14
    assert segment_threshold(9, 4) == 7
    assert segment_threshold(45, 4) == 34


@given(st.integers(2, 10**4))
def test_cheap_segment_arithmetic(kl):
    # at most floor(k_l / 3) expensive segments leave at least ceil(k_l / 6) cheap ones
    assert (kl - 1) - kl // 3 >= ceil(kl / 6)


@pytest.mark.parametrize("n,k", [(4, 2), (4, 4), (8, 2), (8, 4)])
def test_solymosi_on_lattice(n, k):
    spec = LatticeSpec(n)
    pts = cube_lattice(spec)
    rep = solymosi_rich_line_check(pts, grid_cutting(spec), k, pair_cap=None)
    assert rep.passed
    assert (rep.cheap_segments >= -(-rep.line_counts // 6)).all()
    assert (rep.total_crossings <= len(grid_cutting(spec))).all()


def test_solymosi_crossings_by_scan():
    spec = LatticeSpec(3)
    pts = cube_lattice(spec)
    cut = grid_cutting(spec)
    rep = solymosi_rich_line_check(pts, cut, 3)
    for (a, b), c in zip(rep.segment_pairs, rep.segment_crossings):
        assert c == segment_crossings(pts[a], pts[b], cut.planes)


def test_solymosi_requires_proper_cutting():
    pts = list(product((1, 2), repeat=3))
    with pytest.raises(PreconditionError):
        solymosi_rich_line_check(pts, Cutting((Hyperplane.axis(0, Fraction(3, 2)),), 8, 3), 2)


def test_incidence_sweep_small():
    spec = LatticeSpec(2)
    rec = incidence_bound_sweep(cube_lattice(spec), grid_cutting(spec), 2)
    assert rec.incidences == 56 and rec.close_pairs == 28
    assert rec.proof_inequality and rec.passed


@pytest.mark.parametrize("n,k", [(4, 2), (4, 4), (8, 4)])
def test_incidence_sweep_matches_rich_lines(n, k):
    spec = LatticeSpec(n)
    pts = cube_lattice(spec)
    rec = incidence_bound_sweep(pts, grid_cutting(spec), k, pair_cap=None)
    rich = enumerate_rich_lines(pts, k, pair_cap=None)
    assert rec.incidences == rich.total_incidences
    assert rec.rich_line_count == rich.distinct_lines
    assert rec.passed


def test_bootstrap_case_one():
    spec = LatticeSpec(2)
    pts = cube_lattice(spec)
    lines = enumerate_rich_lines(pts, 2).keys
    rep = bootstrap_iii(pts, grid_cutting(spec), lines)
    assert rep.M == 28 and rep.incidences == 56
    assert rep.k == 1 and rep.proof_case == "I"
    assert rep.incidences < 4 * rep.M
    assert rep.passed


def test_bootstrap_counts_by_scan():
    spec = LatticeSpec(3)
    pts = cube_lattice(spec)
    lines = enumerate_rich_lines(pts, 3).keys[:20]
    rep = bootstrap_iii(pts, grid_cutting(spec), lines)
    assert rep.incidences == sum(ln.contains(p) for ln in lines for p in pts)
