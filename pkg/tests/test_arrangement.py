from fractions import Fraction
from itertools import combinations, product

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from incidence_lab.arrangement import (
    cell_count_formula,
    enumerate_cells,
    facet_point,
    feasible,
    is_generic,
    random_generic_planes,
    strict_feasible,
)
from incidence_lab.exact import CapExceeded, GeometryError, Hyperplane, plane_side, segment_crossings


@pytest.fixture(scope="module")
def coord_planes():
    return enumerate_cells([Hyperplane.axis(i, 0) for i in range(3)])


@pytest.fixture(scope="module")
def six():
    return enumerate_cells(random_generic_planes(6, 3, seed=11))


def test_strict_feasible_witness():
    rows = [(1, 0, 0), (-1, 0, 1), (0, 1, 0), (0, -1, 2)]  # 0 < x < 1, 0 < y < 2
    x = strict_feasible(rows, 2)
    assert all(r[0] * x[0] + r[1] * x[1] + r[2] > 0 for r in rows)


def test_strict_feasible_detects_empty():
    assert strict_feasible([(1, 0), (-1, 0)], 1) is None
    assert strict_feasible([(1, 1, 0), (-1, -1, 0)], 2) is None
    # closed but not open: x >= 0 and x <= 0 style degeneracy
    assert strict_feasible([(1, 0, 0, 0), (-1, 0, 0, 0), (0, 1, 0, 5)], 3) is None


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(*[st.integers(-4, 4)] * 3), min_size=1, max_size=7))
def test_strict_feasible_against_grid_search(rows):
    x = strict_feasible(rows, 2)
    if x is not None:
        assert all(a * x[0] + b * x[1] + c > 0 for a, b, c in rows)
    else:
        # a strictly feasible system would contain a point on a fine grid
        grid = [Fraction(i, 8) for i in range(-80, 81)]
        assert not any(all(a * u + b * v + c > 0 for a, b, c in rows) for u in grid for v in grid)


def test_coordinate_planes(coord_planes):
    a = coord_planes
    assert len(a) == 8
    s = a.short_distance_graph(1)
    assert s.edges == 12
    assert list(s.ball_sizes) == [4] * 8
    assert all(len(a.zone(i)) == 8 for i in range(3))
    assert len(a.neighborhood(0, 3)) == 8


def test_concurrent_lines_in_plane():
    planes = [Hyperplane((1, 0), 0), Hyperplane((0, 1), 0), Hyperplane((1, 1), 0)]
    a = enumerate_cells(planes)
    assert len(a) == 6


def test_input_errors():
    with pytest.raises(GeometryError):
        enumerate_cells([Hyperplane((1, 0, 0), 0), Hyperplane((2, 0, 0), 0)])
    with pytest.raises(GeometryError):
        enumerate_cells([Hyperplane((1, 0, 0, 0), 0)])
    with pytest.raises(CapExceeded) as exc:
        enumerate_cells(random_generic_planes(5, 3, seed=0), cap=4)
    assert exc.value.cap == "plane"


@pytest.mark.parametrize("d", [2, 3])
@pytest.mark.parametrize("n", [3, 5, 7])
def test_cell_count_formula(n, d):
    planes = random_generic_planes(n, d, seed=n)
    assert is_generic(planes)
    assert len(enumerate_cells(planes)) == cell_count_formula(n, d)


def test_generator_is_deterministic():
    assert random_generic_planes(8, 3, seed=5) == random_generic_planes(8, 3, seed=5)
    assert random_generic_planes(8, 3, seed=5) != random_generic_planes(8, 3, seed=6)


def test_all_sign_vectors_oracle(six):
    # 2^m brute force over sign vectors with the exact feasibility test
    masks = {c.mask for c in six.cells}
    found = {m for m in range(1 << 6) if feasible(six.planes, m) is not None}
    assert found == masks
    assert len(found) == 42


def test_witnesses_have_their_sign_vectors(six):
    for c in six.cells:
        for i, h in enumerate(six.planes):
            assert plane_side(h, c.witness) == (1 if (c.mask >> i) & 1 else -1)


def test_segment_crossings_equal_cell_distance(six):
    rng = np.random.default_rng(0)
    for _ in range(100):
        a, b = (int(v) for v in rng.integers(0, len(six), size=2))
        if a == b:
            continue
        wa, wb = six.cells[a].witness, six.cells[b].witness
        assert segment_crossings(wa, wb, six.planes) == six.cell_distance(a, b)


def test_adjacency_is_flip_of_facets(six):
    for c in range(len(six)):
        for i, nb in six.adjacency[c]:
            assert six.cells[c].mask ^ six.cells[nb].mask == 1 << i
            assert facet_point(six.planes, six.cells[c].mask, i) is not None


def test_neighborhood_is_hamming_ball(six):
    masks = [c.mask for c in six.cells]
    for rho in (1, 2, 3):
        for c in range(len(six)):
            ball = [j for j in range(len(six)) if (masks[c] ^ masks[j]).bit_count() <= rho]
            assert six.neighborhood(c, rho) == ball


def test_metric_triangle_inequality(six):
    n = len(six)
    for a, b, c in combinations(range(0, n, 3), 3):
        assert six.cell_distance(a, c) <= six.cell_distance(a, b) + six.cell_distance(b, c)


@pytest.mark.parametrize("rho", [1, 2, 3])
def test_edge_count_identities(six, rho):
    s = six.short_distance_graph(rho)
    assert s.sum_ball == 2 * s.edges + len(six)
    assert s.edges == six.close_pairs_bruteforce(rho)


def test_levels_by_two_methods(six):
    for c in range(len(six)):
        assert six.level(c) == six.level_from_signs(c)
    assert sorted({six.level(c) for c in range(len(six))}) == list(range(7))
    assert len(six.cells_at_level_le(6)) == len(six)


def test_vertical_plane_has_no_level():
    a = enumerate_cells([Hyperplane((1, 0, 0), 0), Hyperplane((0, 0, 1), 0)])
    with pytest.raises(GeometryError):
        a.level(0)


def test_rho_zone_contains_zone(six):
    for i in range(6):
        zone = set(six.zone(i))
        assert zone <= set(six.rho_zone(i, 1))
        assert set(six.rho_zone(six.planes[i], 0)) == zone
    with pytest.raises(GeometryError):
        six.zone(Hyperplane((1, 2, 3), 4))


def test_json_round_trip(six):
    import json
    data = json.loads(six.dumps())
    assert len(data["cells"]) == 42
    for cell in data["cells"]:
        w = tuple(Fraction(x) for x in cell["witness"])
        signs = "".join("+" if plane_side(h, w) > 0 else "-" for h in six.planes)
        assert signs == cell["signs"]


def test_planar_arrangement_by_sampling():
    planes = random_generic_planes(5, 2, seed=2)
    a = enumerate_cells(planes)
    assert len(a) == cell_count_formula(5, 2) == 16
    # every sign vector hit by a sample point must be a known cell
    masks = {c.mask for c in a.cells}
    for x, y in product(range(-60, 61, 3), repeat=2):
        p = (Fraction(x, 1) + Fraction(1, 97), Fraction(y, 1) + Fraction(1, 89))
        m = sum(1 << i for i, h in enumerate(planes) if plane_side(h, p) > 0)
        assert m in masks
