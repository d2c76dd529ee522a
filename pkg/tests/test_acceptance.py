"""Acceptance criteria, one test each; every test prints a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v`` (the lines are also
collected in the terminal summary) or as a script.
"""

import time
import warnings
from functools import lru_cache
from itertools import product

from conftest import ACCEPTANCE_LINES
from incidence_lab import arrangement as arr
from incidence_lab.cutting import bootstrap_iii, grid_cutting
from incidence_lab.harness import SweepConfig, fit_constant, run_experiment, to_csv
from incidence_lab.lattice import EmptyRangeWarning, LatticeSpec, cube_lattice, shifted_rich_lines
from incidence_lab.richlines import enumerate_rich_lines, rich_lines_oracle

FACTOR = 4
ARR_GRID = {"n": [6, 8, 10], "rho": [1, 2, 3], "seed": list(range(5))}


def report(num: int, title: str, passed: bool, detail: str, started: float) -> None:
    line = f"[{'PASS' if passed else 'FAIL'}] {num:>2}. {title}: {detail} ({time.perf_counter() - started:.1f}s)"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert passed, line


@lru_cache(maxsize=None)
def sweep(name: str, grid: tuple) -> list:
    return run_experiment(SweepConfig(name, {k: list(v) for k, v in grid}))


def _grid(d: dict) -> tuple:
    return tuple((k, tuple(v)) for k, v in sorted(d.items()))


def factor(records, quantity) -> float:
    return fit_constant(records, quantity).stability_factor


def test_01_rich_lines_oracle():
    t = time.perf_counter()
    cube2 = list(product((1, 2), repeat=3))
    cube3 = list(product((1, 2, 3), repeat=3))
    a = enumerate_rich_lines(cube2, 2)
    b = enumerate_rich_lines(cube3, 3)
    ok = a.distinct_lines == 28 and a.lines == rich_lines_oracle(cube2, 2).lines
    ok &= b.distinct_lines == 49 and b.lines == rich_lines_oracle(cube3, 3).lines
    recs = sweep("rich-lines-vs-oracle", _grid({"N": [50], "k": [2, 3], "seed": list(range(20))}))
    checks = [r for r in recs if r.quantity == "oracle_mismatch"]
    ok &= len(checks) == 40 and all(r.passed for r in checks)
    report(1, "rich lines == oracle", ok,
           f"{a.distinct_lines} lines at k=2, {b.distinct_lines} at k=3, "
           f"{sum(r.passed for r in checks)}/40 random sets equal", t)


def test_02_construction_validity():
    t = time.perf_counter()
    bad, checked = [], []
    for n, k in product((8, 16, 32), (2, 4)):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", EmptyRangeWarning)
            fam = shifted_rich_lines(n, k)
        if fam.distinct_count == 0:
            continue  # range empty at this (n, k)
        checked.append((n, k))
        counts, mult = fam.lattice_counts, fam.multiplicity
        if fam.dropped or counts.min() < k or counts.max() > 4 * k or mult.max() > 4 * k:
            bad.append((n, k))
    report(2, "shifted lines have k..4k points, multiplicity <= 4k", not bad and len(checked) == 5,
           f"checked {checked}, failures {bad}", t)


def test_03_construction_density():
    t = time.perf_counter()
    recs = sweep("lattice-construction-richness", _grid({"n": [16, 32], "k": [2]}))
    f = factor(recs, "distinct_lines")
    report(3, "density distinct*k^4/n^6 stable n=16 vs 32", f <= FACTOR, f"factor {f:.3f} <= {FACTOR}", t)


def test_04_cell_count_identity():
    t = time.perf_counter()
    bad = []
    for n, seed in product((4, 6, 8, 10), range(10)):
        got = len(arr.enumerate_cells(arr.random_generic_planes(n, 3, seed)))
        if got != arr.cell_count_formula(n, 3):
            bad.append((n, seed, got))
    report(4, "cell count = C(n,3)+C(n,2)+n+1", not bad, f"40 arrangements, mismatches {bad}", t)


def test_05_main_lemma():
    t = time.perf_counter()
    recs = sweep("main-lemma-ratio", _grid(ARR_GRID))
    oracle = [r for r in recs if r.quantity == "E_rho_oracle_mismatch"]
    exact = len(oracle) == 30 and all(r.passed for r in oracle)
    edges = [r for r in recs if r.quantity == "E_rho"]
    f = factor(edges, "E_rho")
    report(5, "|E_rho| = all-pairs oracle (n<=8); |E_rho|/(rho^3 n^3) stable",
           exact and len(edges) == 45 and f <= FACTOR,
           f"{sum(r.passed for r in oracle)}/30 exact, factor {f:.3f} <= {FACTOR}", t)


def test_06_neighborhood_zone_level():
    t = time.perf_counter()
    nb = sweep("neighborhood-ratio", _grid(ARR_GRID))
    zone = sweep("zone-ratio", _grid(ARR_GRID))
    lvl = sweep("level-ratio", _grid(ARR_GRID))
    planar = sweep("planar-neighborhood-ratio", _grid({**ARR_GRID, "n": [8, 10, 12]}))
    factors = {
        "max|B|/(rho^2 n)": factor(nb, "max_ball"),
        "sum n_j/(rho n^3)": factor(nb, "sum_incident_planes"),
        "rho-zone/(rho n^2)": factor(zone, "max_rho_zone"),
        "level<=rho/(rho^2 n)": factor(lvl, "cells_level_le_rho"),
        "planar sum|B|/(rho^2 n^2)": factor(planar, "sum_ball"),
    }
    consistent = all(r.passed is not False for r in nb + lvl + planar)
    ok = consistent and all(v <= FACTOR for v in factors.values())
    report(6, "neighborhood, zone, level ratios stable", ok,
           ", ".join(f"{k} {v:.3f}" for k, v in factors.items()), t)


def test_07_solymosi():
    t = time.perf_counter()
    recs = sweep("solymosi-check", _grid({"n": [4, 8], "k": [2, 4]}))
    checks = [r for r in recs if r.quantity == "failing_lines"]
    lines = sum(r.count for r in recs if r.quantity == "rich_lines")
    report(7, "every k-rich line has ceil(k_l/6) cheap segments", len(checks) == 4 and all(r.passed for r in checks),
           f"{lines} rich lines over 4 instances, failing {sum(r.count for r in checks)}", t)


def test_08_incidence_sweep():
    t = time.perf_counter()
    recs = sweep("incidence-sweep", _grid({"n": [8, 16], "k": [2, 4]}))
    proof = [r for r in recs if r.quantity == "proof_inequality_violations"]
    f = factor(recs, "incidences")
    ok = len(proof) == 4 and all(r.passed for r in proof) and f <= FACTOR
    report(8, "I*k^3/N^2 stable and I <= 6*close pairs", ok,
           f"factor {f:.3f} <= {FACTOR}, inequality holds on {sum(r.passed for r in proof)}/4", t)


def test_09_bootstrap():
    t = time.perf_counter()
    spec = LatticeSpec(2)
    pts = cube_lattice(spec)
    small = bootstrap_iii(pts, grid_cutting(spec), enumerate_rich_lines(pts, 2).keys)
    case_one = small.M == 28 and small.proof_case == "I" and small.incidences < 4 * small.M and small.passed
    recs = sweep("bootstrap-iii", _grid({"n": [8, 16]}))
    in_middle = all(
        (r.n**3) ** 2 < r.count**3 and 16 * r.count < (r.n**3) ** 2 for r in recs if r.quantity == "M")
    checks_ok = all(r.passed for r in recs if r.quantity == "check_failures")
    f = factor(recs, "incidences_middle")
    ok = case_one and in_middle and checks_ok and f <= FACTOR
    report(9, "bootstrap cases", ok,
           f"n=2: I={small.incidences} < 4M={4 * small.M} (k={small.k}); "
           f"middle regime I/(N^1/2 M^3/4) factor {f:.3f} n=8 vs 16", t)


def test_10_joints():
    t = time.perf_counter()
    recs = sweep("joints-bound", _grid({"n": [2, 3, 4]}))
    checks = [r for r in recs if r.passed is not None]
    joints = {r.n: r.count for r in recs if r.quantity == "joints"}
    ok = len(checks) == 6 and all(r.passed for r in checks) and joints == {n: n**3 for n in (2, 3, 4)}
    report(10, "|J| = n^3, m = 3n^2, joints bound holds", ok, f"joints {joints}", t)


def test_11_determinism():
    t = time.perf_counter()
    cfgs = [
        SweepConfig("main-lemma-ratio", {"n": [6, 8], "rho": [1, 2], "seed": [0, 1]}),
        SweepConfig("rich-lines-vs-oracle", {"N": [50], "k": [2], "seed": [0, 1, 2]}),
        SweepConfig("bootstrap-iii", {"n": [8]}),
    ]
    first = [to_csv(run_experiment(c)) for c in cfgs]
    second = [to_csv(run_experiment(c)) for c in cfgs]
    report(11, "sweep reruns give byte-identical CSV", first == second,
           f"{sum(len(s) for s in first)} bytes compared", t)


if __name__ == "__main__":
    for name, fn in sorted(globals().items()):
        if name.startswith("test_"):
            try:
                fn()
            except AssertionError:
                pass
