"""Parameter sweeps producing exact measurement records.

Every record carries an exact integer count and a normalizer; the ratio is
rendered to 6 significant digits, half-even. Normalizers are exact fractions
when rational and 28-digit decimals otherwise, so output is byte-stable.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from decimal import ROUND_HALF_EVEN, Context, Decimal, localcontext
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from . import arrangement as arr
from .cutting import bootstrap_iii, grid_cutting, incidence_bound_sweep, solymosi_rich_line_check
from .exact import GeometryError, canonical_line
from .joints import detect_joints, joints_bound_check
from .lattice import EmptyRangeWarning, LatticeSpec, axis_parallel_lines, cube_lattice, example_iii_lines, shifted_rich_lines
from .richlines import DEFAULT_PAIR_CAP, enumerate_rich_lines, rich_lines_oracle, st_bound_ratio

CSV_FIELDS = ("experiment", "d", "n", "k", "rho", "seed", "quantity", "count", "normalizer", "ratio")
_RATIO_CTX = Context(prec=6, rounding=ROUND_HALF_EVEN)
_NORM_PREC = 28
# lattice sweeps reach n = 16 (about 8.4e6 point pairs)
LATTICE_PAIR_CAP = 10**7


class UsageError(GeometryError):
    """Invalid sweep configuration."""


def _dec(x) -> Decimal:
    with localcontext() as ctx:
        ctx.prec = _NORM_PREC
        if isinstance(x, Fraction):
            return Decimal(x.numerator) / Decimal(x.denominator)
        return +Decimal(x)


def root(x: int, num: int, den: int) -> Fraction | Decimal:
    """``x ** (num / den)``: exact when ``x`` is a perfect ``den``-th power, else a 28-digit decimal."""
    r = round(x ** (1 / den))
    for c in (r - 1, r, r + 1):
        if c >= 0 and c**den == x:
            return Fraction(c**num)
    with localcontext() as ctx:
        ctx.prec = _NORM_PREC
        return Decimal(x) ** (Decimal(num) / Decimal(den))


def _mul(a, b):
    if isinstance(a, Fraction) and isinstance(b, (int, Fraction)):
        return a * b
    with localcontext() as ctx:
        ctx.prec = _NORM_PREC
        return _dec(a) * _dec(b)


def _pow(q, num: int, den: int):
    """``q ** (num/den)`` for a nonnegative rational ``q``."""
    q = Fraction(q)
    a, b = root(q.numerator, num, den), root(q.denominator, num, den)
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a / b
    with localcontext() as ctx:
        ctx.prec = _NORM_PREC
        return _dec(a) / _dec(b)


@dataclass(frozen=True)
class ExperimentRecord:
    experiment: str
    quantity: str
    count: int
    normalizer: Fraction | Decimal
    d: int | None = None
    n: int | None = None
    k: int | None = None
    rho: int | None = None
    seed: int | None = None
    passed: bool | None = field(default=None, compare=False)

    @property
    def ratio(self) -> Decimal:
        num = Decimal(self.count)
        if isinstance(self.normalizer, Fraction):
            return _RATIO_CTX.divide(num * self.normalizer.denominator, Decimal(self.normalizer.numerator))
        return _RATIO_CTX.divide(num, self.normalizer)

    @property
    def ratio_value(self) -> float:
        if isinstance(self.normalizer, Fraction):
            return float(Fraction(self.count) / self.normalizer)
        return float(Decimal(self.count) / self.normalizer)

    def normalizer_text(self) -> str:
        return str(self.normalizer)

    def row(self) -> dict:
        def blank(v):
            return "" if v is None else v
        return {
            "experiment": self.experiment, "d": blank(self.d), "n": blank(self.n), "k": blank(self.k),
            "rho": blank(self.rho), "seed": blank(self.seed), "quantity": self.quantity,
            "count": self.count, "normalizer": self.normalizer_text(), "ratio": str(self.ratio),
        }

    def sort_key(self):
        def nz(v):
            return -1 if v is None else v
        return (self.experiment, nz(self.d), nz(self.n), nz(self.k), nz(self.rho), nz(self.seed), self.quantity)


def check(experiment, quantity, failures: int, **params) -> ExperimentRecord:
    """A pass/fail record: the count is the number of failures."""
    return ExperimentRecord(experiment, quantity, failures, Fraction(1), passed=failures == 0, **params)


def measure(experiment, quantity, count: int, normalizer, **params) -> ExperimentRecord:
    if not isinstance(normalizer, (Fraction, Decimal)):
        normalizer = Fraction(normalizer)
    return ExperimentRecord(experiment, quantity, int(count), normalizer, **params)


# -- experiments ---------------------------------------------------------------

def random_points(count: int, seed: int, lo: int = 0, hi: int = 10, d: int = 3) -> list[tuple]:
    """Distinct random integer points of ``[lo, hi]^d`` (numpy PCG64)."""
    rng = np.random.default_rng(seed)
    pts: dict[tuple, None] = {}
    while len(pts) < count:
        pts.setdefault(tuple(int(v) for v in rng.integers(lo, hi + 1, size=d)), None)
    return list(pts)


def exp_rich_lines_vs_oracle(p, caps):
    N, k, seed = p["N"], p["k"], p["seed"]
    pts = random_points(N, seed)
    fast = enumerate_rich_lines(pts, k, pair_cap=caps.get("pairs", DEFAULT_PAIR_CAP))
    slow = rich_lines_oracle(pts, k)
    a, b = fast.lines, slow.lines
    mismatch = len(set(a.items()) ^ set(b.items()))
    return [check("rich-lines-vs-oracle", "oracle_mismatch", mismatch, d=3, n=N, k=k, seed=seed),
            measure("rich-lines-vs-oracle", "rich_lines", fast.distinct_lines, 1, d=3, n=N, k=k, seed=seed)]


def exp_lattice_richness(p, caps):
    n, k = p["n"], p["k"]
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", EmptyRangeWarning)
        fam = shifted_rich_lines(n, k, cap=caps.get("lines", 10**7))
    tags = dict(d=3, n=n, k=k)
    out = [measure("lattice-construction-richness", "distinct_lines", fam.distinct_count,
                   Fraction(n**6, k**4), **tags)]
    bad_count = int(((fam.lattice_counts < k) | (fam.lattice_counts > 4 * k)).sum()) + fam.dropped
    bad_mult = int((fam.multiplicity > 4 * k).sum())
    out.append(check("lattice-construction-richness", "points_outside_k_4k", bad_count, **tags))
    out.append(check("lattice-construction-richness", "multiplicity_over_4k", bad_mult, **tags))
    return out


def _arrangement(p, d=3):
    return arr.enumerate_cells(arr.random_generic_planes(p["n"], d, p["seed"]), cap=p.get("plane_cap", 16))


def exp_main_lemma(p, caps):
    n, rho, seed = p["n"], p["rho"], p["seed"]
    a = _arrangement(p)
    stats = a.short_distance_graph(rho)
    tags = dict(d=3, n=n, rho=rho, seed=seed)
    out = [measure("main-lemma-ratio", "E_rho", stats.edges, rho**3 * n**3, **tags),
           check("main-lemma-ratio", "cell_count_mismatch", int(len(a) != arr.cell_count_formula(n, 3)), **tags)]
    if n <= caps.get("oracle_n", 8):
        out.append(check("main-lemma-ratio", "E_rho_oracle_mismatch",
                         int(stats.edges != a.close_pairs_bruteforce(rho)), **tags))
    return out


def exp_zone(p, caps):
    n, rho, seed = p["n"], p["rho"], p["seed"]
    a = _arrangement(p)
    size = max(len(a.rho_zone(h, rho)) for h in range(n))
    return [measure("zone-ratio", "max_rho_zone", size, rho * n * n, d=3, n=n, rho=rho, seed=seed)]


def exp_level(p, caps):
    n, rho, seed = p["n"], p["rho"], p["seed"]
    a = _arrangement(p)
    tags = dict(d=3, n=n, rho=rho, seed=seed)
    mismatch = sum(1 for c in range(len(a)) if a.level(c) != a.level_from_signs(c))
    return [measure("level-ratio", "cells_level_le_rho", len(a.cells_at_level_le(rho)), rho**2 * n, **tags),
            check("level-ratio", "level_method_mismatch", mismatch, **tags)]


def exp_neighborhood(p, caps):
    n, rho, seed = p["n"], p["rho"], p["seed"]
    a = _arrangement(p)
    s = a.short_distance_graph(rho)
    tags = dict(d=3, n=n, rho=rho, seed=seed)
    # the cell maximizing |B_rho| / (rho^2 n_j)
    worst = max(range(len(a)), key=lambda c: Fraction(int(s.ball_sizes[c]), int(s.incident_planes[c])))
    return [
        measure("neighborhood-ratio", "max_ball", s.max_ball, rho**2 * n, **tags),
        measure("neighborhood-ratio", "sum_incident_planes", s.sum_incident, rho * n**3, **tags),
        measure("neighborhood-ratio", "ball_over_incident", int(s.ball_sizes[worst]),
                rho**2 * int(s.incident_planes[worst]), **tags),
        check("neighborhood-ratio", "ordered_pair_identity",
              int(s.sum_ball != 2 * s.edges + len(a)), **tags),
    ]


def exp_planar_neighborhood(p, caps):
    n, rho, seed = p["n"], p["rho"], p["seed"]
    a = _arrangement(p, d=2)
    s = a.short_distance_graph(rho)
    tags = dict(d=2, n=n, rho=rho, seed=seed)
    return [measure("planar-neighborhood-ratio", "sum_ball", s.sum_ball, rho**2 * n**2, **tags),
            check("planar-neighborhood-ratio", "cell_count_mismatch",
                  int(len(a) != arr.cell_count_formula(n, 2)), **tags)]


def _lattice(n):
    spec = LatticeSpec(n, 3)
    return cube_lattice(spec), grid_cutting(spec)


def exp_solymosi(p, caps):
    n, k = p["n"], p["k"]
    pts, cut = _lattice(n)
    rep = solymosi_rich_line_check(pts, cut, k, pair_cap=caps.get("pairs", LATTICE_PAIR_CAP))
    tags = dict(d=3, n=n, k=k, rho=rep.rho)
    return [check("solymosi-check", "failing_lines", len(rep.failures), **tags),
            measure("solymosi-check", "rich_lines", rep.rich.distinct_lines, 1, **tags)]


def exp_incidence_sweep(p, caps):
    n, k = p["n"], p["k"]
    pts, cut = _lattice(n)
    rec = incidence_bound_sweep(pts, cut, k, pair_cap=caps.get("pairs", LATTICE_PAIR_CAP))
    tags = dict(d=3, n=n, k=k, rho=rec.rho)
    return [measure("incidence-sweep", "incidences", rec.incidences, Fraction(rec.N**2, k**3), **tags),
            measure("incidence-sweep", "close_pairs", rec.close_pairs, 1, **tags),
            check("incidence-sweep", "proof_inequality_violations", int(not rec.passed), **tags)]


def middle_regime_M(n: int) -> int:
    """A line count M = N^2 / k^4 (k = max(2, n/4)), kept below N^2/16, whose rich family is nonempty."""
    k = max(2, n // 4)
    return min(n**6 // k**4, n**6 // 16 - 1)


def exp_bootstrap(p, caps):
    n = p["n"]
    N = n**3
    M_req = p.get("M") or middle_regime_M(n)
    pts, cut = _lattice(n)
    fam = example_iii_lines(N, M_req, cap=caps.get("lines", 2 * 10**5))
    if not fam.lines:
        raise UsageError(f"example family for N={N}, M={M_req} is empty")
    rep = bootstrap_iii(pts, cut, fam.lines)
    M, I = rep.M, rep.incidences
    tags = dict(d=3, n=n, k=fam.k)
    return [
        measure("bootstrap-iii", "M", M, 1, **tags),
        measure("bootstrap-iii", "incidences_linear", I, M, **tags),
        measure("bootstrap-iii", "incidences_middle", I, _mul(root(N, 1, 2), root(M, 3, 4)), **tags),
        measure("bootstrap-iii", "incidences_low", I, _mul(root(N, 1, 3), M), **tags),
        check("bootstrap-iii", "check_failures", sum(1 for v in rep.checks.values() if not v), **tags),
    ]


def exp_joints(p, caps):
    n = p["n"]
    lines = axis_parallel_lines(n)
    cut = grid_cutting(LatticeSpec(n))
    rep = joints_bound_check(lines, cut)
    J = len(detect_joints(lines))
    m = len(lines)
    C = rep.constant_C
    bound = _mul(root(m, 3, 2), _pow(C, 3, 2))
    tags = dict(d=3, n=n)
    return [measure("joints-bound", "joints", J, bound, **tags),
            check("joints-bound", "joint_count_mismatch", int(J != n**3 or m != 3 * n * n), **tags),
            check("joints-bound", "chain_failures", sum(1 for v in rep.checks.values() if not v), **tags)]


def exp_st_baseline(p, caps):
    n, k = p["n"], p["k"]
    pts = list(itertools.product(range(1, n + 1), repeat=2))
    rich = enumerate_rich_lines(pts, k, pair_cap=caps.get("pairs", DEFAULT_PAIR_CAP))
    st = st_bound_ratio(pts, rich.keys)
    N, m = len(pts), rich.distinct_lines
    r = root(N * m, 2, 3)
    norm = r + N + m if isinstance(r, Fraction) else _dec(r + N + m)
    return [measure("st-baseline", "incidences", st.incidences, norm, d=2, n=n, k=k)]


EXPERIMENTS: dict[str, tuple[Callable, dict]] = {
    "rich-lines-vs-oracle": (exp_rich_lines_vs_oracle, {"N": [50], "k": [2, 3], "seed": list(range(20))}),
    "lattice-construction-richness": (exp_lattice_richness, {"n": [8, 16, 32], "k": [2, 4]}),
    "main-lemma-ratio": (exp_main_lemma, {"n": [6, 8, 10], "rho": [1, 2, 3], "seed": list(range(5))}),
    "zone-ratio": (exp_zone, {"n": [6, 8, 10], "rho": [1, 2, 3], "seed": list(range(5))}),
    "level-ratio": (exp_level, {"n": [6, 8, 10], "rho": [1, 2, 3], "seed": list(range(5))}),
    "neighborhood-ratio": (exp_neighborhood, {"n": [6, 8, 10], "rho": [1, 2, 3], "seed": list(range(5))}),
    "planar-neighborhood-ratio": (exp_planar_neighborhood, {"n": [8, 10, 12], "rho": [1, 2, 3], "seed": list(range(5))}),
    "solymosi-check": (exp_solymosi, {"n": [4, 8], "k": [2, 4]}),
    "incidence-sweep": (exp_incidence_sweep, {"n": [8, 16], "k": [2, 4]}),
    "bootstrap-iii": (exp_bootstrap, {"n": [8, 16]}),
    "joints-bound": (exp_joints, {"n": [2, 3, 4]}),
    "st-baseline": (exp_st_baseline, {"n": [4, 8], "k": [2, 3]}),
}

_ARRANGEMENT_EXPS = ("main-lemma-ratio", "zone-ratio", "level-ratio", "neighborhood-ratio", "planar-neighborhood-ratio")
_OPTIONAL_KEYS = {"bootstrap-iii": {"M"}, **{e: {"plane_cap"} for e in _ARRANGEMENT_EXPS}}


@dataclass
class SweepConfig:
    experiment: str
    grid: dict[str, list] | None = None
    caps: dict[str, int] = field(default_factory=dict)
    workers: int = 1

    def resolved_grid(self) -> dict[str, list]:
        if self.experiment not in EXPERIMENTS:
            raise UsageError(f"unknown experiment {self.experiment!r}; choose from {sorted(EXPERIMENTS)}")
        grid = dict(EXPERIMENTS[self.experiment][1])
        if self.grid is not None:
            unknown = set(self.grid) - set(grid) - _OPTIONAL_KEYS.get(self.experiment, set())
            if unknown:
                raise UsageError(f"unknown grid keys for {self.experiment}: {sorted(unknown)}")
            grid.update(self.grid)
        if not grid or any(len(v) == 0 for v in grid.values()):
            raise UsageError("parameter grid is empty")
        return grid

    def points(self) -> list[dict]:
        grid = self.resolved_grid()
        keys = sorted(grid)
        return [dict(zip(keys, vals)) for vals in itertools.product(*(grid[k] for k in keys))]


def _run_point(args):
    name, params, caps = args
    return EXPERIMENTS[name][0](params, caps)


def run_experiment(config: SweepConfig) -> list[ExperimentRecord]:
    """Run every grid point; records come back sorted by (experiment, parameters, seed, quantity)."""
    if config.grid is not None and not config.grid:
        raise UsageError("parameter grid is empty")
    jobs = [(config.experiment, p, dict(config.caps)) for p in config.points()]
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as pool:
            chunks = list(pool.map(_run_point, jobs))
    else:
        chunks = [_run_point(j) for j in jobs]
    return sorted((r for c in chunks for r in c), key=ExperimentRecord.sort_key)


# -- aggregation and output ----------------------------------------------------

@dataclass
class ConstantFit:
    quantity: str
    per_scale: dict
    sup_ratio: float

    @property
    def stability_factor(self) -> float:
        vals = list(self.per_scale.values())
        return max(vals) / min(vals) if min(vals) > 0 else math.inf


def fit_constant(records: Iterable[ExperimentRecord], quantity: str,
                 scale: Callable[[ExperimentRecord], object] = lambda r: r.n) -> ConstantFit:
    """Mean ratio per scale group (default: instance size n) and the max/min factor across groups."""
    groups: dict = {}
    for r in records:
        if r.quantity == quantity:
            groups.setdefault(scale(r), []).append(r.ratio_value)
    if len(groups) < 2:
        raise UsageError(f"fit_constant needs at least two scales for {quantity!r}, got {len(groups)}")
    per_scale = {s: sum(v) / len(v) for s, v in sorted(groups.items())}
    sup = max(max(v) for v in groups.values())
    return ConstantFit(quantity, per_scale, sup)


def all_passed(records: Iterable[ExperimentRecord]) -> bool:
    return all(r.passed is not False for r in records)


def to_csv(records: Iterable[ExperimentRecord]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    w.writeheader()
    for r in records:
        w.writerow(r.row())
    return buf.getvalue()


def to_jsonl(records: Iterable[ExperimentRecord]) -> str:
    return "".join(json.dumps(r.row(), sort_keys=False) + "\n" for r in records)


def plot_data(records: Iterable[ExperimentRecord]) -> str:
    """Per (experiment, quantity): x = instance size n, y = mean ratio, as CSV."""
    records = [r for r in records if r.passed is None and r.n is not None]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["experiment", "quantity", "x", "y"])
    keys = sorted({(r.experiment, r.quantity) for r in records})
    for exp, q in keys:
        sub = [r for r in records if (r.experiment, r.quantity) == (exp, q)]
        by_n: dict = {}
        for r in sub:
            by_n.setdefault(r.n, []).append(r.ratio_value)
        for n, vals in sorted(by_n.items()):
            w.writerow([exp, q, n, format(sum(vals) / len(vals), ".6g")])
    return buf.getvalue()
