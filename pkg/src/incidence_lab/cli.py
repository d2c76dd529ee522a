"""Command-line entry point: one subcommand per module plus ``sweep``.

Exit codes: 0 when every check passes, 1 on any FAIL, 2 on usage errors
(bad arguments, exceeded caps, violated preconditions).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from contextlib import contextmanager

from . import arrangement as arr
from . import harness
from .cutting import grid_cutting, incidence_bound_sweep, is_proper_cutting
from .exact import CapExceeded, GeometryError, point
from .joints import detect_joints, joints_bound_check
from .lattice import LatticeSpec, axis_parallel_lines, cube_lattice, shifted_rich_lines
from .richlines import DEFAULT_PAIR_CAP, enumerate_rich_lines

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


@contextmanager
def _output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _csv(rows: list[dict], fields) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def _emit(args, records: list[harness.ExperimentRecord], extra_json: dict | None = None) -> int:
    with _output(args.out) as fh:
        if args.format == "csv":
            fh.write(harness.to_csv(records))
        elif extra_json is not None:
            fh.write(json.dumps(extra_json, sort_keys=True) + "\n")
        else:
            fh.write(harness.to_jsonl(records))
    return EXIT_PASS if harness.all_passed(records) else EXIT_FAIL


def cmd_lattice(args) -> int:
    fam = shifted_rich_lines(args.n, args.k, cap=args.cap or 10**7)
    with _output(args.out) as fh:
        if args.format == "json":
            for line in fam.iter_json_lines():
                fh.write(line + "\n")
        else:
            rows = []
            for i in range(fam.distinct_count):
                key = fam.key(i)
                rows.append({"direction": " ".join(map(str, key.direction)),
                             "basepoint": " ".join(map(str, key.basepoint)),
                             "multiplicity": int(fam.multiplicity[i]),
                             "lattice_points": int(fam.lattice_counts[i])})
            fh.write(_csv(rows, ("direction", "basepoint", "multiplicity", "lattice_points")))
    for w in fam.warnings:
        print(f"warning: {w}", file=sys.stderr)
    ok = all(args.k <= c <= 4 * args.k for c in fam.lattice_counts) and all(m <= 4 * args.k for m in fam.multiplicity)
    return EXIT_PASS if ok else EXIT_FAIL


def _load_points(path):
    with open(path) as fh:
        data = json.load(fh)
    return [point(*p) for p in data]


def cmd_rich_lines(args) -> int:
    if args.points:
        pts = _load_points(args.points)
    elif args.n:
        pts = cube_lattice(LatticeSpec(args.n, args.d))
    else:
        pts = harness.random_points(args.random, args.seed or 0)
    rep = enumerate_rich_lines(pts, args.k, pair_cap=args.cap or DEFAULT_PAIR_CAP)
    with _output(args.out) as fh:
        if args.format == "json":
            fh.write(rep.dumps() + "\n")
        else:
            fh.write(_csv([rep.summary_row()], ("N", "k", "distinct_lines", "incidences")))
    return EXIT_PASS


def cmd_arrangement(args) -> int:
    args.seed = args.seed or 0
    planes = arr.random_generic_planes(args.n, args.d, args.seed)
    index = arr.enumerate_cells(planes, cap=args.cap or arr.DEFAULT_PLANE_CAP)
    if args.format == "json":
        with _output(args.out) as fh:
            fh.write(index.dumps() + "\n")
        return EXIT_PASS if len(index) == arr.cell_count_formula(args.n, args.d) else EXIT_FAIL
    exp = "main-lemma-ratio" if args.d == 3 else "planar-neighborhood-ratio"
    recs = harness.run_experiment(harness.SweepConfig(
        exp, {"n": [args.n], "rho": args.rho, "seed": [args.seed]}))
    return _emit(args, recs)


def cmd_cutting(args) -> int:
    spec = LatticeSpec(args.n, 3)
    pts = cube_lattice(spec)
    cut = grid_cutting(spec)
    verdict = is_proper_cutting(pts, cut.planes)
    if not verdict.passed:
        with _output(args.out) as fh:
            fh.write(json.dumps(verdict.certificate(), sort_keys=True) + "\n")
        return EXIT_FAIL
    rows, ok = [], True
    for k in args.k:
        rec = incidence_bound_sweep(pts, cut, k, pair_cap=args.cap or harness.LATTICE_PAIR_CAP)
        ok &= rec.passed
        rows.append({"N": rec.N, "planes": rec.n_planes, "k": k, "rho": rec.rho,
                     "rich_lines": rec.rich_line_count, "incidences": rec.incidences,
                     "close_pairs": rec.close_pairs, "ratio": str(harness.measure(
                         "incidence-sweep", "incidences", rec.incidences, harness.Fraction(rec.N**2, k**3)).ratio),
                     "verdict": "PASS" if rec.passed else "FAIL"})
    with _output(args.out) as fh:
        if args.format == "json":
            for r in rows:
                fh.write(json.dumps(r) + "\n")
        else:
            fh.write(_csv(rows, rows[0].keys()))
    return EXIT_PASS if ok else EXIT_FAIL


def cmd_joints(args) -> int:
    lines = axis_parallel_lines(args.n)
    cut = grid_cutting(LatticeSpec(args.n))
    rep = joints_bound_check(lines, cut, joints_only=True)
    recs = harness.run_experiment(harness.SweepConfig("joints-bound", {"n": [args.n]}))
    payload = rep.to_json()
    payload["joints"] = len(detect_joints(lines, cap=args.cap or 5000))
    code = _emit(args, recs, extra_json=payload)
    return code if rep.passed else EXIT_FAIL


def _parse_grid(items: list[str]) -> dict[str, list]:
    grid: dict[str, list] = {}
    for item in items:
        for part in item.split(";"):
            part = part.strip()
            if not part:
                continue
            key, sep, vals = part.partition("=")
            if not sep or not key:
                raise GeometryError(f"bad grid entry {part!r}; expected key=v1,v2")
            try:
                grid[key.strip()] = [int(v) for v in vals.split(",") if v.strip()]
            except ValueError as exc:
                raise GeometryError(f"grid values must be integers: {part!r}") from exc
    return grid


def cmd_sweep(args) -> int:
    grid = _parse_grid(args.grid) if args.grid else None
    defaults = harness.EXPERIMENTS[args.experiment][1]
    if args.seed is not None and "seed" in defaults and "seed" not in (grid or {}):
        grid = {**(grid or {}), "seed": [args.seed]}
    caps = {"pairs": args.cap} if args.cap else {}
    cfg = harness.SweepConfig(args.experiment, grid, caps, workers=args.workers)
    recs = harness.run_experiment(cfg)
    if args.plot_data:
        with open(args.plot_data, "w", newline="") as fh:
            fh.write(harness.plot_data(recs))
    return _emit(args, recs)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="incidence-lab", description="Exact incidence and arrangement experiments.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--out", help="output file (default: stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--seed", type=int, default=None)
        sp.add_argument("--cap", type=int, default=None, help="size cap for the main enumeration")
        return sp

    sp = common(sub.add_parser("lattice", help="shifted rich-line family on {1..n}^3"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=cmd_lattice)

    sp = common(sub.add_parser("rich-lines", help="enumerate k-rich lines"))
    src = sp.add_mutually_exclusive_group(required=True)
    src.add_argument("--points", help="JSON file with a list of points")
    src.add_argument("--n", type=int, help="use the cube lattice {1..n}^d")
    src.add_argument("--random", type=int, help="this many random points of [0,10]^3")
    sp.add_argument("--d", type=int, default=3)
    sp.add_argument("--k", type=int, required=True)
    sp.set_defaults(func=cmd_rich_lines)

    sp = common(sub.add_parser("arrangement", help="cells and short-distance statistics"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--d", type=int, choices=(2, 3), default=3)
    sp.add_argument("--rho", type=int, nargs="+", default=[1])
    sp.set_defaults(func=cmd_arrangement)

    sp = common(sub.add_parser("cutting", help="grid cutting checks on {1..n}^3"))
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--k", type=int, nargs="+", default=[2])
    sp.set_defaults(func=cmd_cutting)

    sp = common(sub.add_parser("joints", help="joints of the axis-parallel grid lines"))
    sp.add_argument("--n", type=int, required=True)
    sp.set_defaults(func=cmd_joints)

    sp = common(sub.add_parser("sweep", help="run a named experiment over a parameter grid"))
    sp.add_argument("--experiment", required=True, choices=sorted(harness.EXPERIMENTS))
    sp.add_argument("--grid", action="append", help="key=v1,v2 (repeatable, or ';'-separated)")
    sp.add_argument("--plot-data", help="also write (x, y) plot data CSV here")
    sp.add_argument("--workers", type=int, default=1)
    sp.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CapExceeded as exc:
        print(json.dumps({"error": "cap-exceeded", "cap": exc.cap, "limit": exc.limit,
                          "requested": exc.requested}), file=sys.stderr)
        return EXIT_USAGE
    except GeometryError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BrokenPipeError:
        # downstream closed the pipe (e.g. `| head`)
        sys.stdout = open(os.devnull, "w")
        return EXIT_PASS


if __name__ == "__main__":
    raise SystemExit(main())
