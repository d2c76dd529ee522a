"""Cutting the lattice into singletons and watching the incidence bounds at work."""

from incidence_lab import (
    LatticeSpec,
    bootstrap_iii,
    cube_lattice,
    enumerate_rich_lines,
    grid_cutting,
    incidence_bound_sweep,
    joints_bound_check,
    solymosi_rich_line_check,
)
from incidence_lab.lattice import axis_parallel_lines, example_iii_lines

spec = LatticeSpec(8)
pts = cube_lattice(spec)
cut = grid_cutting(spec)
print(len(pts), "points,", len(cut), "planes, C =", cut.constant_C)

# along each rich line most consecutive gaps are crossed by few planes
sol = solymosi_rich_line_check(pts, cut, 4, pair_cap=None)
print("4-rich lines:", sol.rich.distinct_lines, "rho =", sol.rho, "failures:", len(sol.failures))

# incidences of rich lines against close pairs of occupied cells
for k in (2, 4):
    rec = incidence_bound_sweep(pts, cut, k, pair_cap=None)
    print(f"k={k}: I={rec.incidences} close={rec.close_pairs} "
          f"I <= 6 close: {rec.proof_inequality}  I k^3/N^2 = {float(rec.ratio):.3f}")

# M lines in the middle regime come from the rich family with k ~ N^(1/2)/M^(1/4)
N = len(pts)
fam = example_iii_lines(N, 16000)
rep = bootstrap_iii(pts, cut, fam.lines)
print("case", fam.case, "k =", fam.k, "M =", rep.M, "I =", rep.incidences,
      "regime", rep.regime, f"I/(N^1/2 M^3/4) = {rep.ratio_middle:.3f}")

# the 2x2x2 cube with all 28 of its lines: average richness below 2
small = LatticeSpec(2)
p2 = cube_lattice(small)
r2 = bootstrap_iii(p2, grid_cutting(small), enumerate_rich_lines(p2, 2).keys)
print("n=2:", r2.proof_case, r2.incidences, "<", 4 * r2.M)

# joints of the axis-parallel grid lines
for n in (2, 3, 4):
    j = joints_bound_check(axis_parallel_lines(n), grid_cutting(LatticeSpec(n)))
    print(f"n={n}: joints={j.n} lines={j.m} bound={j.bound:.1f} passed={j.passed}")
