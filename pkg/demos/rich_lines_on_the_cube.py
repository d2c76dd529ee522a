"""Rich lines on the cube lattice, and the shifted family that keeps them plentiful."""

from itertools import product

from incidence_lab import enumerate_rich_lines, rich_lines_oracle, shifted_rich_lines
from incidence_lab.lattice import origin_rich_directions

# the 2x2x2 cube: every pair of points spans a line, 28 in all
cube = list(product((1, 2), repeat=3))
rep = enumerate_rich_lines(cube, 2)
print("lines through {1,2}^3:", rep.distinct_lines, "incidences:", rep.total_incidences)

# 3-rich lines of the 3x3x3 cube, checked against the brute-force scan
cube3 = list(product((1, 2, 3), repeat=3))
fast = enumerate_rich_lines(cube3, 3)
assert fast.lines == rich_lines_oracle(cube3, 3).lines
print("3-rich lines in {1,2,3}^3:", fast.distinct_lines)
for key, count in list(fast.lines.items())[:5]:
    print("   ", key, count)

# origin directions of the k-rich family (u in n/4k..n/2k, coprime (v, w))
print("directions for n=8, k=2:", origin_rich_directions(8, 2))

# shifting each origin line by {1..n/2}^3 gives many distinct k-rich lines
for n, k in [(16, 2), (32, 2), (32, 4)]:
    fam = shifted_rich_lines(n, k)
    print(f"n={n:2d} k={k}: {fam.distinct_count:7d} lines, "
          f"points per line {fam.lattice_counts.min()}..{fam.lattice_counts.max()}, "
          f"max multiplicity {fam.multiplicity.max()}, "
          f"density {fam.distinct_count * k**4 / n**6:.5f}")
