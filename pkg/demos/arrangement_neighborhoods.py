"""Cells of a random plane arrangement and how many of them sit close together."""

from incidence_lab import cell_count_formula, enumerate_cells, random_generic_planes

planes = random_generic_planes(8, d=3, seed=1)
for h in planes[:3]:
    print(h)

A = enumerate_cells(planes)
print("cells:", len(A), "expected:", cell_count_formula(8, 3))

# one cell, its sign vector and an exact interior point
c = A.cells[0]
print("cell 0 signs", c.signs(A.m), "witness", c.witness)

# rho-neighborhoods grow like rho^2 n; the close-pair graph like rho^3 n^3
for rho in (1, 2, 3):
    s = A.short_distance_graph(rho)
    print(f"rho={rho}: |E|={s.edges:5d}  |E|/(rho^3 n^3)={s.edges / (rho**3 * 8**3):.3f}  "
          f"max|B|={s.max_ball:3d}  max|B|/(rho^2 n)={s.max_ball / (rho**2 * 8):.3f}")
    assert s.edges == A.close_pairs_bruteforce(rho)

# zone of the first plane and its rho-thickening
print("zone sizes:", [len(A.zone(i)) for i in range(A.m)])
print("1-zone of plane 0:", len(A.rho_zone(0, 1)))

# levels, by ray shooting and by reading the sign vector
levels = [A.level(i) for i in range(len(A))]
assert levels == [A.level_from_signs(i) for i in range(len(A))]
print("cells at level <= 1:", len(A.cells_at_level_le(1)))
