# Exact counts of gridded permutations and how they compare with the
# ungridded class.

from gridgrow.grid import (WeightMatrix, argmax_weight_matrix, brute_force_membership,
                           cell_count_tables, count_gridded_fixed, count_gridded_total,
                           count_ungridded, parse_grid)

# Skew-merged permutations: an increasing and a decreasing sequence merged.
# Rows are written top row first.
skew = parse_grid("""
Av(12) Av(21)
Av(21) Av(12)
""")

# One point in each cell: 2 interleavings per column and per row.
print("all-ones occupancy:", count_gridded_fixed(skew, WeightMatrix(((1, 1), (1, 1)))))

# Gridded versus ungridded counts.  A permutation of length n has at most
# (n+1)^(t+u) griddings, so the two grow at the same exponential rate.
print(f"{'n':>2} {'ungridded':>10} {'gridded':>10} {'ratio':>8}")
for n in range(8):
    ug, g = count_ungridded(skew, n), count_gridded_total(skew, n)
    print(f"{n:>2} {ug:>10} {g:>10} {g / ug:>8.2f}")

# Successive ratios of the gridded counts approach the growth rate 4.
tables = cell_count_tables(skew, 60)
prev = 1
for n in range(1, 61):
    cur = count_gridded_total(skew, n, tables)
    if n % 10 == 0:
        print(f"n = {n}: ratio {cur / prev:.5f}")
    prev = cur

# The occupancy with the most gridded permutations is spread evenly.
A, count = argmax_weight_matrix(skew, 40, tables)
print("most popular occupancy at n = 40:", A.entries, count)

# A witness gridding for a long skew-merged permutation.
perm = (14, 1, 5, 7, 12, 10, 11, 9, 13, 15, 8, 6, 4, 16, 3, 2)
print(brute_force_membership(skew, perm, cap=len(perm)))
