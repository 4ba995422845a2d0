# Uniform samples of gridded permutations with a prescribed occupancy.

from collections import Counter

import numpy as np

from gridgrow.grid import (WeightMatrix, argmax_weight_matrix, count_gridded_fixed,
                           is_valid_gridding, parse_grid, sample_gridded)
from gridgrow.spectral import predict_growth_rate

skew = parse_grid("Av(12) Av(21)\nAv(21) Av(12)")
A = WeightMatrix(((1, 1), (1, 1)))
print("size of the set:", count_gridded_fixed(skew, A))

rng = np.random.default_rng(0)
tally = Counter()
for _ in range(16_000):
    s = sample_gridded(skew, A, rng)
    tally[s.perm, s.column_divisions, s.row_divisions] += 1
for key, c in sorted(tally.items()):
    print(key[0], key[1], key[2], c)

# A typical large member: draw from the most popular occupancy and compare
# with the predicted limiting profile.
grid = parse_grid("inc .\ninc dec")
A, _ = argmax_weight_matrix(grid, 90)
s = sample_gridded(grid, A, 5)
assert is_valid_gridding(grid, s)
print("sample:", s.perm)
print("occupancy / n:", (np.array(A.entries) / 90).round(3).tolist())
print("blueprint    :", predict_growth_rate(grid).X.round(3).tolist())
