# Growth rates from the top singular value of the cell-rate matrix.

import math

import numpy as np

from gridgrow.grid import parse_grid
from gridgrow.spectral import (bipartite_block_eigenvalue, build_gamma, load_catalog,
                               parse_catalog, predict_growth_rate)

grids = {
    "skew-merged": "Av(12) Av(21)\nAv(21) Av(12)",
    "321 corner": "Av(321) .\nAv(12) Av(12)",
    "monotone L": "inc .\ninc dec",
    "two increasing runs": "inc inc",
    "rates given directly": "gr=2.25 inc\n. gr=9",
}

for name, text in grids.items():
    pred = predict_growth_rate(parse_grid(text))
    print(f"{name:>22}: gr = {pred.gr:.12f}")
    print("      gamma =", pred.gamma.tolist())
    print("      blueprint =", np.round(pred.X, 4).tolist())

print("3 + sqrt(5)      =", 3 + math.sqrt(5))
print("golden ratio ^ 2 =", ((1 + math.sqrt(5)) / 2) ** 2)

# For monotone grids the same number is the squared spectral radius of the
# bipartite graph joining columns to rows.
gamma = build_gamma(parse_grid("inc .\ninc dec"))
print("bipartite radius ^ 2:", bipartite_block_eigenvalue(gamma) ** 2)

# Classes outside the built-in catalog need a rate supplied by the caller.
catalog = load_catalog()
catalog.update(parse_catalog("Av(4231) = 9.81"))
print("with Av(4231):", predict_growth_rate(parse_grid("Av(4231) inc"), catalog).gr)
