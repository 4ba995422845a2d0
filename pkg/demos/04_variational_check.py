# The variational function f on unit-weight occupancy matrices: its value at
# the blueprint, its gradient and a search for its maximum.

import numpy as np

from gridgrow.grid import parse_grid
from gridgrow.spectral import blueprint_X, build_gamma, top_singular_triple
from gridgrow.variational import (f_eval, finite_diff_check, grad_log_f, lagrange_ratios,
                                  lagrange_residual, simplex_search)

gamma = build_gamma(parse_grid("Av(321) .\nAv(12) Av(12)"))
res = top_singular_triple(gamma)
X = blueprint_X(gamma, res)

print("s^2             :", res.gr)
print("f(blueprint)    :", f_eval(gamma, X))
print("Lagrange ratios :", lagrange_ratios(gamma, X)[gamma > 0], "(all equal s =", res.s, ")")
print("residual        :", lagrange_residual(gamma, X))
print("gradient        :", grad_log_f(gamma, X)[gamma > 0])
print("finite diff err :", finite_diff_check(gamma, X))

# Anywhere else f is smaller.
rng = np.random.default_rng(0)
for _ in range(5):
    Y = np.zeros_like(gamma)
    Y[gamma > 0] = rng.dirichlet(np.ones(3))
    print(f"  f = {f_eval(gamma, Y):.6f}   residual = {lagrange_residual(gamma, Y):.3f}")

# A search that never looks at singular vectors lands on the same value.
found = simplex_search(gamma, 100_000, seed=1)
print("search best     :", found.f)
print("search argmax   :", np.round(found.X, 6).tolist())
print("blueprint       :", np.round(X, 6).tolist())
