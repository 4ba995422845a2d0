"""
Growth rates of permutation grid classes.

The growth rate of ``Grid(M)`` is the greatest eigenvalue of ``G^T G``, where
``G`` holds the square roots of the cells' growth rates.  Alongside that
prediction the package counts gridded permutations exactly, samples them
uniformly, and evaluates the variational function whose maximum the
eigenvalue is.

>>> from gridgrow import parse_grid, predict_growth_rate
>>> round(predict_growth_rate(parse_grid("inc dec\\ndec inc")).gr, 12)
4.0
"""

from .perms import (Basis, Permutation, avoids_all, contains, enumerate_av,
                    enumerate_av_lists, order_isomorphic)
from .grid import (AvClass, DirectRate, Empty, GriddedPermutation, GridMatrix, WeightMatrix,
                   admissible_weight_matrices, argmax_weight_matrix, brute_force_membership,
                   count_gridded_fixed, count_gridded_total, count_ungridded, parse_grid,
                   sample_gridded)
from .spectral import (SpectralResult, bipartite_block_eigenvalue, blueprint_X, build_gamma,
                       load_catalog, predict_growth_rate, top_singular_triple)
from .variational import (f_eval, finite_diff_check, grad_log_f, lagrange_residual,
                          simplex_search)

__version__ = "0.1.0"
