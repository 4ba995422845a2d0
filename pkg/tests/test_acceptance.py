"""
Exit criteria.  Each test checks one criterion at its stated tolerance and
runtime limit and prints a PASS/FAIL line (collected again in the terminal
summary).  Run alone with ``pytest tests/test_acceptance.py -s``.
"""

import itertools
import math
import time
from contextlib import contextmanager

import numpy as np
import pytest

import acceptance_log
from gridgrow.grid import (GriddedPermutation, WeightMatrix, cell_count_tables,
                           count_gridded_brute, count_gridded_total, count_ungridded,
                           is_valid_gridding, parse_grid, sample_gridded)
from gridgrow.perms import Basis, Permutation, enumerate_av, filter_av_counts
from gridgrow.spectral import (bipartite_block_eigenvalue, blueprint_X, build_gamma,
                               predict_growth_rate, top_singular_triple)
from gridgrow.variational import f_eval, finite_diff_check, lagrange_residual, simplex_search
from oracles import (CORNER_321, CORNER_321_BASES, GOLDEN, JUXTAPOSITION, JUXTAPOSITION_BASES,
                     L_SHAPE, SKEW_MERGED, SKEW_MERGED_BASES, catalan, naive_gridded_count,
                     naive_griddings, random_gamma, random_interior_point)


@contextmanager
def criterion(number, text, limit):
    start = time.perf_counter()
    ok = False
    try:
        yield
        elapsed = time.perf_counter() - start
        assert elapsed < limit, f"took {elapsed:.2f}s, limit {limit}s"
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {text} ({elapsed:.2f}s / {limit}s)"
        acceptance_log.LINES.append(line)
        print(line)


def test_1_skew_merged_prediction():
    with criterion(1, "skew-merged gr = 4 within 1e-9", 1.0):
        gr = predict_growth_rate(parse_grid(SKEW_MERGED)).gr
        assert abs(gr - 4) <= 1e-9


def test_2_corner_321_prediction():
    with criterion(2, "Av(321)/empty/Av(12)/Av(12) grid gr = 3 + sqrt5 within 1e-9", 1.0):
        # closed form: larger root of x^2 - 6x + 4
        expected = (6 + math.sqrt(36 - 16)) / 2
        gr = predict_growth_rate(parse_grid(CORNER_321)).gr
        assert abs(gr - expected) <= 1e-9


def test_3_monotone_l_grid_bipartite():
    with criterion(3, "monotone L-grid gr = golden^2 and bipartite eigenvalue^2 agree within 1e-9", 1.0):
        grid = parse_grid(L_SHAPE)
        gr = predict_growth_rate(grid).gr
        assert abs(gr - GOLDEN ** 2) <= 1e-9
        rho = bipartite_block_eigenvalue(build_gamma(grid))
        assert abs(rho ** 2 - gr) <= 1e-9


def test_4_oracle_equivalence_and_sandwich():
    with criterion(4, "gridded counts = brute force for n <= 6; sandwich for n <= 7", 120.0):
        for text, bases in ((SKEW_MERGED, SKEW_MERGED_BASES), (JUXTAPOSITION, JUXTAPOSITION_BASES),
                            (CORNER_321, CORNER_321_BASES)):
            grid = parse_grid(text)
            tables = cell_count_tables(grid, 7)
            for n in range(7):
                exact = count_gridded_total(grid, n, tables)
                assert exact == count_gridded_brute(grid, n)
                assert exact == naive_gridded_count(bases, n)
            for n in range(8):
                ug, g = count_ungridded(grid, n), count_gridded_total(grid, n, tables)
                assert ug <= g <= (n + 1) ** (grid.t + grid.u) * ug


def test_5_juxtaposition_powers_of_two():
    with criterion(5, "juxtaposition gridded count = 2^n for n <= 20", 5.0):
        grid = parse_grid(JUXTAPOSITION)
        tables = cell_count_tables(grid, 20)
        assert [count_gridded_total(grid, n, tables) for n in range(21)] == [2 ** n for n in range(21)]


def test_6_convergence_band():
    with criterion(6, "skew-merged count ratio at n = 60 in [3.6, 4.05]", 60.0):
        grid = parse_grid(SKEW_MERGED)
        tables = cell_count_tables(grid, 60)
        ratio = count_gridded_total(grid, 60, tables) / count_gridded_total(grid, 59, tables)
        print(f"    ratio at n = 60: {ratio:.6f}")
        assert 3.6 <= ratio <= 4.05


def _acceptance_gammas():
    gammas = [build_gamma(parse_grid(t)) for t in (SKEW_MERGED, CORNER_321, L_SHAPE)]
    rng = np.random.default_rng(20261018)
    gammas += [random_gamma(rng) for _ in range(50)]
    return gammas


def test_7_variational_suite():
    with criterion(7, "f(blueprint) = s^2, Lagrange residual, finite differences, search bracket "
                      "(3 fixtures + 50 random)", 180.0):
        rng = np.random.default_rng(7)
        worst = {"f": 0.0, "lagrange": 0.0, "fd": 0.0, "over": -np.inf, "under": -np.inf}
        for i, G in enumerate(_acceptance_gammas()):
            res = top_singular_triple(G)
            s2 = res.gr
            X = blueprint_X(G, res)
            worst["f"] = max(worst["f"], abs(f_eval(G, X) - s2))
            worst["lagrange"] = max(worst["lagrange"], lagrange_residual(G, X))
            for _ in range(100):
                worst["fd"] = max(worst["fd"], finite_diff_check(G, random_interior_point(rng, G)))
            best = simplex_search(G, 100_000, seed=i).f
            worst["over"] = max(worst["over"], best - s2)
            worst["under"] = max(worst["under"], s2 - best)
        print(f"    worst: {worst}")
        assert worst["f"] <= 1e-9
        assert worst["lagrange"] <= 1e-8
        assert worst["fd"] <= 1e-4
        assert worst["over"] <= 1e-6
        assert worst["under"] <= 1e-3


def test_8_sampler_uniformity():
    with criterion(8, "10,000 samples hit exactly the 16 gridded permutations, each within 5 sigma", 10.0):
        grid = parse_grid(SKEW_MERGED)
        A = WeightMatrix(((1, 1), (1, 1)))
        expected = set()
        for p in itertools.permutations(range(1, 5)):
            for c, r in naive_griddings(SKEW_MERGED_BASES, p):
                if GriddedPermutation(Permutation(p), c, r).occupancy() == A:
                    expected.add((p, c, r))
        assert len(expected) == 16
        rng = np.random.default_rng(8)
        counts = dict.fromkeys(expected, 0)
        draws = 10_000
        for _ in range(draws):
            s = sample_gridded(grid, A, rng)
            key = (tuple(s.perm), s.column_divisions, s.row_divisions)
            assert key in counts
            counts[key] += 1
        mean = draws / 16
        sigma = math.sqrt(draws * (1 / 16) * (15 / 16))
        assert all(abs(c - mean) <= 5 * sigma for c in counts.values())


FIXTURE_BASES = ["Av()", "Av(12)", "Av(21)", "Av(321)", "Av(231)", "Av(123)", "Av(2143,3412)",
                 "Av(4231)", "Av(123,2413)", "Av(12,321)"]


def test_9_avoidance_enumeration():
    with criterion(9, "enumerate_av = m!-filter for m <= 7; Av(321) Catalan through m = 10", 60.0):
        for spec in FIXTURE_BASES:
            basis = Basis.parse(spec)
            assert enumerate_av(basis, 7) == filter_av_counts(basis, 7)
        assert enumerate_av(Basis.parse("Av(321)"), 10) == tuple(catalan(m) for m in range(11))
