import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from gridgrow.grid import WeightMatrix, argmax_weight_matrix, count_gridded_fixed, parse_grid
from gridgrow.spectral import blueprint_X, build_gamma, top_singular_triple
from gridgrow.variational import (BoundaryError, DomainError, cell_factors, f_eval,
                                  finite_diff_check, grad_log_f, lagrange_residual, log_f,
                                  simplex_search)
from oracles import random_gamma, random_interior_point

FIXTURES = ["skew_merged", "juxtaposition", "corner_321", "l_shape"]


def f_product_form(G, X):
    # column and row powers times the per-cell gamma/X terms, 0**0 == 1
    out = 1.0
    for k in range(X.shape[0]):
        s = X[k].sum()
        out *= s ** s
    for l in range(X.shape[1]):
        s = X[:, l].sum()
        out *= s ** s
    for (k, l), x in np.ndenumerate(X):
        if x > 0:
            out *= G[k, l] ** (2 * x) * x ** (-2 * x)
    return out


@st.composite
def gamma_and_point(draw, interior=False):
    t, u = draw(st.integers(1, 4)), draw(st.integers(1, 4))
    G = draw(arrays(float, (t, u), elements=st.one_of(st.just(0.0), st.floats(1.0, 3.0))))
    if not np.any(G > 0):
        G[0, 0] = 1.0
    lo = 0.05 if interior else 0.0
    w = draw(arrays(float, (t, u), elements=st.floats(lo, 1.0)))
    X = np.where(G > 0, w, 0.0)
    if X.sum() == 0:
        X = (G > 0).astype(float)
    return G, X / X.sum()


class TestF:
    def test_vertex(self):
        G = np.array([[1.5, 2.0], [0.0, 1.2]])
        for k, l in [(0, 0), (0, 1), (1, 1)]:
            X = np.zeros((2, 2))
            X[k, l] = 1.0
            assert f_eval(G, X) == pytest.approx(G[k, l] ** 2, rel=1e-14)

    def test_skew_uniform(self):
        assert f_eval(np.ones((2, 2)), np.full((2, 2), 0.25)) == pytest.approx(4, rel=1e-14)

    @pytest.mark.parametrize("name", FIXTURES)
    def test_blueprint_attains_s_squared(self, request, name):
        G = build_gamma(request.getfixturevalue(name))
        res = top_singular_triple(G)
        assert f_eval(G, blueprint_X(G, res)) == pytest.approx(res.gr, abs=1e-9)

    def test_domain_errors(self):
        G = np.array([[1.0, 0.0]])
        with pytest.raises(DomainError):
            f_eval(G, np.array([[0.5, 0.5]]))
        with pytest.raises(DomainError):
            f_eval(G, np.array([[0.5, 0.0]]))
        with pytest.raises(DomainError):
            f_eval(G, np.array([[-0.1, 0.0]]))

    @settings(max_examples=200, deadline=None)
    @given(gamma_and_point())
    def test_matches_product_form(self, gx):
        G, X = gx
        assert f_eval(G, X) == pytest.approx(f_product_form(G, X), rel=1e-10)

    @settings(max_examples=200, deadline=None)
    @given(gamma_and_point())
    def test_factors_at_least_one(self, gx):
        G, X = gx
        assert np.all(cell_factors(G, X) >= 1 - 1e-12)
        assert f_eval(G, X) >= 1 - 1e-12

    @settings(max_examples=100, deadline=None)
    @given(gamma_and_point(), st.floats(0.01, 1.0))
    def test_scaling_law(self, gx, lam):
        G, X = gx
        assert log_f(G, lam * X) == pytest.approx(lam * log_f(G, X), rel=1e-9, abs=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(gamma_and_point())
    def test_bounded_by_s_squared(self, gx):
        G, X = gx
        assert f_eval(G, X) <= top_singular_triple(G).gr * (1 + 1e-12)

    def test_exact_counts_approach_f(self, skew_merged):
        # n-th roots of |Grid#_{nX}| climb toward f(X) = 4 at the uniform point
        G = np.ones((2, 2))
        roots = []
        for n in (40, 100, 200, 400):
            A = WeightMatrix(((n // 4,) * 2,) * 2)
            roots.append(count_gridded_fixed(skew_merged, A) ** (1 / n))
        assert roots == sorted(roots)
        assert f_eval(G, np.full((2, 2), 0.25)) * 0.95 < roots[-1] < 4

    def test_scaled_argmax_near_blueprint(self, l_shape):
        G = build_gamma(l_shape)
        X = blueprint_X(G, top_singular_triple(G))
        gaps = []
        for n in (30, 60, 90):
            A, _ = argmax_weight_matrix(l_shape, n)
            gaps.append(np.max(np.abs(np.array(A.entries, float) / n - X)))
        assert gaps == sorted(gaps, reverse=True) and gaps[-1] < 0.01


class TestGradient:
    def test_single_cell(self):
        g = grad_log_f(np.array([[1.7]]), np.array([[1.0]]))
        assert g[0, 0] == pytest.approx(2 * math.log(1.7))

    def test_skew_uniform(self):
        g = grad_log_f(np.ones((2, 2)), np.full((2, 2), 0.25))
        np.testing.assert_allclose(g, 2 * math.log(2), rtol=1e-14)

    def test_off_support_is_nan(self):
        X = np.array([[0.5, 0.0], [0.5, 0.0]])
        g = grad_log_f(np.ones((2, 2)), X)
        assert np.isnan(g[0, 1]) and np.isfinite(g[0, 0])

    def test_boundary_error(self):
        X = np.array([[0.5, 0.0], [0.5, 0.0]])
        with pytest.raises(BoundaryError):
            grad_log_f(np.ones((2, 2)), X, cells=[(0, 1)])

    @settings(max_examples=200, deadline=None)
    @given(gamma_and_point())
    def test_nonnegative(self, gx):
        G, X = gx
        g = grad_log_f(G, X)
        assert np.all(g[X > 0] >= -1e-12)


class TestLagrange:
    def test_skew_uniform(self):
        assert lagrange_residual(np.ones((2, 2)), np.full((2, 2), 0.25)) == pytest.approx(0, abs=1e-15)

    def test_non_critical(self):
        X = np.array([[0.7, 0.1], [0.1, 0.1]])
        assert lagrange_residual(np.ones((2, 2)), X) > 0.1

    def test_vertex_is_zero(self):
        X = np.array([[0.0, 1.0], [0.0, 0.0]])
        assert lagrange_residual(np.ones((2, 2)), X) == 0.0

    @pytest.mark.parametrize("name", FIXTURES)
    def test_blueprint(self, request, name):
        G = build_gamma(request.getfixturevalue(name))
        X = blueprint_X(G, top_singular_triple(G))
        assert lagrange_residual(G, X) <= 1e-8

    def test_random_gamma(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            G = random_gamma(rng)
            X = blueprint_X(G, top_singular_triple(G))
            assert lagrange_residual(G, X) <= 1e-8


class TestFiniteDiff:
    def test_skew_uniform(self):
        assert finite_diff_check(np.ones((2, 2)), np.full((2, 2), 0.25)) <= 1e-4

    def test_blueprint_is_critical(self, corner_321):
        G = build_gamma(corner_321)
        X = blueprint_X(G, top_singular_triple(G))
        assert finite_diff_check(G, X) <= 1e-4
        g = grad_log_f(G, X)
        vals = g[X > 0]
        assert np.ptp(vals) < 1e-8

    def test_single_cell(self):
        assert finite_diff_check(np.array([[2.0]]), np.array([[1.0]])) == 0.0

    def test_step_too_large(self):
        X = np.array([[0.5, 1e-7], [0.25, 0.25 - 1e-7]])
        with pytest.raises(DomainError):
            finite_diff_check(np.ones((2, 2)), X, h=1e-6)

    def test_random_points(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            G = random_gamma(rng)
            for _ in range(10):
                assert finite_diff_check(G, random_interior_point(rng, G)) <= 1e-4

    def test_detects_wrong_gradient(self, monkeypatch):
        import gridgrow.variational as var
        real = var.grad_log_f
        monkeypatch.setattr(var, "grad_log_f", lambda G, X: real(G, X) * 1.1)
        X = np.array([[0.4, 0.1], [0.2, 0.3]])
        assert var.finite_diff_check(np.ones((2, 2)), X) > 1e-3


class TestSearch:
    def test_skew_merged(self):
        res = simplex_search(np.ones((2, 2)), 100_000, seed=0)
        assert 4 - 1e-3 <= res.f <= 4 + 1e-6

    def test_single_cell(self):
        res = simplex_search(np.array([[0, 0], [0, 1.3]]), 10, seed=0)
        assert res.f == 1.3 ** 2
        assert res.X[1, 1] == 1.0

    def test_corner_321(self, corner_321):
        G = build_gamma(corner_321)
        res = simplex_search(G, 100_000, seed=1)
        assert res.f <= 3 + math.sqrt(5) + 1e-6
        assert f_eval(G, res.X) == pytest.approx(res.f, rel=1e-12)

    def test_deterministic(self):
        G = np.array([[1.0, 2.0], [1.5, 0.0]])
        a, b = simplex_search(G, 500, seed=9), simplex_search(G, 500, seed=9)
        assert a.f == b.f and np.array_equal(a.X, b.X)

    def test_iters_validation(self):
        with pytest.raises(ValueError):
            simplex_search(np.ones((2, 2)), 0)

    def test_random_never_exceeds(self):
        rng = np.random.default_rng(21)
        for i in range(15):
            G = random_gamma(rng)
            res = simplex_search(G, 2_000, seed=i)
            assert res.f <= top_singular_triple(G).gr + 1e-6
