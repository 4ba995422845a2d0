"""
The variational function on the admissible domain of unit-weight matrices,

    f(X) = prod_{k,l} (gamma_kl^2 * colsum_k * rowsum_l / X_kl^2) ** X_kl,

its log-gradient, the equal-ratio (Lagrange) conditions, and a random search
that maximizes ``f`` without reference to any singular vectors.

Zero entries contribute a factor of 1 (``0**0 == 1``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError", "BoundaryError", "check_domain", "log_f", "log_f_batch", "f_eval",
    "cell_factors", "grad_log_f", "lagrange_ratios", "lagrange_residual",
    "finite_diff_check", "SearchResult", "simplex_search",
]

WEIGHT_TOL = 1e-9


class DomainError(ValueError):
    """A matrix outside the admissible domain."""


class BoundaryError(DomainError):
    """A log-derivative was requested at a zero entry, where it diverges."""


def check_domain(gamma: np.ndarray, X: np.ndarray, unit_weight: bool = True) -> None:
    gamma, X = np.asarray(gamma, float), np.asarray(X, float)
    if X.shape != gamma.shape:
        raise DomainError(f"shape {X.shape} does not match gamma {gamma.shape}")
    if np.any(X < 0):
        raise DomainError("entries must be nonnegative")
    if np.any((X > 0) & (gamma <= 0)):
        raise DomainError("positive mass on a cell outside the support of gamma")
    if unit_weight and abs(X.sum() - 1.0) > WEIGHT_TOL:
        raise DomainError(f"weight {X.sum()!r} is not 1")


def _log_terms(gamma: np.ndarray, X: np.ndarray) -> np.ndarray:
    # per-cell X * log(gamma^2 colsum rowsum / X^2), zero where X == 0;
    # works on a single (t, u) matrix or a batch (..., t, u)
    col = X.sum(axis=-1, keepdims=True)
    row = X.sum(axis=-2, keepdims=True)
    pos = X > 0
    safe = np.where(pos, X, 1.0)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_ratio = (2 * np.log(np.where(pos, gamma, 1.0)) + np.log(np.where(pos, col, 1.0))
                     + np.log(np.where(pos, row, 1.0)) - 2 * np.log(safe))
    return np.where(pos, X * log_ratio, 0.0)


def log_f(gamma: np.ndarray, X: np.ndarray) -> float:
    """
    ``log f(X)``.  Only admissibility is required, not unit weight, so this
    also evaluates the homogeneous extension ``f(lam X) = f(X) ** lam``.
    """
    gamma, X = np.asarray(gamma, float), np.asarray(X, float)
    check_domain(gamma, X, unit_weight=False)
    return float(_log_terms(gamma, X).sum())


def log_f_batch(gamma: np.ndarray, Xs: np.ndarray) -> np.ndarray:
    """``log f`` of each matrix in a ``(B, t, u)`` stack; no domain checks."""
    return _log_terms(np.asarray(gamma, float), Xs).sum(axis=(-2, -1))


def f_eval(gamma: np.ndarray, X: np.ndarray) -> float:
    """``f(X)`` for ``X`` in the admissible domain."""
    check_domain(gamma, X)
    return float(np.exp(log_f(gamma, X)))


def cell_factors(gamma: np.ndarray, X: np.ndarray) -> np.ndarray:
    """The per-cell factors of ``f``; each is at least 1 when ``gamma >= 1`` on its support."""
    gamma, X = np.asarray(gamma, float), np.asarray(X, float)
    check_domain(gamma, X, unit_weight=False)
    return np.exp(_log_terms(gamma, X))


def grad_log_f(gamma: np.ndarray, X: np.ndarray, cells=None) -> np.ndarray:
    """
    Partial derivatives of ``log f`` on the support of ``X``:

        2 log gamma_kl + (log colsum_k - log X_kl) + (log rowsum_l - log X_kl).

    Entries off the support are NaN.  Asking for a zero-entry cell through
    ``cells`` raises BoundaryError, since the partial diverges there.
    """
    gamma, X = np.asarray(gamma, float), np.asarray(X, float)
    check_domain(gamma, X, unit_weight=False)
    pos = X > 0
    if cells is not None:
        for k, l in cells:
            if not pos[k, l]:
                raise BoundaryError(f"partial at zero entry ({k}, {l}) diverges")
    col = X.sum(axis=1, keepdims=True)
    row = X.sum(axis=0, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = 2 * np.log(gamma) + (np.log(col) - np.log(X)) + (np.log(row) - np.log(X))
    return np.where(pos, g, np.nan)


def lagrange_ratios(gamma: np.ndarray, X: np.ndarray) -> np.ndarray:
    """``gamma_kl sqrt(colsum_k) sqrt(rowsum_l) / X_kl`` on the support, NaN elsewhere."""
    gamma, X = np.asarray(gamma, float), np.asarray(X, float)
    pos = X > 0
    col = X.sum(axis=1, keepdims=True)
    row = X.sum(axis=0, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = gamma * np.sqrt(col) * np.sqrt(row) / X
    return np.where(pos, rho, np.nan)


def lagrange_residual(gamma: np.ndarray, X: np.ndarray) -> float:
    """
    Relative spread ``(max - min) / mean`` of the Lagrange ratios over the
    support of ``X``; zero exactly at critical points of ``f`` on the face
    spanned by that support.  A single-cell support is a vertex of the
    domain and has residual 0 by definition.
    """
    check_domain(gamma, X)
    rho = lagrange_ratios(gamma, X)
    vals = rho[~np.isnan(rho)]
    if vals.size <= 1:
        return 0.0
    return float((vals.max() - vals.min()) / vals.mean())


def finite_diff_check(gamma: np.ndarray, X: np.ndarray, h: float = 1e-6) -> float:
    """
    Worst error between the analytic directional derivative of ``log f``
    along ``e_a - e_b`` (for every pair of support cells) and a centered
    difference of step ``h``.  The error is relative to ``max(1, |exact|)``.
    """
    gamma, X = np.asarray(gamma, float), np.asarray(X, float)
    check_domain(gamma, X)
    support = list(zip(*np.nonzero(X > 0)))
    if len(support) < 2:
        return 0.0
    if X[X > 0].min() <= h or X.max() + h >= 1.0:
        raise DomainError(f"step {h} would leave the open simplex")
    g = grad_log_f(gamma, X)
    pairs = list(itertools.combinations(support, 2))
    t, u = X.shape
    D = np.zeros((len(pairs), t, u))
    for i, (a, b) in enumerate(pairs):
        D[i][a] = 1.0
        D[i][b] = -1.0
    numeric = (log_f_batch(gamma, X + h * D) - log_f_batch(gamma, X - h * D)) / (2 * h)
    exact = np.array([g[a] - g[b] for a, b in pairs])
    return float(np.max(np.abs(numeric - exact) / np.maximum(1.0, np.abs(exact))))


@dataclass(frozen=True)
class SearchResult:
    X: np.ndarray
    f: float


def _climb(gamma: np.ndarray, X: np.ndarray, support, rounds: int, shrink: float,
           step: float, max_moves: int) -> tuple[np.ndarray, float]:
    # Greedy transfers of mass between support pairs; the step shrinks once
    # no transfer improves log f.
    m = len(support)
    idx = np.array(support)
    pa, pb = np.array([(a, b) for a in range(m) for b in range(m) if a != b]).T
    best = float(log_f_batch(gamma, X))
    for _ in range(rounds):
        for _ in range(max_moves):
            amount = np.minimum(step, X[idx[pb, 0], idx[pb, 1]])
            cand = np.repeat(X[None], len(pa), axis=0)
            rows = np.arange(len(pa))
            cand[rows, idx[pa, 0], idx[pa, 1]] += amount
            cand[rows, idx[pb, 0], idx[pb, 1]] -= amount
            np.maximum(cand, 0.0, out=cand)
            vals = log_f_batch(gamma, cand)
            j = int(np.argmax(vals))
            if vals[j] <= best:
                break
            X, best = cand[j], float(vals[j])
        step *= shrink
    return X, best


def simplex_search(gamma: np.ndarray, iters: int = 100_000, seed=0, *,
                   concentration: float = 1.0, shrink: float = 0.5, rounds: int = 60,
                   starts: int = 8, max_moves: int = 200, batch: int = 20_000) -> SearchResult:
    """
    Maximize ``f`` over the admissible domain by random search: ``iters``
    symmetric Dirichlet draws on the support of ``gamma``, then pairwise
    mass-transfer hill climbing from the ``starts`` best draws.
    """
    gamma = np.asarray(gamma, float)
    if iters < 1:
        raise ValueError("iters must be >= 1")
    support = list(zip(*np.nonzero(gamma > 0)))
    t, u = gamma.shape
    if len(support) == 1:
        X = np.zeros((t, u))
        X[support[0]] = 1.0
        return SearchResult(X, float(gamma[support[0]] ** 2))
    rng = np.random.default_rng(seed)
    idx = np.array(support)
    top_X, top_v = [], []
    done = 0
    while done < iters:
        b = min(batch, iters - done)
        w = rng.dirichlet(np.full(len(support), concentration), size=b)
        Xs = np.zeros((b, t, u))
        Xs[:, idx[:, 0], idx[:, 1]] = w
        vals = log_f_batch(gamma, Xs)
        keep = np.argsort(vals)[-starts:]
        top_X.extend(Xs[keep])
        top_v.extend(vals[keep])
        done += b
    order = np.argsort(top_v)[-starts:]
    best_X, best_v = None, -np.inf
    for i in order:
        X, v = _climb(gamma, top_X[i], support, rounds, shrink, 0.05, max_moves)
        if v > best_v:
            best_X, best_v = X, v
    return SearchResult(best_X, float(np.exp(best_v)))
