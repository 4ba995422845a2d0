"""
The cell-rate matrix ``gamma`` (entrywise square roots of cell growth rates),
its top singular triple by power iteration, and the blueprint matrix.

``gamma`` is a ``t x u`` array indexed like the grid, ``gamma[k, l]``.  The
column-side vector ``r`` has length ``t`` and the row-side vector ``c`` has
length ``u``; they satisfy ``gamma @ c == s * r`` and ``gamma.T @ r == s * c``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from .grid import AvClass, DirectRate, Empty, GridError, GridMatrix
from .perms import Basis

__all__ = [
    "SpectralResult", "Prediction", "UnknownClassError", "FiniteClassError",
    "ConvergenceError", "BUILTIN_CATALOG", "parse_catalog", "load_catalog",
    "build_gamma", "power_iteration", "support_components", "top_singular_triple", "blueprint_X",
    "bipartite_block_eigenvalue", "predict_growth_rate",
]


class UnknownClassError(GridError):
    def __init__(self, cells):
        self.cells = list(cells)
        listing = ", ".join(f"({k}, {l}) {b!r}" for (k, l), b in self.cells)
        super().__init__(f"no growth rate known for cells: {listing}")


class FiniteClassError(GridError):
    """A non-empty cell holds a finite class, whose growth rate is 0."""


class ConvergenceError(RuntimeError):
    def __init__(self, message, residual):
        super().__init__(f"{message} (last residual {residual:.3e})")
        self.residual = residual


def _builtin_catalog() -> dict[Basis, float]:
    cat = {Basis([(1, 2)]): 1.0, Basis([(2, 1)]): 1.0}
    for beta in ((1, 2, 3), (1, 3, 2), (2, 1, 3), (2, 3, 1), (3, 1, 2), (3, 2, 1)):
        cat[Basis([beta])] = 4.0
    return cat


BUILTIN_CATALOG: Mapping[Basis, float] = _builtin_catalog()


def parse_catalog(text: str) -> dict[Basis, float]:
    """Parse lines of the form ``Av(...) = <real>``; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"(Av\s*\([^)]*\))\s*=\s*(\S+)", line)
        if m is None:
            raise GridError(f"catalog line {lineno}: expected 'Av(...) = <real>'")
        try:
            value = float(m.group(2))
            basis = Basis.parse(m.group(1))
        except ValueError as exc:
            raise GridError(f"catalog line {lineno}: {exc}") from None
        if not value >= 1.0:
            raise GridError(f"catalog line {lineno}: growth rate {value} < 1")
        out[basis] = value
    return out


def load_catalog(path=None) -> dict[Basis, float]:
    """Built-in rates, overridden by the entries of the file at ``path``."""
    cat = dict(BUILTIN_CATALOG)
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            cat.update(parse_catalog(fh.read()))
    return cat


def build_gamma(grid: GridMatrix, catalog: Mapping[Basis, float] | None = None) -> np.ndarray:
    """``gamma[k, l] = sqrt(gr(M_kl))``, zero on empty cells."""
    catalog = BUILTIN_CATALOG if catalog is None else catalog
    gamma = np.zeros(grid.shape)
    unknown = []
    for k in range(grid.t):
        for l in range(grid.u):
            cell = grid[k, l]
            if isinstance(cell, Empty):
                continue
            if isinstance(cell, DirectRate):
                gamma[k, l] = math.sqrt(cell.gr)
                continue
            assert isinstance(cell, AvClass)
            if cell.basis.is_finite_class():
                raise FiniteClassError(f"cell ({k}, {l}) {cell.basis!r} is a finite class")
            if cell.basis not in catalog:
                unknown.append(((k, l), cell.basis))
                continue
            gamma[k, l] = math.sqrt(catalog[cell.basis])
    if unknown:
        raise UnknownClassError(unknown)
    return gamma


def power_iteration(M: np.ndarray, tol: float = 1e-12, max_iter: int = 1_000_000,
                    shift: float = 0.0) -> tuple[float, np.ndarray]:
    """
    Dominant eigenpair of the symmetric nonnegative matrix ``M`` from the
    uniform positive start vector.

    Iterates with ``M + shift * I`` (a positive shift separates ``+rho`` from
    ``-rho`` for bipartite matrices).  Stops once successive Rayleigh
    quotients differ by less than ``tol`` (relative to the eigenvalue) and the
    eigen-residual has settled to the same scale.
    """
    n = M.shape[0]
    A = M + shift * np.eye(n)
    x = np.full(n, 1.0 / math.sqrt(n))
    lam = float(x @ A @ x)
    res = math.inf
    for _ in range(max_iter):
        y = A @ x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return -shift, x
        x = y / norm
        y = A @ x
        lam_new = float(x @ y)
        scale = max(1.0, abs(lam_new))
        res = float(np.max(np.abs(y - lam_new * x)))
        if abs(lam_new - lam) < tol * scale and res < 1e-10 * scale:
            return lam_new - shift, x
        lam = lam_new
    raise ConvergenceError(f"power iteration did not converge in {max_iter} iterations", res)


@dataclass(frozen=True)
class SpectralResult:
    s: float
    r: np.ndarray
    c: np.ndarray

    @property
    def gr(self) -> float:
        return self.s ** 2

    def residuals(self, gamma: np.ndarray) -> tuple[float, float]:
        """Max-norm of ``gamma c - s r`` and ``gamma^T r - s c``."""
        return (float(np.max(np.abs(gamma @ self.c - self.s * self.r))),
                float(np.max(np.abs(gamma.T @ self.r - self.s * self.c))))


def support_components(gamma: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """
    Connected components of the bipartite graph joining column ``k`` to row
    ``l`` whenever ``gamma[k, l] > 0``, as (column indices, row indices).
    Isolated columns and rows are dropped.
    """
    t, u = gamma.shape
    adj = np.zeros((t + u, t + u), dtype=bool)
    adj[:t, t:] = gamma > 0
    _, labels = connected_components(csr_matrix(adj), directed=False)
    comps = []
    for lab in np.unique(labels):
        cols = np.flatnonzero(labels[:t] == lab)
        rows = np.flatnonzero(labels[t:] == lab)
        if cols.size and rows.size:
            comps.append((cols, rows))
    return comps


def top_singular_triple(gamma: np.ndarray, tol: float = 1e-12,
                        max_iter: int = 1_000_000) -> SpectralResult:
    """
    Greatest singular value of ``gamma`` with nonnegative unit singular vectors.

    Each connected block of the support is handled separately, so the
    vectors vanish exactly outside the dominant block instead of carrying a
    slowly decaying remnant there.  Equal blocks resolve to the first one.
    """
    gamma = np.asarray(gamma, dtype=float)
    if not np.any(gamma > 0):
        raise ValueError("gamma has no positive entry")
    if np.any(gamma < 0):
        raise ValueError("gamma must be entrywise nonnegative")
    best = None
    for cols, rows in support_components(gamma):
        block = gamma[np.ix_(cols, rows)]
        lam, c_blk = power_iteration(block.T @ block, tol=tol, max_iter=max_iter)
        if best is None or lam > best[0]:
            best = (lam, cols, rows, c_blk)
    lam, cols, rows, c_blk = best
    s = math.sqrt(max(lam, 0.0))
    r = np.zeros(gamma.shape[0])
    c = np.zeros(gamma.shape[1])
    c[rows] = c_blk / np.linalg.norm(c_blk)
    r_blk = gamma[np.ix_(cols, rows)] @ c[rows]
    r[cols] = r_blk / np.linalg.norm(r_blk)
    return SpectralResult(s, r, c)


def blueprint_X(gamma: np.ndarray, result: SpectralResult) -> np.ndarray:
    """
    ``gamma * outer(r, c) / s``: the unit-weight cell-occupancy profile at
    which the variational function attains ``s**2``.  Without the ``1/s``
    factor the matrix would have weight ``s``.
    """
    if result.s <= 0:
        raise ValueError("blueprint needs a positive singular value")
    return np.asarray(gamma) * np.outer(result.r, result.c) / result.s


def bipartite_block_eigenvalue(gamma: np.ndarray, tol: float = 1e-12,
                               max_iter: int = 1_000_000) -> float:
    """
    Greatest eigenvalue of ``[[0, gamma], [gamma^T, 0]]`` (the spectral radius
    of the weighted bipartite graph on columns and rows).
    """
    gamma = np.asarray(gamma, dtype=float)
    t, u = gamma.shape
    B = np.zeros((t + u, t + u))
    B[:t, t:] = gamma
    B[t:, :t] = gamma.T
    lam, _ = power_iteration(B, tol=tol, max_iter=max_iter, shift=1.0)
    return lam


@dataclass(frozen=True)
class Prediction:
    gr: float
    result: SpectralResult
    X: np.ndarray
    gamma: np.ndarray

    def to_dict(self) -> dict:
        return {"gr": self.gr, "s": self.result.s, "r": self.result.r.tolist(),
                "c": self.result.c.tolist(), "X": self.X.tolist()}


def predict_growth_rate(grid: GridMatrix, catalog: Mapping[Basis, float] | None = None,
                        tol: float = 1e-12) -> Prediction:
    """Growth rate of ``Grid(M)`` as the greatest eigenvalue of ``gamma^T gamma``."""
    gamma = build_gamma(grid, catalog)
    result = top_singular_triple(gamma, tol=tol)
    return Prediction(result.gr, result, blueprint_X(gamma, result), gamma)
