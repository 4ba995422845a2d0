"""
Grid matrices of permutation classes and exact counting of gridded permutations.

Matrices use Cartesian indexing throughout: ``cells[k][l]`` is the cell in
column ``k`` from the left and row ``l`` from the bottom (both 0-based here).
Division sequences of a gridding are 1-based, as in the usual definition
``1 = c_1 <= ... <= c_{t+1} = n + 1``.
"""

from __future__ import annotations

import itertools
import math
import os
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Mapping, Sequence, Union

import numpy as np

from .perms import (Basis, Permutation, ResourceCapError, all_permutations, avoids_all,
                    enumerate_av, enumerate_av_lists, standardize)

__all__ = [
    "Empty", "AvClass", "DirectRate", "CellSpec", "GridMatrix", "WeightMatrix",
    "GriddedPermutation", "GridError", "GridSyntaxError", "InadmissibleError",
    "UncountableCellError", "parse_grid", "admissible_weight_matrices",
    "cell_count_tables", "multinomial", "count_gridded_fixed", "count_gridded_total",
    "argmax_weight_matrix", "brute_force_membership", "count_ungridded",
    "count_gridded_brute", "sample_gridded", "is_valid_gridding",
    "membership_cap", "ungridded_cap",
]


class GridError(ValueError):
    """Invalid grid specification or an operation unsupported for a grid."""


class GridSyntaxError(GridError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class InadmissibleError(GridError):
    """A weight matrix puts mass on an empty cell."""


class UncountableCellError(GridError):
    """Exact counting was asked of a cell known only by its growth rate."""


@dataclass(frozen=True)
class Empty:
    def __str__(self):
        return "."


@dataclass(frozen=True)
class AvClass:
    basis: Basis

    def __str__(self):
        return repr(self.basis)


@dataclass(frozen=True)
class DirectRate:
    gr: float

    def __post_init__(self):
        if not (self.gr >= 1.0) or math.isinf(self.gr):
            raise GridError(f"growth rate of an infinite cell must be a finite real >= 1, got {self.gr}")

    def __str__(self):
        return f"gr={self.gr!r}"


CellSpec = Union[Empty, AvClass, DirectRate]


def make_cell(basis: Basis) -> CellSpec:
    """Wrap a basis as a cell; ``Av(1)`` becomes the empty cell."""
    return Empty() if basis.is_empty_class() else AvClass(basis)


@dataclass(frozen=True)
class GridMatrix:
    """A ``t x u`` matrix of cells, ``cells[k][l]`` Cartesian."""
    cells: tuple[tuple[CellSpec, ...], ...]

    def __post_init__(self):
        if not self.cells or not self.cells[0]:
            raise GridError("grid must have at least one column and one row")
        if len({len(col) for col in self.cells}) != 1:
            raise GridError("columns have unequal lengths")
        if all(isinstance(c, Empty) for col in self.cells for c in col):
            raise GridError("all cells are empty")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[CellSpec]]) -> "GridMatrix":
        """Build from rows in display order (top row first)."""
        u, t = len(rows), len(rows[0])
        return cls(tuple(tuple(rows[u - 1 - l][k] for l in range(u)) for k in range(t)))

    @property
    def t(self) -> int:
        return len(self.cells)

    @property
    def u(self) -> int:
        return len(self.cells[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.t, self.u

    def __getitem__(self, kl: tuple[int, int]) -> CellSpec:
        k, l = kl
        return self.cells[k][l]

    def support(self) -> list[tuple[int, int]]:
        """Non-empty cells, column-major with the bottom row first."""
        return [(k, l) for k in range(self.t) for l in range(self.u)
                if not isinstance(self.cells[k][l], Empty)]

    def is_countable(self) -> bool:
        return not any(isinstance(c, DirectRate) for col in self.cells for c in col)

    def to_text(self) -> str:
        return "\n".join(" ".join(str(self.cells[k][l]) for k in range(self.t))
                         for l in reversed(range(self.u)))


_TOKEN = re.compile(r"Av\s*\([^)]*\)|\S+")


def _parse_token(tok: str, line: int, col: int) -> CellSpec:
    if tok == ".":
        return Empty()
    if tok == "inc":
        return AvClass(Basis([(2, 1)]))
    if tok == "dec":
        return AvClass(Basis([(1, 2)]))
    if tok.startswith("gr="):
        try:
            value = float(tok[3:])
        except ValueError:
            raise GridSyntaxError(f"bad growth rate {tok!r}", line, col) from None
        if not value >= 1.0:
            raise GridError(f"line {line}, column {col}: growth rate {value} < 1 is not allowed")
        return DirectRate(value)
    if tok.startswith("Av"):
        try:
            return make_cell(Basis.parse(tok))
        except ValueError as exc:
            raise GridSyntaxError(str(exc), line, col) from None
    raise GridSyntaxError(f"unknown cell token {tok!r}", line, col)


def parse_grid(text: str) -> GridMatrix:
    """
    Parse a grid-spec document.

    Each nonblank line is one matrix row, top row first, with whitespace
    separated cell tokens: ``.``, ``Av(...)``, ``inc``, ``dec`` or ``gr=<x>``.
    ``#`` starts a comment.

    >>> parse_grid("Av(12) Av(21)\\nAv(21) Av(12)").shape
    (2, 2)
    """
    rows = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        row = [_parse_token(m.group(0), lineno, m.start() + 1) for m in _TOKEN.finditer(line)]
        if rows and len(row) != len(rows[0][1]):
            raise GridError(f"line {lineno}: row has {len(row)} cells, expected {len(rows[0][1])}")
        rows.append((lineno, row))
    if not rows:
        raise GridError("grid spec is empty")
    return GridMatrix.from_rows([r for _, r in rows])


@dataclass(frozen=True)
class WeightMatrix:
    """Nonnegative integer cell occupancies ``entries[k][l]``."""
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if any(a < 0 for col in self.entries for a in col):
            raise ValueError("weight matrix entries must be nonnegative")

    @classmethod
    def from_array(cls, a) -> "WeightMatrix":
        return cls(tuple(tuple(int(x) for x in col) for col in a))

    @property
    def weight(self) -> int:
        return sum(sum(col) for col in self.entries)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.entries[0])

    def column_sums(self) -> list[int]:
        return [sum(col) for col in self.entries]

    def row_sums(self) -> list[int]:
        return [sum(col[l] for col in self.entries) for l in range(len(self.entries[0]))]

    def flat(self) -> tuple[int, ...]:
        """Entries column by column, bottom row first."""
        return tuple(a for col in self.entries for a in col)

    def __getitem__(self, kl: tuple[int, int]) -> int:
        k, l = kl
        return self.entries[k][l]


def check_admissible(grid: GridMatrix, A: WeightMatrix) -> None:
    if A.shape != grid.shape:
        raise InadmissibleError(f"weight matrix shape {A.shape} != grid shape {grid.shape}")
    for k in range(grid.t):
        for l in range(grid.u):
            if A[k, l] > 0 and isinstance(grid[k, l], Empty):
                raise InadmissibleError(f"positive weight {A[k, l]} on empty cell ({k}, {l})")


def admissible_weight_matrices(grid: GridMatrix, n: int) -> Iterator[WeightMatrix]:
    """
    Every nonnegative integer matrix of weight ``n`` supported on the
    non-empty cells, each once.  There are ``C(n+m-1, m-1)`` of them for
    ``m`` non-empty cells.
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    support = grid.support()
    m = len(support)
    t, u = grid.shape
    # stars and bars: bar positions among n + m - 1 slots
    for bars in itertools.combinations(range(n + m - 1), m - 1):
        parts = []
        prev = -1
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(n + m - 1 - prev - 1)
        entries = [[0] * u for _ in range(t)]
        for (k, l), a in zip(support, parts):
            entries[k][l] = a
        yield WeightMatrix(tuple(tuple(col) for col in entries))


@lru_cache(maxsize=None)
def _factorial(n: int) -> int:
    return math.factorial(n)


def multinomial(parts: Sequence[int]) -> int:
    """``(sum parts)! / prod(part!)``; the empty multinomial is 1."""
    out = _factorial(sum(parts))
    for a in parts:
        out //= _factorial(a)
    return out


def cell_count_tables(grid: GridMatrix, N: int) -> dict[tuple[int, int], tuple[int, ...]]:
    """
    ``|(M_kl)_m|`` for ``m = 0..N`` for each non-empty cell.  Each distinct
    basis is enumerated once.
    """
    by_basis: dict[Basis, tuple[int, ...]] = {}
    tables = {}
    for k, l in grid.support():
        cell = grid[k, l]
        if isinstance(cell, DirectRate):
            continue
        if cell.basis not in by_basis:
            by_basis[cell.basis] = enumerate_av(cell.basis, N)
        tables[k, l] = by_basis[cell.basis]
    return tables


def count_gridded_fixed(grid: GridMatrix, A: WeightMatrix,
                        cell_counts: Mapping[tuple[int, int], Sequence[int]] | None = None) -> int:
    """
    Number of gridded permutations whose cell occupancies are ``A``: a
    multinomial interleaving for every column and every row, times the number
    of class members of the right length in every cell.
    """
    check_admissible(grid, A)
    for k, l in grid.support():
        if A[k, l] > 0 and isinstance(grid[k, l], DirectRate):
            raise UncountableCellError(f"cell ({k}, {l}) has only a growth rate; cannot count exactly")
    if cell_counts is None:
        cell_counts = cell_count_tables(grid, max(A.flat()))
    total = 1
    for col in A.entries:
        total *= multinomial(col)
    for l in range(grid.u):
        total *= multinomial([col[l] for col in A.entries])
    for k, l in grid.support():
        a = A[k, l]
        if a:
            total *= cell_counts[k, l][a]
    return total


def _require_countable(grid: GridMatrix) -> None:
    if not grid.is_countable():
        raise UncountableCellError("grid has gr= cells; exact counting needs Av(...) cells")


def count_gridded_total(grid: GridMatrix, n: int,
                        cell_counts: Mapping[tuple[int, int], Sequence[int]] | None = None) -> int:
    """``|Grid#_n(M)|`` as a sum over admissible weight matrices of weight ``n``."""
    _require_countable(grid)
    if cell_counts is None:
        cell_counts = cell_count_tables(grid, n)
    return sum(count_gridded_fixed(grid, A, cell_counts) for A in admissible_weight_matrices(grid, n))


def argmax_weight_matrix(grid: GridMatrix, n: int,
                         cell_counts: Mapping[tuple[int, int], Sequence[int]] | None = None
                         ) -> tuple[WeightMatrix, int]:
    """
    The weight-``n`` matrix with the most gridded permutations.  Ties go to
    the lexicographically smallest flattened entry sequence.
    """
    _require_countable(grid)
    if cell_counts is None:
        cell_counts = cell_count_tables(grid, n)
    best = None
    for A in admissible_weight_matrices(grid, n):
        c = count_gridded_fixed(grid, A, cell_counts)
        if best is None or c > best[1] or (c == best[1] and A.flat() < best[0].flat()):
            best = (A, c)
    return best


@dataclass(frozen=True)
class GriddedPermutation:
    perm: Permutation
    column_divisions: tuple[int, ...]
    row_divisions: tuple[int, ...]

    def cell_entries(self, k: int, l: int) -> tuple[int, ...]:
        """Values of the entries in cell ``(k, l)``, left to right."""
        c, r = self.column_divisions, self.row_divisions
        return tuple(v for i, v in enumerate(self.perm, start=1)
                     if c[k] <= i < c[k + 1] and r[l] <= v < r[l + 1])

    def occupancy(self) -> WeightMatrix:
        t, u = len(self.column_divisions) - 1, len(self.row_divisions) - 1
        return WeightMatrix(tuple(tuple(len(self.cell_entries(k, l)) for l in range(u))
                                  for k in range(t)))

    def to_dict(self) -> dict:
        return {"entries": list(self.perm),
                "column_divisions": list(self.column_divisions),
                "row_divisions": list(self.row_divisions)}


def _cell_accepts(cell: CellSpec, values: Sequence[int]) -> bool:
    if isinstance(cell, Empty):
        return not values
    if isinstance(cell, DirectRate):
        raise UncountableCellError("gr= cells have no membership test")
    return avoids_all(cell.basis, values)


def is_valid_gridding(grid: GridMatrix, g: GriddedPermutation) -> bool:
    """Check the divisions and that every cell's contents lie in its class."""
    n = len(g.perm)
    for divs, size in ((g.column_divisions, grid.t), (g.row_divisions, grid.u)):
        if len(divs) != size + 1 or divs[0] != 1 or divs[-1] != n + 1:
            return False
        if any(a > b for a, b in zip(divs, divs[1:])):
            return False
    return all(_cell_accepts(grid[k, l], g.cell_entries(k, l))
               for k in range(grid.t) for l in range(grid.u))


def _cap_from_env(default: int) -> int:
    value = os.environ.get("GRIDGROW_CAP_N")
    return int(value) if value else default


def membership_cap() -> int:
    return _cap_from_env(10)


def ungridded_cap() -> int:
    return _cap_from_env(7)


def _division_sequences(n: int, parts: int) -> Iterator[tuple[int, ...]]:
    for inner in itertools.combinations_with_replacement(range(1, n + 2), parts - 1):
        yield (1,) + inner + (n + 1,)


def _griddings(grid: GridMatrix, perm: Sequence[int]) -> Iterator[GriddedPermutation]:
    n = len(perm)
    p = tuple.__new__(Permutation, perm)
    rows = list(_division_sequences(n, grid.u))
    for c in _division_sequences(n, grid.t):
        # entries of each column, computed once per column division
        columns = [perm[c[k] - 1:c[k + 1] - 1] for k in range(grid.t)]
        for r in rows:
            ok = True
            for k in range(grid.t):
                for l in range(grid.u):
                    vals = [v for v in columns[k] if r[l] <= v < r[l + 1]]
                    if not _cell_accepts(grid[k, l], vals):
                        ok = False
                        break
                if not ok:
                    break
            if ok:
                yield GriddedPermutation(p, c, r)


def brute_force_membership(grid: GridMatrix, perm: Sequence[int], cap: int | None = None
                           ) -> GriddedPermutation | None:
    """
    Search every pair of division sequences for a witness gridding of
    ``perm``; return the first one found or None.
    """
    _require_countable(grid)
    cap = membership_cap() if cap is None else cap
    if len(perm) > cap:
        raise ResourceCapError(f"permutation length {len(perm)} exceeds membership cap {cap}")
    return next(_griddings(grid, perm), None)


def count_ungridded(grid: GridMatrix, n: int, cap: int | None = None) -> int:
    """``|Grid_n(M)|`` by testing all ``n!`` permutations."""
    _require_countable(grid)
    cap = ungridded_cap() if cap is None else cap
    if n > cap:
        raise ResourceCapError(f"n = {n} exceeds brute-force cap {cap}")
    return sum(1 for p in all_permutations(n) if next(_griddings(grid, p), None) is not None)


def count_gridded_brute(grid: GridMatrix, n: int, cap: int | None = None) -> int:
    """``|Grid#_n(M)|`` by counting every (permutation, gridding) pair."""
    _require_countable(grid)
    cap = ungridded_cap() if cap is None else cap
    if n > cap:
        raise ResourceCapError(f"n = {n} exceeds brute-force cap {cap}")
    return sum(1 for p in all_permutations(n) for _ in _griddings(grid, p))


def sample_gridded(grid: GridMatrix, A: WeightMatrix, seed=None,
                   members: Mapping[tuple[int, int], Sequence[Sequence[Permutation]]] | None = None
                   ) -> GriddedPermutation:
    """
    Uniformly random element of ``Grid#_A(M)``.

    Independently shuffles the cell labels within every column and every row
    (uniform multiset arrangements) and picks a uniform class member for every
    cell, then assembles the permutation.  Each element arises from exactly
    one such choice, so the result is uniform.
    """
    check_admissible(grid, A)
    _require_countable(grid)
    rng = np.random.default_rng(seed)
    t, u = grid.shape
    if members is None:
        N = max(A.flat())
        members = {}
        by_basis = {}
        for k, l in grid.support():
            b = grid[k, l].basis
            if b not in by_basis:
                by_basis[b] = enumerate_av_lists(b, N)
            members[k, l] = by_basis[b]

    col_sums, row_sums = A.column_sums(), A.row_sums()
    col_start = np.concatenate([[0], np.cumsum(col_sums)]).astype(int)
    row_start = np.concatenate([[0], np.cumsum(row_sums)]).astype(int)

    # 0-based positions (indices) and heights (values) assigned to each cell
    positions: dict[tuple[int, int], list[int]] = {}
    heights: dict[tuple[int, int], list[int]] = {}
    for k in range(t):
        labels = np.repeat(np.arange(u), A.entries[k])
        rng.shuffle(labels)
        for j, l in enumerate(labels):
            positions.setdefault((k, int(l)), []).append(int(col_start[k]) + j)
    for l in range(u):
        labels = np.repeat(np.arange(t), [A.entries[k][l] for k in range(t)])
        rng.shuffle(labels)
        for j, k in enumerate(labels):
            heights.setdefault((int(k), l), []).append(int(row_start[l]) + j)

    n = A.weight
    perm = [0] * n
    for (k, l), pos in positions.items():
        a = len(pos)
        choices = members[k, l][a]
        if not choices:
            raise InadmissibleError(f"cell ({k}, {l}) has no members of length {a}")
        sigma = choices[int(rng.integers(len(choices)))]
        hs = heights[k, l]
        for i, p in enumerate(pos):
            perm[p] = hs[sigma[i] - 1] + 1
    return GriddedPermutation(
        Permutation(perm),
        tuple(int(x) + 1 for x in col_start),
        tuple(int(x) + 1 for x in row_start),
    )
