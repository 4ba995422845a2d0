"""
Permutations in one-line notation, pattern containment, and enumeration of
classes ``Av(B)`` with a finite basis ``B``.

Permutations are tuples of the values ``1..n``.  The empty permutation ``()``
is a valid permutation of length 0 and is contained in every permutation.

>>> contains(Permutation((2, 3, 1)), Permutation((4, 1, 5, 2, 3)))
True
>>> enumerate_av(Basis.parse("Av(321)"), 6)
(1, 1, 2, 5, 14, 42, 132)
"""

from __future__ import annotations

import itertools
import re
from functools import lru_cache
from typing import Iterable, Sequence

__all__ = [
    "Permutation", "Basis", "RepeatedValueError", "ResourceCapError",
    "order_isomorphic", "standardize", "contains", "avoids_all",
    "enumerate_av", "enumerate_av_lists", "filter_av_counts", "all_permutations",
    "MAX_PATTERN_LENGTH", "DEFAULT_LIST_BUDGET",
]

# patterns are written with one digit per entry
MAX_PATTERN_LENGTH = 9

# total number of permutations kept in memory by enumerate_av_lists
DEFAULT_LIST_BUDGET = 2_000_000


class RepeatedValueError(ValueError):
    """A sequence that should consist of distinct values has a repeat."""


class ResourceCapError(RuntimeError):
    """A brute-force or materialization budget would be exceeded."""


class Permutation(tuple):
    """
    A permutation of ``{1, ..., n}`` in one-line notation.

    Construction validates that the entries form a bijection.
    """

    __slots__ = ()

    def __new__(cls, entries: Iterable[int] = ()):
        self = super().__new__(cls, entries)
        n = len(self)
        if sorted(self) != list(range(1, n + 1)):
            raise ValueError(f"{tuple(self)} is not a permutation of 1..{n}")
        return self

    @classmethod
    def from_string(cls, text: str) -> "Permutation":
        """Parse a digit string such as ``"2143"``."""
        text = text.strip()
        if not text.isdigit() or len(text) > MAX_PATTERN_LENGTH:
            raise ValueError(f"bad permutation literal {text!r}")
        return cls(int(ch) for ch in text)

    def __repr__(self):
        if not self:
            return "Permutation(())"
        return "".join(map(str, self)) if len(self) <= 9 else super().__repr__()

    __str__ = __repr__


def _check_distinct(seq: Sequence[float]) -> None:
    if len(set(seq)) != len(seq):
        raise RepeatedValueError(f"sequence {tuple(seq)} has repeated values")


def standardize(seq: Sequence[float]) -> Permutation:
    """Return the permutation order isomorphic to ``seq``."""
    _check_distinct(seq)
    ranks = {v: i + 1 for i, v in enumerate(sorted(seq))}
    return tuple.__new__(Permutation, (ranks[v] for v in seq))


def order_isomorphic(a: Sequence[float], b: Sequence[float]) -> bool:
    """True iff ``a`` and ``b`` have the same relative comparisons."""
    _check_distinct(a)
    _check_distinct(b)
    if len(a) != len(b):
        return False
    return standardize(a) == standardize(b)


@lru_cache(maxsize=4096)
def _pattern_plan(pattern: tuple[int, ...]) -> tuple[tuple[int, int], ...]:
    # For entry j of the pattern, the positions (among entries 0..j-1) holding
    # the nearest smaller and nearest larger value; -1 if none.
    plan = []
    for j, v in enumerate(pattern):
        lo = hi = -1
        for i in range(j):
            w = pattern[i]
            if w < v and (lo < 0 or w > pattern[lo]):
                lo = i
            elif w > v and (hi < 0 or w < pattern[hi]):
                hi = i
        plan.append((lo, hi))
    return tuple(plan)


def contains(pattern: Sequence[int], host: Sequence[int]) -> bool:
    """
    True iff some subsequence of ``host`` is order isomorphic to ``pattern``.

    Backtracking over host indices left to right; each new pattern entry must
    land strictly between the host values matched to its nearest smaller and
    nearest larger predecessor in the pattern.
    """
    k, n = len(pattern), len(host)
    if k == 0:
        return True
    if k > n:
        return False
    plan = _pattern_plan(tuple(pattern))
    chosen = [0] * k

    def extend(j: int, start: int) -> bool:
        if j == k:
            return True
        lo, hi = plan[j]
        lo_v = chosen[lo] if lo >= 0 else float("-inf")
        hi_v = chosen[hi] if hi >= 0 else float("inf")
        for i in range(start, n - (k - j) + 1):
            v = host[i]
            if lo_v < v < hi_v:
                chosen[j] = v
                if extend(j + 1, i + 1):
                    return True
        return False

    return extend(0, 0)


def _is_identity(p: Sequence[int]) -> bool:
    return all(v == i + 1 for i, v in enumerate(p))


def _is_reverse_identity(p: Sequence[int]) -> bool:
    n = len(p)
    return all(v == n - i for i, v in enumerate(p))


class Basis:
    """
    A finite set of forbidden patterns, normalized to its minimal elements.

    >>> Basis.parse("Av(21, 321)")
    Av(21)
    """

    __slots__ = ("patterns",)

    def __init__(self, patterns: Iterable[Sequence[int]] = ()):
        pats = {p if isinstance(p, Permutation) else Permutation(p) for p in patterns}
        if any(len(p) == 0 for p in pats):
            raise ValueError("basis patterns must have length >= 1")
        minimal = [p for p in pats
                   if not any(q != p and len(q) <= len(p) and contains(q, p) for q in pats)]
        self.patterns: tuple[Permutation, ...] = tuple(sorted(minimal, key=lambda p: (len(p), p)))

    @classmethod
    def parse(cls, text: str) -> "Basis":
        """Parse ``Av(231)`` or ``Av(2143,3412)``; whitespace is ignored."""
        compact = re.sub(r"\s+", "", text)
        m = re.fullmatch(r"Av\(([0-9,]*)\)", compact)
        if m is None:
            raise ValueError(f"bad basis syntax {text!r}")
        body = m.group(1)
        if not body:
            return cls(())
        return cls(Permutation.from_string(tok) for tok in body.split(","))

    def is_finite_class(self) -> bool:
        """
        True iff ``Av(B)`` is finite: by Erdos-Szekeres this happens exactly
        when ``B`` holds both an increasing and a decreasing permutation.
        """
        return (any(_is_identity(p) for p in self.patterns)
                and any(_is_reverse_identity(p) for p in self.patterns))

    def is_empty_class(self) -> bool:
        """``Av(1)`` has no nonempty members."""
        return self.patterns == (Permutation((1,)),)

    def __eq__(self, other):
        return isinstance(other, Basis) and self.patterns == other.patterns

    def __hash__(self):
        return hash(self.patterns)

    def __iter__(self):
        return iter(self.patterns)

    def __len__(self):
        return len(self.patterns)

    def __repr__(self):
        return "Av(" + ",".join("".join(map(str, p)) for p in self.patterns) + ")"


def avoids_all(basis: Iterable[Sequence[int]], host: Sequence[int]) -> bool:
    """True iff ``host`` avoids every pattern of ``basis``."""
    return not any(contains(beta, host) for beta in basis)


def all_permutations(n: int) -> Iterable[Permutation]:
    """All permutations of length ``n`` in lexicographic order."""
    for p in itertools.permutations(range(1, n + 1)):
        yield tuple.__new__(Permutation, p)


def _contains_through_max(pattern: Sequence[int], host: Sequence[int], pos: int) -> bool:
    # occurrences that use host[pos] (the maximum) as the pattern's maximum
    k = len(pattern)
    q = pattern.index(k)
    if q > pos or k - 1 - q > len(host) - pos - 1:
        return False
    return _split_contains(pattern[:q], pattern[q + 1:], host[:pos], host[pos + 1:])


def _split_contains(head, tail, left, right) -> bool:
    # pattern head+tail embedded with head in `left` and tail in `right`
    k = len(head) + len(tail)
    joint = tuple(head) + tuple(tail)
    plan = _pattern_plan(joint)
    chosen = [0] * k
    nl, nr = len(left), len(right)

    def extend(j: int, start: int) -> bool:
        if j == k:
            return True
        lo, hi = plan[j]
        lo_v = chosen[lo] if lo >= 0 else float("-inf")
        hi_v = chosen[hi] if hi >= 0 else float("inf")
        if j < len(head):
            seq, stop = left, nl - (len(head) - j) + 1
        else:
            if j == len(head):
                start = 0
            seq, stop = right, nr - (k - j) + 1
        for i in range(start, stop):
            v = seq[i]
            if lo_v < v < hi_v:
                chosen[j] = v
                if extend(j + 1, i + 1):
                    return True
        return False

    return extend(0, 0)


def _extensions(parent: Permutation, basis: tuple[Permutation, ...]) -> Iterable[Permutation]:
    # Insert n+1 into every gap.  The parent already avoids the basis, so only
    # occurrences using the new maximum as the pattern's maximum can appear.
    m = len(parent) + 1
    for pos in range(m):
        child = parent[:pos] + (m,) + parent[pos:]
        if not any(_contains_through_max(beta, child, pos) for beta in basis):
            yield tuple.__new__(Permutation, child)


def enumerate_av_lists(basis: Basis, N: int, budget: int = DEFAULT_LIST_BUDGET
                       ) -> list[list[Permutation]]:
    """
    Members of ``Av(basis)`` of each length ``0..N``, grown by inserting the
    new maximum into every gap of each shorter member.

    Raises ResourceCapError once more than ``budget`` permutations are held.
    """
    if N < 0:
        raise ValueError("N must be nonnegative")
    pats = tuple(basis)
    if Permutation((1,)) in pats:
        return [[Permutation(())]] + [[] for _ in range(N)]
    levels = [[Permutation(())]]
    held = 1
    for _ in range(N):
        nxt = [child for parent in levels[-1] for child in _extensions(parent, pats)]
        held += len(nxt)
        if held > budget:
            raise ResourceCapError(
                f"enumerating {basis} past length {len(levels) - 1} exceeds budget of {budget} permutations")
        levels.append(nxt)
    return levels


def enumerate_av(basis: Basis, N: int, budget: int = DEFAULT_LIST_BUDGET) -> tuple[int, ...]:
    """Counts ``|Av(basis)_m|`` for ``m = 0..N``."""
    if N < 0:
        raise ValueError("N must be nonnegative")
    pats = tuple(basis)
    if not pats:
        counts, f = [1], 1
        for m in range(1, N + 1):
            f *= m
            counts.append(f)
        return tuple(counts)
    if len(pats) == 1 and len(pats[0]) == 2:
        # Av(12) and Av(21): one member of each length
        return (1,) * (N + 1)
    # only the previous level is kept, so the budget applies per level
    counts = [1]
    level = [Permutation(())]
    for _ in range(N):
        level = [child for parent in level for child in _extensions(parent, pats)]
        if len(level) > budget:
            raise ResourceCapError(f"a level of {basis} exceeds budget of {budget} permutations")
        counts.append(len(level))
    return tuple(counts)


def filter_av_counts(basis: Iterable[Sequence[int]], N: int) -> tuple[int, ...]:
    """Reference counts by testing all ``m!`` permutations of each length."""
    pats = tuple(basis)
    return tuple(sum(1 for p in all_permutations(m) if avoids_all(pats, p))
                 for m in range(N + 1))
