"""Rankings, weighted profiles and the pairwise utility algebra.

Candidates are dense integer indices ``0..m-1``. Every weight, budget and
payment is a :class:`fractions.Fraction`; nothing in this package rounds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from math import comb
from typing import Iterable, Iterator, Mapping

from proprank.errors import InvalidInputError

Rational = Fraction
CandidateSet = frozenset  # the active set X_i; any collection of indices is accepted


def as_fraction(value) -> Fraction:
    """Convert ints, Fractions and exact literals like ``"3/5"`` or ``"0.6"``."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise InvalidInputError(f"not a rational weight: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInputError(f"malformed rational {value!r}") from exc
    raise InvalidInputError(
        f"weights must be exact (int, Fraction or str), got {type(value).__name__}"
    )


def pairs_count(m: int) -> int:
    """C(m, 2): the number of unordered candidate pairs."""
    return comb(m, 2)


@dataclass(frozen=True, order=True)
class Ranking:
    """A strict total order over ``0..m-1``, best candidate first."""

    order: tuple[int, ...]
    position: tuple[int, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        order = tuple(int(c) for c in self.order)
        if sorted(order) != list(range(len(order))):
            raise InvalidInputError(f"not a permutation of 0..{len(order) - 1}: {order}")
        pos = [0] * len(order)
        for i, c in enumerate(order):
            pos[c] = i
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "position", tuple(pos))

    @classmethod
    def identity(cls, m: int) -> Ranking:
        return cls(tuple(range(m)))

    @property
    def m(self) -> int:
        return len(self.order)

    def __len__(self):
        return len(self.order)

    def __iter__(self) -> Iterator[int]:
        return iter(self.order)

    def __getitem__(self, i):
        return self.order[i]

    def prefers(self, x: int, y: int) -> bool:
        """True when ``x`` is ranked above ``y``."""
        return self.position[x] < self.position[y]

    def inverse(self) -> Ranking:
        """The reversed ranking."""
        return Ranking(self.order[::-1])

    def restricted(self, candidates: Iterable[int]) -> tuple[int, ...]:
        keep = set(candidates)
        return tuple(c for c in self.order if c in keep)

    def __str__(self):
        return ",".join(f"x{c + 1}" for c in self.order)


def _same_m(a: Ranking, b: Ranking):
    if a.m != b.m:
        raise InvalidInputError(f"rankings over different candidate counts ({a.m} vs {b.m})")


def utility(a: Ranking, b: Ranking) -> int:
    """Number of ordered pairs on which ``a`` and ``b`` agree."""
    _same_m(a, b)
    pa = a.position
    order = b.order
    agree = 0
    for i in range(len(order)):
        pi = pa[order[i]]
        for j in range(i + 1, len(order)):
            if pi < pa[order[j]]:
                agree += 1
    return agree


def swap_distance(a: Ranking, b: Ranking) -> int:
    """Kendall tau distance, i.e. ``C(m,2) - utility(a, b)``."""
    return pairs_count(a.m) - utility(a, b)


def positional_utility(r: Ranking, x: int, X: Iterable[int]) -> int:
    """Borda score of ``x`` within ``X``: how many of ``X`` rank below ``x`` in ``r``."""
    X = X if isinstance(X, (set, frozenset)) else set(X)
    if x not in X:
        raise InvalidInputError(f"candidate {x} is not in the active set")
    px = r.position[x]
    return sum(1 for y in X if r.position[y] > px)


def pair_set(r: Ranking) -> frozenset[tuple[int, int]]:
    """All ordered pairs ``(x, y)`` with ``x`` ranked above ``y``."""
    return frozenset(combinations(r.order, 2))


def borda_total(budgets: Mapping[Ranking, Fraction], x: int, X: Iterable[int]) -> Fraction:
    """Weighted Borda score ``sum_r b(r) * u(r, x, X)``."""
    X = X if isinstance(X, (set, frozenset)) else set(X)
    if x not in X:
        raise InvalidInputError(f"candidate {x} is not in the active set")
    total = Fraction(0)
    for r, b in budgets.items():
        if b:
            total += b * positional_utility(r, x, X)
    return total


class Profile(Mapping[Ranking, Fraction]):
    """Positive rational weights over distinct rankings, summing to exactly 1.

    Zero-weight entries are dropped on construction. Iteration order is the
    lexicographic order of the rankings, so every downstream computation is
    deterministic.
    """

    __slots__ = ("_m", "_entries")

    def __init__(self, m: int, entries):
        if m < 1:
            raise InvalidInputError("a profile needs at least one candidate")
        items = entries.items() if isinstance(entries, Mapping) else entries
        merged: dict[Ranking, Fraction] = {}
        for r, w in items:
            if not isinstance(r, Ranking):
                r = Ranking(tuple(r))
            if r.m != m:
                raise InvalidInputError(f"ranking {r.order} does not have {m} candidates")
            w = as_fraction(w)
            if w < 0:
                raise InvalidInputError(f"negative weight {w} for ranking {r.order}")
            merged[r] = merged.get(r, Fraction(0)) + w
        total = sum(merged.values(), Fraction(0))
        if total != 1:
            raise InvalidInputError(f"weights sum to {total}, expected 1")
        self._m = m
        self._entries = {r: merged[r] for r in sorted(merged) if merged[r] > 0}

    @classmethod
    def single(cls, ranking) -> Profile:
        r = ranking if isinstance(ranking, Ranking) else Ranking(tuple(ranking))
        return cls(r.m, {r: Fraction(1)})

    @property
    def m(self) -> int:
        return self._m

    @property
    def pairs(self) -> int:
        return pairs_count(self._m)

    def __getitem__(self, r):
        return self._entries[r]

    def get(self, r, default=Fraction(0)):
        return self._entries.get(r, default)

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def support(self) -> list[Ranking]:
        return list(self._entries)

    def initial_budgets(self) -> dict[Ranking, Fraction]:
        """``b_1(r) = R(r) * C(m,2)``."""
        c = self.pairs
        return {r: w * c for r, w in self._entries.items()}

    def __eq__(self, other):
        if not isinstance(other, Profile):
            return NotImplemented
        return self._m == other._m and self._entries == other._entries

    def __hash__(self):
        return hash((self._m, tuple(self._entries.items())))

    def __repr__(self):
        body = ", ".join(f"{r.order}: {w}" for r, w in self._entries.items())
        return f"Profile(m={self._m}, {{{body}}})"


class Subprofile(Mapping[Ranking, Fraction]):
    """Pointwise-dominated weights ``0 <= S(r) <= R(r)``."""

    __slots__ = ("parent", "_entries")

    def __init__(self, parent: Profile, entries):
        items = entries.items() if isinstance(entries, Mapping) else entries
        self.parent = parent
        self._entries: dict[Ranking, Fraction] = {}
        for r, w in items:
            if not isinstance(r, Ranking):
                r = Ranking(tuple(r))
            w = as_fraction(w)
            if w < 0 or w > parent.get(r):
                raise InvalidInputError(
                    f"subprofile weight {w} for {r.order} outside [0, {parent.get(r)}]"
                )
            if w:
                self._entries[r] = self._entries.get(r, Fraction(0)) + w
        for r, w in self._entries.items():
            if w > parent.get(r):
                raise InvalidInputError(f"merged subprofile weight exceeds R for {r.order}")

    @property
    def size(self) -> Fraction:
        return sum(self._entries.values(), Fraction(0))

    def __getitem__(self, r):
        return self._entries[r]

    def __iter__(self):
        return iter(self._entries)

    def __len__(self):
        return len(self._entries)

    def average_utility(self, out: Ranking) -> Fraction:
        size = self.size
        if size == 0:
            raise InvalidInputError("average utility of an empty subprofile")
        return sum((w * utility(r, out) for r, w in self._entries.items()), Fraction(0)) / size
