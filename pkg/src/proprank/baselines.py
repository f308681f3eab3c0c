"""Classical social welfare functions used as contrast and as oracles.

Kemeny and Squared Kemeny enumerate all ``m!`` rankings and are therefore
guarded by an enumeration cap. Ties between output rankings always go to
the lexicographically smallest index sequence.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from math import comb, factorial, lcm

import numpy as np

from proprank import kernels
from proprank.core import Profile, Ranking, borda_total, pairs_count, utility
from proprank.errors import CapacityError, InvalidInputError

DEFAULT_ENUMERATION_CAP = 8
_INT64_SAFE = 2**62


@dataclass(frozen=True)
class SwfResult:
    ranking: Ranking
    score: Fraction
    tie_note: bool = False


def _check_cap(m: int, cap: int):
    if cap > DEFAULT_ENUMERATION_CAP:
        warnings.warn(
            f"enumeration cap raised to {cap}; {factorial(cap)} rankings may be scored",
            stacklevel=3,
        )
    if m > cap:
        raise CapacityError(f"m={m} exceeds the enumeration cap of {cap}")


def _integer_weights(profile: Profile) -> tuple[list[int], int]:
    den = lcm(*(w.denominator for w in profile.values()))
    return [int(w * den) for w in profile.values()], den


def _enumerate(profile: Profile, cap: int):
    _check_cap(profile.m, cap)
    perms = kernels.all_permutations(profile.m)
    support_pos = kernels.positions_matrix([r.order for r in profile])
    utils = kernels.permutation_utilities(perms, support_pos)
    return perms, utils


def _weighted_rows(values: np.ndarray, weights: list[int]) -> np.ndarray:
    bound = int(np.abs(values).max(initial=0)) * sum(weights)
    if bound < _INT64_SAFE:
        return values @ np.array(weights, dtype=np.int64)
    return values.astype(object) @ np.array(weights, dtype=object)


def kemeny(profile: Profile, cap: int = DEFAULT_ENUMERATION_CAP) -> SwfResult:
    """Maximize ``sum_r R(r) * u(r, out)`` over all rankings."""
    perms, utils = _enumerate(profile, cap)
    weights, den = _integer_weights(profile)
    scores = _weighted_rows(utils, weights)
    best = scores.max()
    hits = np.flatnonzero(scores == best)
    return SwfResult(Ranking(tuple(perms[hits[0]])), Fraction(int(best), den), len(hits) > 1)


def squared_kemeny(profile: Profile, cap: int = DEFAULT_ENUMERATION_CAP) -> SwfResult:
    """Minimize ``sum_r R(r) * swap(r, out)**2`` over all rankings."""
    perms, utils = _enumerate(profile, cap)
    swaps = pairs_count(profile.m) - utils
    weights, den = _integer_weights(profile)
    scores = _weighted_rows(swaps * swaps, weights)
    best = scores.min()
    hits = np.flatnonzero(scores == best)
    return SwfResult(Ranking(tuple(perms[hits[0]])), Fraction(int(best), den), len(hits) > 1)


def sequential_borda(profile: Profile) -> SwfResult:
    """Repeatedly place the Borda winner of the remaining candidates.

    Weights never change. The score is the utilitarian welfare of the output.
    """
    remaining = list(range(profile.m))
    weights = dict(profile)
    order = []
    tied = False
    while remaining:
        active = frozenset(remaining)
        scores = [borda_total(weights, x, active) for x in remaining]
        top = max(scores)
        tied |= scores.count(top) > 1
        winner = remaining[scores.index(top)]
        order.append(winner)
        remaining.remove(winner)
    out = Ranking(tuple(order))
    welfare = sum((w * utility(r, out) for r, w in profile.items()), Fraction(0))
    return SwfResult(out, welfare, tied)


def chamberlin_courant(profile: Profile) -> SwfResult:
    """Lexicographically smallest ranking whose reverse has minimal weight.

    Maximizing the weight of rankings with positive utility is the same as
    minimizing the weight of the single ranking with zero utility, the
    reverse of the output. Only ``len(support) + 1`` candidates need to be
    scanned unless every ranking is in the support.
    """
    m = profile.m
    if m < 2:
        raise InvalidInputError("Chamberlin-Courant needs at least two candidates")
    if len(profile) < factorial(m):
        for order in permutations(range(m)):
            if Ranking(order[::-1]) not in profile:
                # a zero-weight reverse exists; nothing can beat objective 1
                return SwfResult(Ranking(order), Fraction(1), True)
    best = None
    best_weight = None
    tied = False
    for order in permutations(range(m)):
        w = profile.get(Ranking(order[::-1]))
        if best is None or w < best_weight:
            best, best_weight, tied = order, w, False
        elif w == best_weight:
            tied = True
    return SwfResult(Ranking(best), 1 - best_weight, tied)


def prop1_instance(m: int) -> tuple[Profile, Ranking]:
    """Profile on which Squared Kemeny leaves ``x1..xm`` with zero utility.

    Returns the profile and the ranking ``x1, ..., xm`` it under-represents.
    The third ranking puts ``x1`` last and orders ``x2..xm`` with exactly
    ``floor(C(m-1,2)/2)`` agreements with the identity; the fourth is its
    mirror on ``x2..xm`` with ``x1`` still last.
    """
    if m < 5:
        raise InvalidInputError("the construction needs m >= 5")
    rest = list(range(1, m))
    n = len(rest)
    inversions = comb(n, 2) - comb(n, 2) // 2
    # greedy Lehmer code: pull the largest item forward while inversions remain
    third, pool, left = [], rest[:], inversions
    while pool:
        jump = min(left, len(pool) - 1)
        third.append(pool.pop(jump))
        left -= jump
    agreement = comb(n, 2) - sum(
        1 for i in range(n) for j in range(i + 1, n) if third[i] > third[j]
    )
    if agreement != comb(n, 2) // 2:
        raise AssertionError(f"third ranking agrees on {agreement} pairs")
    r1 = Ranking.identity(m)
    r2 = Ranking((0, *reversed(rest)))
    r3 = Ranking((*third, 0))
    r4 = Ranking((*reversed(third), 0))
    w1 = Fraction(m, 5) / comb(m, 2)
    other = (1 - w1) / 3
    return Profile(m, {r1: w1, r2: other, r3: other, r4: other}), r1
