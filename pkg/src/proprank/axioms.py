"""Proportionality axioms, priceability certificates and average-utility bounds.

Every checker returns an :class:`AxiomReport`. A violated report carries a
``witness`` describing the violation with exact rationals; a satisfied
priceability report carries the payment scheme it found as ``certificate``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, lcm

import numpy as np

from proprank import kernels
from proprank.core import Profile, Ranking, Subprofile, pairs_count, positional_utility, utility
from proprank.errors import CapacityError, InvalidInputError
from proprank.flow import max_flow, pair_priceability_network, rank_priceability_network
from proprank.rules import PaymentScheme

ZERO = Fraction(0)
SPJR_SUPPORT_CAP = 16
_INT64_SAFE = 2**62

UJR, UPJR, SPJR = "uJR", "uPJR", "sPJR"
RANK_PRICEABLE, PAIR_PRICEABLE, PARETO = "rank-priceable", "pair-priceable", "Pareto"


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of one check.

    ``value`` is the headline number of the check: the smallest slack for
    the representation axioms, the maximum total payment for priceability
    and the number of reversed unanimous pairs for Pareto.
    """

    axiom: str
    satisfied: bool
    witness: dict | None = None
    value: object = None
    certificate: object = None

    def __post_init__(self):
        if self.satisfied == (self.witness is not None):
            raise InvalidInputError("a witness is present exactly when the axiom is violated")

    def __bool__(self):
        return self.satisfied

    def describe(self, names=None) -> str:
        verdict = "satisfied" if self.satisfied else "violated"
        text = f"{self.axiom}: {verdict}"
        if self.witness:
            parts = (f"{k}={show_value(v, names)}" for k, v in self.witness.items())
            text += " (" + ", ".join(parts) + ")"
        return text

    def __str__(self):
        return self.describe()


def show_value(v, names=None) -> str:
    """Readable form of a witness entry, using ``names`` for candidates when given."""
    name = (lambda c: names[c]) if names else (lambda c: f"x{c + 1}")
    if isinstance(v, Ranking):
        return ">".join(name(c) for c in v.order)
    if isinstance(v, (list, tuple)) and v and isinstance(v[0], Ranking):
        return "[" + "; ".join(show_value(r, names) for r in v) + "]"
    if isinstance(v, tuple) and len(v) == 2 and all(isinstance(c, int) for c in v):
        return f"({name(v[0])},{name(v[1])})"
    return str(v)


def _same_m(profile: Profile, out: Ranking):
    if out.m != profile.m:
        raise InvalidInputError(f"output ranks {out.m} candidates, profile has {profile.m}")


# -- representation axioms


def check_ujr(profile: Profile, out: Ranking) -> AxiomReport:
    """Every ranking of weight at least ``1/C(m,2)`` gets positive utility.

    Only the inverse of ``out`` can have utility 0, so at most one ranking
    is ever a witness.
    """
    _same_m(profile, out)
    c = profile.pairs
    inverse = out.inverse()
    w = profile.get(inverse)
    if c and w * c >= 1:
        return AxiomReport(UJR, False, {"ranking": inverse, "weight": w, "utility": 0}, value=-1)
    return AxiomReport(UJR, True, value=0)


def check_upjr(profile: Profile, out: Ranking) -> AxiomReport:
    """``u(r, out) >= floor(R(r) * C(m,2))`` for every ranking ``r``.

    The witness is the ranking with the largest deficit (first in profile
    order on ties).
    """
    _same_m(profile, out)
    c = profile.pairs
    worst = None
    for r, w in profile.items():
        need = math.floor(w * c)
        slack = utility(r, out) - need
        if worst is None or slack < worst[0]:
            worst = (slack, r, need)
    slack, r, need = worst
    if slack < 0:
        witness = {"ranking": r, "utility": need + slack, "required": need, "deficit": -slack}
        return AxiomReport(UPJR, False, witness, value=slack)
    return AxiomReport(UPJR, True, value=slack)


def _out_pairs(out: Ranking):
    o = out.order
    return [(o[i], o[j]) for i in range(len(o)) for j in range(i + 1, len(o))]


def _agreement_matrix(support, out):
    pairs = _out_pairs(out)
    agree = np.zeros((len(support), len(pairs)), dtype=np.bool_)
    for k, r in enumerate(support):
        pos = r.position
        agree[k] = [pos[x] < pos[y] for x, y in pairs]
    return agree


def _mask_requirements(weights, c):
    """``floor(C(m,2) * sum of weights in mask)`` for every bit mask."""
    den = lcm(*(w.denominator for w in weights))
    ints = [int(w * den) for w in weights]
    total = 1 << len(ints)
    big = den * c >= _INT64_SAFE
    sums = np.zeros(total, dtype=object if big else np.int64)
    for k, v in enumerate(ints):
        bit = 1 << k
        sums[bit:2 * bit] = sums[:bit] + v
    return (sums * c) // den


def check_spjr(profile: Profile, out: Ranking, cap: int = SPJR_SUPPORT_CAP) -> AxiomReport:
    """``|A(out) & union of A(r) over T| >= floor(C(m,2) * R(T))`` for all nonempty ``T``.

    Subprofiles reduce to subsets ``T`` of the support taken at full
    weight: the coverage only depends on which rankings are present,
    while the requirement only grows with their weights. The witness is
    the violating subset with the lowest bit mask (bit ``k`` is the
    ``k``-th support ranking in profile order).
    """
    _same_m(profile, out)
    support = profile.support()
    if len(support) > cap:
        raise CapacityError(f"support of {len(support)} exceeds the sPJR cap of {cap}")
    c = profile.pairs
    coverage = kernels.subset_coverage(_agreement_matrix(support, out))
    required = _mask_requirements([profile[r] for r in support], c)
    slack = coverage[1:] - required[1:]
    bad = np.flatnonzero(slack < 0)
    value = int(slack.min()) if len(slack) else 0
    if len(bad) == 0:
        return AxiomReport(SPJR, True, value=value)
    mask = int(bad[0]) + 1
    members = [r for k, r in enumerate(support) if mask >> k & 1]
    witness = {
        "subset": members,
        "mask": mask,
        "size": sum((profile[r] for r in members), ZERO),
        "coverage": int(coverage[mask]),
        "required": int(required[mask]),
        "violations": len(bad),
    }
    return AxiomReport(SPJR, False, witness, value=value)


def spjr_coverage(profile: Profile, out: Ranking, subset) -> tuple[int, int]:
    """``(coverage, requirement)`` of sPJR for one group of support rankings at full weight."""
    _same_m(profile, out)
    members = list(subset)
    for r in members:
        if r not in profile:
            raise InvalidInputError(f"ranking {r} is not in the support")
    union = set()
    for r in members:
        union |= {(x, y) for x, y in _out_pairs(out) if r.prefers(x, y)}
    need = math.floor(sum((profile[r] for r in members), ZERO) * profile.pairs)
    return len(union), need


# -- priceability


def verify_rank_priceability(profile: Profile, out: Ranking) -> AxiomReport:
    """Decide rank-priceability by a maximum flow in the transportation network.

    Satisfied iff the maximum total payment exceeds ``C(m,2) - 1``; the
    certificate is the payment scheme read off the flow.
    """
    _same_m(profile, out)
    c = profile.pairs
    flow = max_flow(rank_priceability_network(profile, out))
    if flow.value > c - 1:
        pay = {(r, out[i - 1]): f for (r, i), f in flow.middle.items() if f}
        return AxiomReport(RANK_PRICEABLE, True, value=flow.value,
                           certificate=PaymentScheme(by_candidate=pay))
    witness = {"max_payment": flow.value, "leftover": c - flow.value}
    return AxiomReport(RANK_PRICEABLE, False, witness, value=flow.value)


def verify_pair_priceability(profile: Profile, out: Ranking) -> AxiomReport:
    """Decide pair-priceability by a maximum flow; each output pair sells for 1."""
    _same_m(profile, out)
    c = profile.pairs
    g = pair_priceability_network(profile, out)
    flow = max_flow(g)
    if flow.value > c - 1:
        pay = {key: f for key, f in flow.middle.items() if f}
        return AxiomReport(PAIR_PRICEABLE, True, value=flow.value,
                           certificate=PaymentScheme(by_pair=pay))
    unpaid = [p for p in g.sink_caps if flow.sink.get(p, ZERO) < 1]
    witness = {"max_payment": flow.value, "leftover": c - flow.value, "unpaid_pair": unpaid[0]}
    return AxiomReport(PAIR_PRICEABLE, False, witness, value=flow.value)


def _scheme_failure(axiom, condition, **detail):
    return AxiomReport(axiom, False, {"condition": condition, **detail})


def verify_rank_scheme(profile: Profile, out: Ranking, scheme: PaymentScheme) -> AxiomReport:
    """Check a candidate payment scheme against the four rank-priceability conditions."""
    _same_m(profile, out)
    m, c = profile.m, profile.pairs
    place = {x: i for i, x in enumerate(out.order)}
    spent = {r: ZERO for r in profile}
    per_slot = [ZERO] * m
    for (r, x), p in scheme.by_candidate.items():
        if r not in profile:
            if p:
                return _scheme_failure(RANK_PRICEABLE, 2, ranking=r, payment=p, budget=ZERO)
            continue
        i = place[x]
        u = positional_utility(r, x, out.order[i:])
        if p < 0 or p > u:
            return _scheme_failure(RANK_PRICEABLE, 1, ranking=r, candidate=x, payment=p, utility=u)
        spent[r] += p
        per_slot[i] += p
    for r, s in spent.items():
        if s > c * profile[r]:
            return _scheme_failure(RANK_PRICEABLE, 2, ranking=r, payment=s, budget=c * profile[r])
    for i, s in enumerate(per_slot):
        if s > m - i - 1:
            return _scheme_failure(RANK_PRICEABLE, 3, position=i + 1, payment=s, cost=m - i - 1)
    total = sum(spent.values(), ZERO)
    if not total > c - 1:
        return _scheme_failure(RANK_PRICEABLE, 4, total=total, leftover=c - total)
    return AxiomReport(RANK_PRICEABLE, True, value=total, certificate=scheme)


def verify_pair_scheme(profile: Profile, out: Ranking, scheme: PaymentScheme) -> AxiomReport:
    """Check a pair payment scheme against the four pair-priceability conditions."""
    _same_m(profile, out)
    c = profile.pairs
    sold = set(_out_pairs(out))
    spent = {r: ZERO for r in profile}
    per_pair = {p: ZERO for p in sold}
    for (r, pair), p in scheme.by_pair.items():
        if pair not in sold:
            return _scheme_failure(PAIR_PRICEABLE, 1, ranking=r, pair=pair, payment=p, utility=0)
        u = 1 if r.prefers(*pair) else 0
        if p < 0 or p > u:
            return _scheme_failure(PAIR_PRICEABLE, 1, ranking=r, pair=pair, payment=p, utility=u)
        if r not in profile:
            if p:
                return _scheme_failure(PAIR_PRICEABLE, 2, ranking=r, payment=p, budget=ZERO)
            continue
        spent[r] += p
        per_pair[pair] += p
    for r, s in spent.items():
        if s > c * profile[r]:
            return _scheme_failure(PAIR_PRICEABLE, 2, ranking=r, payment=s, budget=c * profile[r])
    for pair in _out_pairs(out):
        if per_pair[pair] > 1:
            return _scheme_failure(PAIR_PRICEABLE, 3, pair=pair, payment=per_pair[pair], cost=1)
    total = sum(spent.values(), ZERO)
    if not total > c - 1:
        return _scheme_failure(PAIR_PRICEABLE, 4, total=total, leftover=c - total)
    return AxiomReport(PAIR_PRICEABLE, True, value=total, certificate=scheme)


def check_pareto(profile: Profile, out: Ranking) -> AxiomReport:
    """No pair ranked the same way by every support ranking is reversed by ``out``."""
    _same_m(profile, out)
    support = profile.support()
    reversed_pairs = [
        (y, x) for x, y in _out_pairs(out) if all(r.prefers(y, x) for r in support)
    ]
    if reversed_pairs:
        witness = {"pair": reversed_pairs[0], "count": len(reversed_pairs)}
        return AxiomReport(PARETO, False, witness, value=len(reversed_pairs))
    return AxiomReport(PARETO, True, value=0)


# -- average utility of the worst group


THM2_PSB, THM4_RMES, THM6_FB = "thm2-psb", "thm4-rmes", "thm6-fb"
BOUNDS = (THM2_PSB, THM4_RMES, THM6_FB)


@dataclass(frozen=True)
class CurvePoint:
    alpha: Fraction
    min_avg_utility: Fraction
    bound_value: Fraction
    note: str = ""

    @property
    def margin(self) -> Fraction:
        return self.min_avg_utility - self.bound_value


@dataclass(frozen=True)
class BoundCurve:
    rule_bound: str
    breakpoints: tuple = field(default_factory=tuple)

    @property
    def min_margin(self) -> Fraction:
        return min(p.margin for p in self.breakpoints)

    @property
    def worst(self) -> CurvePoint:
        return min(self.breakpoints, key=lambda p: p.margin)


def xi(m: int) -> int:
    """Regime switch constant ``C(m - floor(m/4), 2)`` of the equal-shares bound."""
    return comb(m - m // 4, 2)


def bound_value(bound: str, m: int, alpha: Fraction, branch: int | None = None) -> Fraction:
    """Lower bound on the average utility of any group of weight ``alpha > 0``.

    For the equal-shares bound, ``branch`` forces one of the two cases;
    by default the case is chosen by ``C(m,2)*alpha - 1/2 <= xi``.
    """
    c = pairs_count(m)
    if bound in (THM2_PSB, THM6_FB):
        return c * alpha / 4 - Fraction(3, 16)
    if bound != THM4_RMES:
        raise InvalidInputError(f"unknown bound {bound!r}")
    x = xi(m)
    if branch is None:
        branch = 1 if c * alpha - Fraction(1, 2) <= x else 2
    if branch == 1:
        return c * alpha / 4 - Fraction(1, 8)
    ca = c * alpha
    return Fraction(c, 2) * (1 - x / ca) + Fraction(x + 1, 4) * x / ca - 1 / (4 * alpha)


def _greedy_order(profile: Profile, out: Ranking):
    rows = [(utility(r, out), k, r, w) for k, (r, w) in enumerate(profile.items())]
    rows.sort()
    return [(r, w, u) for u, _, r, w in rows]


def greedy_subprofile(profile: Profile, out: Ranking, alpha) -> Subprofile:
    """A subprofile of size ``alpha`` with the least average utility for ``out``."""
    alpha = Fraction(alpha)
    if not 0 < alpha <= 1:
        raise InvalidInputError("group size must lie in (0, 1]")
    take, left = {}, alpha
    for r, w, _ in _greedy_order(profile, out):
        if left == 0:
            break
        part = min(w, left)
        take[r] = part
        left -= part
    return Subprofile(profile, take)


def min_average_utility(profile: Profile, out: Ranking, alpha) -> Fraction:
    return greedy_subprofile(profile, out, alpha).average_utility(out)


def worst_group_margin(profile: Profile, out: Ranking, bound: str) -> BoundCurve:
    """Minimum over group sizes of (least average utility) - (guaranteed bound).

    Filling the lowest-utility rankings first minimizes the average for
    each size. Between consecutive cumulative weights the average has the
    form ``u_k - D/alpha`` with ``D >= 0``; the linear bounds make the
    margin concave there and the hyperbolic branch makes it monotone, so
    evaluating segment endpoints (plus the equal-shares regime switch,
    from both sides, and the ``alpha -> 0`` limit) gives the exact minimum.
    """
    _same_m(profile, out)
    m, c = profile.m, profile.pairs
    if bound not in BOUNDS:
        raise InvalidInputError(f"unknown bound {bound!r}")
    if bound == THM4_RMES and m < 4:
        raise InvalidInputError("the equal-shares bound needs m >= 4")
    order = _greedy_order(profile, out)

    def avg_at(alpha):
        total, left = ZERO, alpha
        for _, w, u in order:
            part = min(w, left)
            total += part * u
            left -= part
            if left == 0:
                break
        return total / alpha

    u_min = order[0][2]
    limit = Fraction(-1, 8) if bound == THM4_RMES else Fraction(-3, 16)
    points = [CurvePoint(ZERO, Fraction(u_min), limit, "limit")]
    cumulative = ZERO
    switch = (xi(m) + Fraction(1, 2)) / c if bound == THM4_RMES else None
    alphas = []
    for _, w, _ in order:
        cumulative += w
        alphas.append(cumulative)
    for a in sorted(set(alphas) | ({switch} if switch is not None and switch <= 1 else set())):
        avg = avg_at(a)
        points.append(CurvePoint(a, avg, bound_value(bound, m, a)))
        if a == switch:
            points.append(CurvePoint(a, avg, bound_value(bound, m, a, branch=2), "switch"))
    return BoundCurve(bound, tuple(points))
