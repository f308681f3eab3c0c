"""Proportional rules: Sequential Borda with cost sharing, Equal Shares, Flow-adjusting Borda.

Every rule returns the output ranking together with a :class:`BudgetTrace`
recording, round by round, the active set, the budgets before the round,
the chosen candidate and what each ranking paid. Traces convert to payment
schemes that the priceability verifiers in :mod:`proprank.axioms` check
condition by condition.

Candidate ties go to the smaller index unless a ``tie_order`` is given, in
which case tied candidates are compared by their position in that sequence
(candidates missing from it come after all listed ones, by index).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from proprank.core import Profile, Ranking, borda_total, positional_utility
from proprank.errors import InconsistencyError, InvalidInputError
from proprank.flow import (
    UNBOUNDED,
    FlowAssignment,
    FlowNetwork,
    min_ratio_max_flow,
)

ZERO = Fraction(0)


@dataclass(frozen=True)
class RoundRecord:
    """One round of a rule.

    ``budgets`` are the budgets *before* the round. ``price`` is set by RMES
    priced rounds only; ``flow`` and ``flow_value`` by FB only. ``tied`` is
    true when more than one candidate was optimal for the round.
    """

    index: int
    active_set: frozenset
    chosen: int
    budgets: dict
    payments: dict
    price: Fraction | None = None
    flow: FlowAssignment | None = None
    flow_value: Fraction | None = None
    tied: bool = False

    @property
    def total_payment(self) -> Fraction:
        return sum(self.payments.values(), ZERO)


@dataclass(frozen=True)
class BudgetTrace:
    rule: str
    initial_budgets: dict
    rounds: tuple
    final_budgets: dict

    @property
    def leftover(self) -> Fraction:
        """Total unspent budget, ``C(m,2)`` minus all payments."""
        return sum(self.final_budgets.values(), ZERO)

    def budget_history(self) -> list[dict]:
        """Budgets before every round followed by the final budgets."""
        return [r.budgets for r in self.rounds] + [self.final_budgets]


@dataclass(frozen=True)
class PaymentScheme:
    """A priceability payment function.

    Exactly one of the maps is filled: ``by_candidate[(r, x)]`` for
    rank-priceability or ``by_pair[(r, (x, y))]`` for pair-priceability.
    Missing keys mean a payment of 0.
    """

    by_candidate: dict = field(default_factory=dict)
    by_pair: dict = field(default_factory=dict)

    @property
    def total(self) -> Fraction:
        return sum(self.by_candidate.values(), ZERO) + sum(self.by_pair.values(), ZERO)


def _pick(scored: Sequence[tuple[int, Fraction]], best, tie_order) -> tuple[int, bool]:
    """Candidate attaining ``best`` (``max`` or ``min``) with the tie rule."""
    target = best(s for _, s in scored)
    hits = [x for x, s in scored if s == target]
    if tie_order is None or len(hits) == 1:
        return min(hits), len(hits) > 1
    rank = {c: i for i, c in enumerate(tie_order)}
    return min(hits, key=lambda c: (rank.get(c, len(rank)), c)), True


def _check_profile(profile: Profile):
    if profile.m < 2:
        raise InvalidInputError("the proportional rules need at least two candidates")


def _borda_winner(budgets, active, tie_order):
    scored = [(x, borda_total(budgets, x, active)) for x in sorted(active)]
    x, tied = _pick(scored, max, tie_order)
    return x, dict(scored)[x], tied


def _finish(rule, profile, order, rounds, budgets) -> tuple[Ranking, BudgetTrace]:
    trace = BudgetTrace(rule, profile.initial_budgets(), tuple(rounds), dict(budgets))
    return Ranking(tuple(order)), trace


def _last_round(i, active, budgets, order, rounds):
    """Append the final candidate with an empty payment record."""
    (last,) = active
    rounds.append(RoundRecord(i, frozenset(active), last, dict(budgets), {}))
    order.append(last)


# -- Proportional Sequential Borda


def run_psb(profile: Profile, tie_order: Sequence[int] | None = None):
    """Proportional Sequential Borda.

    Each round places the Borda winner ``x*`` with respect to the current
    budgets; ranking ``r`` pays its proportional share
    ``(m-i) * u(r,x*,X) * b(r) / U`` of the cost, capped at its budget.
    """
    _check_profile(profile)
    m = profile.m
    budgets = profile.initial_budgets()
    active = set(range(m))
    order, rounds = [], []
    for i in range(1, m):
        x, score, tied = _borda_winner(budgets, active, tie_order)
        payments = {}
        for r, b in budgets.items():
            u = positional_utility(r, x, active)
            share = (m - i) * u * b / score if score else ZERO
            payments[r] = min(share, b)
        rounds.append(RoundRecord(i, frozenset(active), x, dict(budgets), payments, tied=tied))
        budgets = {r: b - payments[r] for r, b in budgets.items()}
        active.remove(x)
        order.append(x)
    _last_round(m, active, budgets, order, rounds)
    return _finish("psb", profile, order, rounds, budgets)


# -- Ranked Method of Equal Shares


def solve_rmes_price(
    b1: Mapping[Ranking, Fraction],
    bi: Mapping[Ranking, Fraction],
    x: int,
    X,
) -> Fraction | None:
    """Least ``rho`` with ``sum_r min(rho*b1(r)*u, bi(r), u) = |X| - 1``.

    ``u = u(r, x, X)``. The left side is concave, piecewise linear and
    nondecreasing in ``rho``; its breakpoints ``min(bi, u) / (b1 * u)`` are
    walked in order and the crossing segment is solved exactly. Returns
    ``None`` when even ``rho = inf`` cannot cover the cost.
    """
    X = frozenset(X)
    if len(X) < 3:
        raise InvalidInputError("prices are only defined while at least three candidates remain")
    cost = len(X) - 1
    terms = []
    for r, start in b1.items():
        u = positional_utility(r, x, X)
        if u == 0 or start == 0:
            continue
        slope = start * u
        cap = min(bi.get(r, ZERO), Fraction(u))
        terms.append((cap / slope, cap, slope))
    if sum((cap for _, cap, _ in terms), ZERO) < cost:
        return None
    terms.sort(key=lambda t: t[0])
    saturated = ZERO
    slope = sum((s for _, _, s in terms), ZERO)
    for bp, cap, s in terms:
        if saturated + slope * bp >= cost:
            return (cost - saturated) / slope
        saturated += cap
        slope -= s
    raise InconsistencyError("price walk ended without reaching the cost")


def run_rmes(profile: Profile, tie_order: Sequence[int] | None = None):
    """Ranked Method of Equal Shares.

    Rounds ``1..m-2`` buy the candidate with the least price ``rho`` and
    charge ``min(rho*b1*u, b, u)``; the last two candidates are ordered by
    a majority of the remaining budgets, and every ranking agreeing with
    that order spends what it has left.
    """
    _check_profile(profile)
    m = profile.m
    b1 = profile.initial_budgets()
    budgets = dict(b1)
    active = set(range(m))
    order, rounds = [], []
    for i in range(1, m - 1):
        prices = []
        for x in sorted(active):
            p = solve_rmes_price(b1, budgets, x, active)
            if p is not None:
                prices.append((x, p))
        if not prices:
            raise InconsistencyError(f"round {i}: no candidate is affordable")
        x, tied = _pick(prices, min, tie_order)
        rho = dict(prices)[x]
        payments = {}
        for r, b in budgets.items():
            u = positional_utility(r, x, active)
            payments[r] = min(rho * b1[r] * u, b, Fraction(u))
        rounds.append(
            RoundRecord(i, frozenset(active), x, dict(budgets), payments, price=rho, tied=tied)
        )
        budgets = {r: b - payments[r] for r, b in budgets.items()}
        active.remove(x)
        order.append(x)

    a, b = sorted(active)
    for_a = sum((v for r, v in budgets.items() if r.prefers(a, b)), ZERO)
    for_b = sum((v for r, v in budgets.items() if r.prefers(b, a)), ZERO)
    tied = for_a == for_b
    if tied:
        x, _ = _pick([(a, ZERO), (b, ZERO)], min, tie_order)
    else:
        x = a if for_a > for_b else b
    y = b if x == a else a
    payments = {r: (v if r.prefers(x, y) else ZERO) for r, v in budgets.items()}
    rounds.append(RoundRecord(m - 1, frozenset(active), x, dict(budgets), payments, tied=tied))
    budgets = {r: v - payments[r] for r, v in budgets.items()}
    active.remove(x)
    order.append(x)
    _last_round(m, active, budgets, order, rounds)
    return _finish("rmes", profile, order, rounds, budgets)


# -- Flow-adjusting Borda


def fb_network(budgets: Mapping[Ranking, Fraction], x: int, X) -> FlowNetwork:
    """``s -> r`` (budget), ``r -> y`` when ``r`` puts ``x`` above ``y`` (unbounded), ``y -> t`` (1)."""
    rest = sorted(set(X) - {x})
    source = dict(budgets)
    middle = {(r, y): UNBOUNDED for r in budgets for y in rest if r.prefers(x, y)}
    sink = {y: Fraction(1) for y in rest}
    return FlowNetwork(source, middle, sink)


def run_fb(profile: Profile, tie_order: Sequence[int] | None = None):
    """Flow-adjusting Borda.

    Each round places the Borda winner ``x*`` with respect to the current
    budgets; payments are the source-arc flows of a maximum flow through
    :func:`fb_network` that minimizes the worst payment per unit of
    ``b(r) * u(r, x*, X)``.
    """
    _check_profile(profile)
    m = profile.m
    budgets = profile.initial_budgets()
    active = set(range(m))
    order, rounds = [], []
    for i in range(1, m):
        x, _, tied = _borda_winner(budgets, active, tie_order)
        g = fb_network(budgets, x, active)
        weights = {r: b * positional_utility(r, x, active) for r, b in budgets.items()}
        flow = min_ratio_max_flow(g, weights)
        payments = {r: flow.source.get(r, ZERO) for r in budgets}
        rounds.append(
            RoundRecord(
                i, frozenset(active), x, dict(budgets), payments,
                flow=flow, flow_value=flow.value, tied=tied,
            )
        )
        budgets = {r: b - payments[r] for r, b in budgets.items()}
        active.remove(x)
        order.append(x)
    _last_round(m, active, budgets, order, rounds)
    return _finish("fb", profile, order, rounds, budgets)


RULES = {"psb": run_psb, "rmes": run_rmes, "fb": run_fb}


# -- traces as priceability witnesses


def rank_scheme(trace: BudgetTrace) -> PaymentScheme:
    """``pi(r, x_i)`` = what ``r`` paid in the round that placed ``x_i``."""
    pay = {}
    for rec in trace.rounds:
        for r, p in rec.payments.items():
            if p:
                pay[(r, rec.chosen)] = p
    return PaymentScheme(by_candidate=pay)


def pair_scheme(trace: BudgetTrace) -> PaymentScheme:
    """``pi(r, (x_i, y))`` = flow on ``r -> y`` in round ``i`` (FB traces only)."""
    pay = {}
    for rec in trace.rounds:
        if rec.flow is None:
            if rec.payments and any(rec.payments.values()):
                raise InvalidInputError("pair schemes need flow records in every paying round")
            continue
        for (r, y), f in rec.flow.middle.items():
            if f:
                pay[(r, (rec.chosen, y))] = f
    return PaymentScheme(by_pair=pay)
