"""Exact max-flow on layered networks ``s -> left -> right -> t``.

All capacities are :class:`~fractions.Fraction` or :data:`UNBOUNDED`.
Max flow uses shortest augmenting paths (Edmonds-Karp); the depth-4 shape
keeps the number of phases tiny. :func:`min_ratio_max_flow` finds, among
all maximum flows, one minimizing the worst source-arc flow per unit of
weight, by a cut-driven discrete Newton search.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Hashable, Mapping

from proprank.core import Profile, Ranking, pairs_count, positional_utility
from proprank.errors import InconsistencyError, InvalidInputError

UNBOUNDED = math.inf
"""Capacity of an arc that can carry any amount of flow."""

SOURCE = "s"
SINK = "t"
_NEWTON_LIMIT = 10_000


def _check_capacity(c, what):
    if c is UNBOUNDED or c == UNBOUNDED:
        return UNBOUNDED
    if isinstance(c, float):
        raise InvalidInputError(f"{what}: float capacity {c!r}; use Fraction or UNBOUNDED")
    c = Fraction(c)
    if c < 0:
        raise InvalidInputError(f"{what}: negative capacity {c}")
    return c


@dataclass(frozen=True)
class FlowNetwork:
    """A four-layer network.

    ``source_caps[l]`` is the capacity of ``s -> l``, ``middle[(l, r)]`` of
    ``l -> r`` and ``sink_caps[r]`` of ``r -> t``. Left and right labels
    are arbitrary hashables; a mapping key rules out parallel arcs.
    """

    source_caps: Mapping[Hashable, object]
    middle: Mapping[tuple, object]
    sink_caps: Mapping[Hashable, object]

    def __post_init__(self):
        src = {l: _check_capacity(c, f"arc s->{l!r}") for l, c in self.source_caps.items()}
        snk = {r: _check_capacity(c, f"arc {r!r}->t") for r, c in self.sink_caps.items()}
        mid = {}
        for key, c in self.middle.items():
            if not (isinstance(key, tuple) and len(key) == 2):
                raise InvalidInputError(f"middle arc key must be a (left, right) pair: {key!r}")
            l, r = key
            if l not in src:
                raise InvalidInputError(f"middle arc from unknown left vertex {l!r}")
            if r not in snk:
                raise InvalidInputError(f"middle arc to unknown right vertex {r!r}")
            mid[key] = _check_capacity(c, f"arc {l!r}->{r!r}")
        if set(src) & set(snk):
            raise InvalidInputError("a vertex cannot be on both the left and right layer")
        object.__setattr__(self, "source_caps", src)
        object.__setattr__(self, "sink_caps", snk)
        object.__setattr__(self, "middle", mid)

    @property
    def left(self) -> list:
        return list(self.source_caps)

    @property
    def right(self) -> list:
        return list(self.sink_caps)

    def with_source_caps(self, caps: Mapping) -> FlowNetwork:
        return FlowNetwork(dict(caps), self.middle, self.sink_caps)

    def arcs(self):
        """Every arc as ``(tail, head, capacity)`` with ``SOURCE``/``SINK`` terminals."""
        for l, c in self.source_caps.items():
            yield SOURCE, l, c
        for (l, r), c in self.middle.items():
            yield l, r, c
        for r, c in self.sink_caps.items():
            yield r, SINK, c

    def to_dot(self, flow: FlowAssignment | None = None) -> str:
        """Graphviz text; capacities (and flows) printed as ``p/q``."""

        def q(v):
            if v == UNBOUNDED:
                return "inf"
            v = Fraction(v)
            return f"{v.numerator}/{v.denominator}"

        def vid(v):
            return '"' + str(v).replace('"', "'") + '"'

        lines = ["digraph G {", "  rankdir=LR;"]
        for tail, head, cap in self.arcs():
            label = f"cap={q(cap)}"
            if flow is not None:
                label += f" f={q(flow.arc(tail, head))}"
            lines.append(f"  {vid(tail)} -> {vid(head)} [label=\"{label}\"];")
        lines.append("}")
        return "\n".join(lines)


@dataclass(frozen=True)
class FlowAssignment:
    source: dict = field(default_factory=dict)
    middle: dict = field(default_factory=dict)
    sink: dict = field(default_factory=dict)
    value: Fraction = Fraction(0)

    def arc(self, tail, head) -> Fraction:
        if tail == SOURCE:
            return self.source.get(head, Fraction(0))
        if head == SINK:
            return self.sink.get(tail, Fraction(0))
        return self.middle.get((tail, head), Fraction(0))


@dataclass(frozen=True)
class Cut:
    """An s-t cut given by the left and right vertices on the source side."""

    source_left: frozenset
    source_right: frozenset
    capacity: object

    @property
    def source_side(self) -> frozenset:
        return frozenset({SOURCE}) | self.source_left | self.source_right


def cut_capacity(g: FlowNetwork, source_left, source_right):
    """Capacity of the cut whose source side is ``{s} + source_left + source_right``."""
    total = Fraction(0)
    for l, c in g.source_caps.items():
        if l not in source_left:
            total += c
    for (l, r), c in g.middle.items():
        if l in source_left and r not in source_right:
            total += c
    for r, c in g.sink_caps.items():
        if r in source_right:
            total += c
    return total


class _Residual:
    """Index-based residual graph for one solve."""

    def __init__(self, g: FlowNetwork):
        self.left = g.left
        self.right = g.right
        nl = len(self.left)
        self.n = nl + len(self.right) + 2
        self.s, self.t = 0, self.n - 1
        self.lidx = {l: 1 + i for i, l in enumerate(self.left)}
        self.ridx = {r: 1 + nl + i for i, r in enumerate(self.right)}
        self.adj = [[] for _ in range(self.n)]
        self.head, self.cap = [], []
        self.arc_of = {}
        for l, c in g.source_caps.items():
            self.arc_of[(SOURCE, l)] = self._add(self.s, self.lidx[l], c)
        for (l, r), c in g.middle.items():
            self.arc_of[(l, r)] = self._add(self.lidx[l], self.ridx[r], c)
        for r, c in g.sink_caps.items():
            self.arc_of[(r, SINK)] = self._add(self.ridx[r], self.t, c)

    def _add(self, u, v, c):
        e = len(self.head)
        self.head += [v, u]
        self.cap += [c, Fraction(0)]
        self.adj[u].append(e)
        self.adj[v].append(e + 1)
        return e

    def _bfs(self):
        parent = [-1] * self.n
        seen = [False] * self.n
        seen[self.s] = True
        queue = deque([self.s])
        while queue:
            u = queue.popleft()
            for e in self.adj[u]:
                v = self.head[e]
                if not seen[v] and self.cap[e] > 0:
                    seen[v] = True
                    parent[v] = e
                    if v == self.t:
                        return parent
                    queue.append(v)
        return None

    def run(self) -> Fraction:
        total = Fraction(0)
        while True:
            parent = self._bfs()
            if parent is None:
                return total
            push = UNBOUNDED
            v = self.t
            while v != self.s:
                e = parent[v]
                push = min(push, self.cap[e])
                v = self.head[e ^ 1]
            if push == UNBOUNDED:
                raise InvalidInputError("unbounded s-t path: maximum flow is infinite")
            v = self.t
            while v != self.s:
                e = parent[v]
                self.cap[e] -= push
                self.cap[e ^ 1] += push
                v = self.head[e ^ 1]
            total += push

    def flow_on(self, e) -> Fraction:
        return self.cap[e ^ 1]

    def reachable(self) -> set:
        seen = {self.s}
        queue = deque([self.s])
        while queue:
            u = queue.popleft()
            for e in self.adj[u]:
                v = self.head[e]
                if v not in seen and self.cap[e] > 0:
                    seen.add(v)
                    queue.append(v)
        return seen

    def assignment(self, value) -> FlowAssignment:
        src, mid, snk = {}, {}, {}
        for (tail, head), e in self.arc_of.items():
            f = self.flow_on(e)
            if tail == SOURCE:
                src[head] = f
            elif head == SINK:
                snk[tail] = f
            else:
                mid[(tail, head)] = f
        return FlowAssignment(src, mid, snk, value)

    def cut(self) -> Cut:
        reach = self.reachable()
        sl = frozenset(l for l, i in self.lidx.items() if i in reach)
        sr = frozenset(r for r, i in self.ridx.items() if i in reach)
        return sl, sr


def verify_flow(g: FlowNetwork, f: FlowAssignment):
    """Raise :class:`InconsistencyError` unless ``f`` is a feasible flow of value ``f.value``."""
    for tail, head, cap in g.arcs():
        x = f.arc(tail, head)
        if x < 0 or x > cap:
            raise InconsistencyError(f"flow {x} on {tail!r}->{head!r} violates capacity {cap}")
    for l in g.source_caps:
        out = sum((x for (a, _), x in f.middle.items() if a == l), Fraction(0))
        if out != f.source.get(l, 0):
            raise InconsistencyError(f"conservation fails at left vertex {l!r}")
    for r in g.sink_caps:
        inflow = sum((x for (_, b), x in f.middle.items() if b == r), Fraction(0))
        if inflow != f.sink.get(r, 0):
            raise InconsistencyError(f"conservation fails at right vertex {r!r}")
    if sum(f.source.values(), Fraction(0)) != f.value:
        raise InconsistencyError("flow value differs from source outflow")


def _solve(g: FlowNetwork):
    res = _Residual(g)
    value = res.run()
    flow = res.assignment(value)
    verify_flow(g, flow)
    sl, sr = res.cut()
    cap = cut_capacity(g, sl, sr)
    if cap != value:
        raise InconsistencyError(f"max flow {value} differs from residual cut {cap}")
    return flow, Cut(sl, sr, cap)


def max_flow(g: FlowNetwork) -> FlowAssignment:
    """A maximum flow; its value is checked against the residual min cut."""
    return _solve(g)[0]


def min_cut(g: FlowNetwork) -> Cut:
    """The source-minimal minimum cut (residual reachability of a max flow)."""
    return _solve(g)[1]


# -- ratio-minimizing maximum flow


def _capped(g, weights, rho, fixed):
    caps = {}
    for l, c in g.source_caps.items():
        w = weights.get(l, Fraction(0))
        level = fixed.get(l, rho)
        caps[l] = min(c, level * w) if w > 0 else Fraction(0)
    return g.with_source_caps(caps)


def _cut_root(g, weights, free, cut_left, need):
    """Smallest rho with ``sum_{l free, l not in cut} min(c_l, rho*w_l) >= need``."""
    if need <= 0:
        return Fraction(0)
    terms = []
    for l in free:
        if l not in cut_left:
            c = g.source_caps[l]
            terms.append((UNBOUNDED if c == UNBOUNDED else c / weights[l], c, weights[l]))
    terms.sort(key=lambda t: t[0])
    saturated = Fraction(0)
    slope = sum((w for _, _, w in terms), Fraction(0))
    for bp, cap, w in terms:
        if bp == UNBOUNDED or saturated + slope * bp >= need:
            return (need - saturated) / slope
        saturated += cap
        slope -= w
    raise InconsistencyError("cut can never carry the target flow value")


def _min_feasible_level(g, weights, free, fixed, target):
    """Discrete Newton: least rho such that the capped network still carries ``target``."""
    free_set = set(free)
    pinned_caps = {
        l: (min(g.source_caps[l], fixed[l] * weights[l]) if l in fixed else Fraction(0))
        for l in g.source_caps if l not in free_set
    }
    total_w = sum((weights[l] for l in free), Fraction(0))
    rho = max(Fraction(0), (target - sum(pinned_caps.values(), Fraction(0))) / total_w)
    for _ in range(_NEWTON_LIMIT):
        flow, cut = _solve(_capped(g, weights, rho, fixed))
        if flow.value == target:
            return rho, flow
        if flow.value > target:
            raise InconsistencyError("capped network exceeds the uncapped maximum")
        # the cut's capacity as a function of rho: constant part + free source arcs
        const = sum((c for l, c in pinned_caps.items() if l not in cut.source_left), Fraction(0))
        for (l, r), c in g.middle.items():
            if l in cut.source_left and r not in cut.source_right:
                const += c
        for r, c in g.sink_caps.items():
            if r in cut.source_right:
                const += c
        nxt = _cut_root(g, weights, free, cut.source_left, target - const)
        if nxt <= rho:
            raise InconsistencyError("Newton step did not increase the level")
        rho = nxt
    raise InconsistencyError("ratio search did not converge")


def min_ratio_max_flow(g: FlowNetwork, weights: Mapping) -> FlowAssignment:
    """Maximum flow minimizing ``max_l f(s,l) / weights[l]`` (lexicographically).

    Left vertices with zero weight carry no flow. After the minimal worst
    ratio is found, the vertices pinned at it are frozen and the ratio of
    the rest is minimized again, until every vertex is frozen. The result
    minimizes the decreasingly sorted vector of ratios lexicographically; in
    particular it equalizes ratios whenever that is feasible.
    """
    weights = {l: Fraction(weights.get(l, 0)) for l in g.source_caps}
    if any(w < 0 for w in weights.values()):
        raise InvalidInputError("ratio weights must be nonnegative")
    target = max_flow(g).value
    if target == 0:
        return max_flow(g.with_source_caps({l: Fraction(0) for l in g.source_caps}))
    if max_flow(_capped(g, weights, UNBOUNDED, {})).value != target:
        raise InconsistencyError("maximum flow needs vertices whose ratio weight is zero")

    free = [l for l in g.source_caps if weights[l] > 0]
    fixed: dict = {}
    while free:
        rho, _ = _min_feasible_level(g, weights, free, fixed, target)
        if rho == 0:
            for l in free:
                fixed[l] = Fraction(0)
            break
        capped = _capped(g, weights, rho, fixed)
        res = _Residual(capped)
        res.run()
        reach = res.reachable()
        pinned = [
            l for l in free
            if rho * weights[l] <= g.source_caps[l] and res.lidx[l] not in reach
        ]
        if not pinned:
            raise InconsistencyError("no vertex pinned at the minimal ratio")
        for l in pinned:
            fixed[l] = rho
        free = [l for l in free if l not in fixed]
    final = max_flow(_capped(g, weights, Fraction(0), fixed))
    if final.value != target:
        raise InconsistencyError("final ratio-capped flow is not maximum")
    return final


def flow_ratio(flow: FlowAssignment, weights: Mapping) -> Fraction:
    """``max_l f(s,l)/w_l`` over positive-weight vertices (0/0 taken as 0)."""
    best = Fraction(0)
    for l, x in flow.source.items():
        w = weights.get(l, 0)
        if w > 0:
            best = max(best, x / w)
        elif x > 0:
            return UNBOUNDED
    return best


# -- networks encoding the priceability axioms


def rank_priceability_network(profile: Profile, ranking: Ranking) -> FlowNetwork:
    """Transportation network of rank-priceability.

    Left vertices are support rankings (budget ``C(m,2)*R``), right vertices
    are output positions ``1..m`` (capacity ``m-i``); a ranking may send to
    position ``i`` at most its marginal utility there.
    """
    m = profile.m
    c = pairs_count(m)
    source = {r: c * w for r, w in profile.items()}
    sink = {i + 1: Fraction(m - i - 1) for i in range(m)}
    middle = {}
    order = ranking.order
    for r in profile:
        for i in range(m):
            u = positional_utility(r, order[i], frozenset(order[i:]))
            if u:
                middle[(r, i + 1)] = Fraction(u)
    return FlowNetwork(source, middle, sink)


def pair_priceability_network(profile: Profile, ranking: Ranking) -> FlowNetwork:
    """Network of pair-priceability: every output pair is sold for 1."""
    c = pairs_count(profile.m)
    source = {r: c * w for r, w in profile.items()}
    order = ranking.order
    pairs = [(order[i], order[j]) for i in range(len(order)) for j in range(i + 1, len(order))]
    sink = {p: Fraction(1) for p in pairs}
    middle = {}
    for r in profile:
        for x, y in pairs:
            if r.prefers(x, y):
                middle[(r, (x, y))] = Fraction(1)
    return FlowNetwork(source, middle, sink)
