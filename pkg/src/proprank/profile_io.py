"""Profile text format, random profile generators and flat run records.

Profile files are line oriented::

    # comments run to the end of the line
    m 5
    candidates a b c d e          (optional; default names x1..xm)
    ranking 3/5: a > b > c > d > e
    ranking 0.4: d > e > a > c > b

Inside a ranking line a token is a declared name or, failing that, a
0-based candidate index. Repeated rankings are merged by adding weights.
"""

from __future__ import annotations

import hashlib
import re
from fractions import Fraction
from math import factorial

import numpy as np

from proprank.core import Profile, Ranking
from proprank.errors import InvalidInputError, ProfileParseError

WEIGHT_DENOMINATOR = 2**20
MODELS = ("ic", "mallows", "two-bloc")

_RATIONAL = re.compile(r"-?\d+(/\d+)?|-?\d*\.\d+")
_RANKING_LINE = re.compile(r"ranking\s+(\S+)\s*:\s*(.*)")


def default_names(m: int) -> list[str]:
    return [f"x{i + 1}" for i in range(m)]


def parse_rational(text: str, lineno: int | None = None) -> Fraction:
    """Exact value of ``p``, ``p/q`` or a decimal literal such as ``0.6``."""
    if not _RATIONAL.fullmatch(text):
        raise ProfileParseError(f"malformed rational {text!r}", lineno)
    try:
        return Fraction(text)
    except ZeroDivisionError:
        raise ProfileParseError(f"zero denominator in {text!r}", lineno) from None


class ProfileDocument:
    """A parsed profile file: the profile plus its candidate names."""

    def __init__(self, profile: Profile, names: list[str]):
        self.profile = profile
        self.names = names

    @property
    def m(self) -> int:
        return self.profile.m

    def show(self, ranking: Ranking, sep: str = " > ") -> str:
        return sep.join(self.names[c] for c in ranking.order)


def parse_document(text: str) -> ProfileDocument:
    m = None
    names = None
    entries: dict[Ranking, Fraction] = {}
    last = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        last = lineno
        head = line.split(None, 1)[0]
        if head == "m":
            if m is not None:
                raise ProfileParseError("duplicate 'm' header", lineno)
            parts = line.split()
            if len(parts) != 2 or not parts[1].isdigit() or int(parts[1]) < 1:
                raise ProfileParseError(f"expected 'm <positive int>', got {line!r}", lineno)
            m = int(parts[1])
        elif head == "candidates":
            if m is None:
                raise ProfileParseError("'candidates' before the 'm' header", lineno)
            if names is not None or entries:
                raise ProfileParseError("'candidates' must come once, before any ranking", lineno)
            names = line.split()[1:]
            if len(names) != m:
                raise ProfileParseError(f"{len(names)} candidate names for m={m}", lineno)
            if len(set(names)) != m:
                raise ProfileParseError("candidate names must be distinct", lineno)
            if any(n.isdigit() or n in (">", ":") for n in names):
                raise ProfileParseError("candidate names must not be integers or '>'", lineno)
        elif head == "ranking":
            if m is None:
                raise ProfileParseError("'ranking' before the 'm' header", lineno)
            if names is None:
                names = default_names(m)
            match = _RANKING_LINE.fullmatch(line)
            if not match:
                raise ProfileParseError(f"expected 'ranking <weight>: a > b > ...', got {line!r}", lineno)
            weight = parse_rational(match.group(1), lineno)
            if weight < 0:
                raise ProfileParseError(f"negative weight {weight}", lineno)
            ranking = parse_order(match.group(2), names, lineno)
            entries[ranking] = entries.get(ranking, Fraction(0)) + weight
        else:
            raise ProfileParseError(f"unknown directive {head!r}", lineno)
    if m is None:
        raise ProfileParseError("missing 'm' header", last or None)
    if not entries:
        raise ProfileParseError("no ranking lines", last or None)
    total = sum(entries.values(), Fraction(0))
    if total != 1:
        raise ProfileParseError(f"weights sum to {total}, expected 1", last)
    return ProfileDocument(Profile(m, entries), names)


def parse_order(body: str, names: list[str], lineno: int | None = None) -> Ranking:
    """Resolve ``a > b > c`` against candidate names (or 0-based indices)."""
    index = {n: i for i, n in enumerate(names)}
    tokens = [t.strip() for t in body.split(">")]
    order = []
    for t in tokens:
        if t in index:
            order.append(index[t])
        elif t.isdigit() and int(t) < len(names):
            order.append(int(t))
        else:
            raise ProfileParseError(f"unknown candidate {t!r}", lineno)
    if sorted(order) != list(range(len(names))):
        raise ProfileParseError(
            f"not a permutation of the {len(names)} candidates: {body.strip()!r}", lineno
        )
    return Ranking(tuple(order))


def parse_profile(text: str) -> Profile:
    """Parse profile text into a :class:`Profile`; errors carry line numbers."""
    return parse_document(text).profile


def render_profile(profile: Profile, names: list[str] | None = None) -> str:
    """Inverse of :func:`parse_profile` (weights written as ``p/q``)."""
    names = names or default_names(profile.m)
    lines = [f"m {profile.m}"]
    if names != default_names(profile.m):
        lines.append("candidates " + " ".join(names))
    for r, w in profile.items():
        lines.append(f"ranking {w}: " + " > ".join(names[c] for c in r.order))
    return "\n".join(lines) + "\n"


def digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


# -- random profiles


def _unrank(index: int, m: int) -> tuple[int, ...]:
    """The ``index``-th permutation of ``0..m-1`` in lexicographic order."""
    pool = list(range(m))
    out = []
    for k in range(m, 0, -1):
        q, index = divmod(index, factorial(k - 1))
        out.append(pool.pop(q))
    return tuple(out)


def _distinct_rankings(rng, m: int, count: int) -> list[tuple[int, ...]]:
    total = factorial(m)
    if count > total:
        raise InvalidInputError(f"support {count} exceeds the {total} rankings of {m} candidates")
    if total <= 40320:
        picks = rng.choice(total, size=count, replace=False)
        return [_unrank(int(i), m) for i in picks]
    seen: dict[tuple, None] = {}
    while len(seen) < count:
        seen.setdefault(tuple(int(c) for c in rng.permutation(m)), None)
    return list(seen)


def _composition(rng, parts: int, total: Fraction = Fraction(1)) -> list[Fraction]:
    """``parts`` positive rationals summing to ``total``: multiples of ``total / 2**20``."""
    if not 1 <= parts <= WEIGHT_DENOMINATOR:
        raise InvalidInputError(f"cannot split a weight into {parts} positive parts")
    n = WEIGHT_DENOMINATOR
    cuts = np.sort(rng.choice(n - 1, size=parts - 1, replace=False) + 1) if parts > 1 else []
    edges = [0, *(int(c) for c in cuts), n]
    return [total * Fraction(b - a, n) for a, b in zip(edges, edges[1:])]


def _mallows_sample(rng, center, phi: float) -> tuple[int, ...]:
    """Repeated insertion: item ``i`` of the center lands ``d`` slots early with prob ~ phi^d."""
    out: list[int] = []
    for i, c in enumerate(center):
        if phi == 0:
            slot = i
        else:
            probs = np.array([phi ** (i - j) for j in range(i + 1)])
            slot = int(rng.choice(i + 1, p=probs / probs.sum()))
        out.insert(slot, c)
    return tuple(out)


def gen_profile(model: str, m: int, support: int, seed: int, **params) -> Profile:
    """Seeded random profile.

    ``ic``: ``support`` distinct uniform rankings. ``mallows``: ``support``
    draws around a random center with dispersion ``phi`` (default 0.5),
    duplicates merged. ``two-bloc``: a random ranking and its inverse
    splitting ``1 - noise`` as ``split : 1 - split`` (defaults 1/2 and
    1/8), plus ``support - 2`` distinct noise rankings sharing ``noise``.
    Weights are multiples of ``2**-20`` (of the noise mass for noise rankings).
    """
    if m < 1 or support < 1:
        raise InvalidInputError("m and support must be positive")
    rng = np.random.default_rng(seed)
    if model == "ic":
        rankings = _distinct_rankings(rng, m, support)
        return Profile(m, zip(rankings, _composition(rng, support)))
    if model == "mallows":
        phi = float(params.get("phi", 0.5))
        if not 0 <= phi <= 1:
            raise InvalidInputError("phi must lie in [0, 1]")
        center = tuple(int(c) for c in rng.permutation(m))
        draws = [_mallows_sample(rng, center, phi) for _ in range(support)]
        return Profile(m, zip(draws, _composition(rng, support)))
    if model == "two-bloc":
        split = Fraction(params.get("split", Fraction(1, 2)))
        noise = Fraction(params.get("noise", Fraction(1, 8)))
        if not 0 < split < 1 or not 0 <= noise < 1:
            raise InvalidInputError("two-bloc needs 0 < split < 1 and 0 <= noise < 1")
        if m < 2 or support > factorial(m):
            raise InvalidInputError(f"support {support} is not achievable with m={m}")
        base = tuple(int(c) for c in rng.permutation(m))
        if support == 1:
            return Profile(m, {base: Fraction(1)})
        inverse = base[::-1]
        extra = support - 2
        if extra == 0 or noise == 0:
            return Profile(m, {base: split, inverse: 1 - split})
        pool = [r for r in _distinct_rankings(rng, m, min(factorial(m), support))
                if r not in (base, inverse)][:extra]
        body = 1 - noise
        entries = [(base, body * split), (inverse, body * (1 - split))]
        entries += zip(pool, _composition(rng, len(pool), noise))
        return Profile(m, entries)
    raise InvalidInputError(f"unknown model {model!r}; expected one of {', '.join(MODELS)}")


# -- flat key=value records


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if v is None:
        return "-"
    return str(v)


def render_record(items) -> str:
    """One ``key=value`` line per item, in the given order."""
    lines = []
    for key, value in items:
        if "=" in key or "\n" in key:
            raise InvalidInputError(f"bad record key {key!r}")
        lines.append(f"{key}={format_value(value)}")
    return "\n".join(lines) + "\n"


def parse_record(text: str) -> list[tuple[str, str]]:
    return [tuple(line.split("=", 1)) for line in text.splitlines() if line]
