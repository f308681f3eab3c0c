from __future__ import annotations

import math
import random
from fractions import Fraction as F
from itertools import combinations

import pytest

import oracles
from proprank import axioms
from proprank.axioms import (
    AxiomReport,
    bound_value,
    check_pareto,
    check_spjr,
    check_ujr,
    check_upjr,
    greedy_subprofile,
    spjr_coverage,
    verify_pair_priceability,
    verify_pair_scheme,
    verify_rank_priceability,
    verify_rank_scheme,
    worst_group_margin,
    xi,
)
from proprank.baselines import chamberlin_courant, prop1_instance
from proprank.core import Profile, Ranking, utility
from proprank.errors import CapacityError, InvalidInputError
from proprank.profile_io import gen_profile
from proprank.reproduce import example1, example4, example5
from proprank.rules import PaymentScheme, run_fb, run_psb, run_rmes


def _random_out(rng, m):
    order = list(range(m))
    rng.shuffle(order)
    return Ranking(tuple(order))


def _spjr_brute(profile, out):
    """Every nonempty subset at full weight, coverage by explicit pair sets."""
    target = oracles.pairs_of(out.order)
    support = profile.support()
    for k in range(1, len(support) + 1):
        for T in combinations(support, k):
            union = set().union(*(oracles.pairs_of(r.order) for r in T))
            need = math.floor(sum(profile[r] for r in T) * profile.pairs)
            if len(union & target) < need:
                return False
    return True


class TestReport:
    def test_witness_iff_violated(self):
        with pytest.raises(InvalidInputError):
            AxiomReport("uJR", True, {"x": 1})
        with pytest.raises(InvalidInputError):
            AxiomReport("uJR", False)

    def test_describe_uses_names(self):
        p, names, out = example1()
        pareto = check_pareto(p, out.inverse()).describe(names)
        assert pareto.startswith("Pareto: violated") and "pair=(x1,x2)" in pareto
        r = Ranking((0, 1, 2))
        text = check_upjr(Profile.single(r), r.inverse()).describe(["a", "b", "c"])
        assert text.startswith("uPJR: violated") and "ranking=a>b>c" in text
        assert "ranking=x1>x2>x3" in str(check_upjr(Profile.single(r), r.inverse()))


class TestUJR:
    def test_without_inverse(self):
        p = Profile.single((0, 1, 2, 3))
        assert check_ujr(p, Ranking((3, 1, 2, 0)))

    def test_prop1(self):
        p, r1 = prop1_instance(5)
        report = check_ujr(p, r1.inverse())
        assert not report and report.witness["ranking"] == r1
        assert report.witness["weight"] == F(1, 10)

    def test_chamberlin_courant(self, profiles):
        for p in profiles[:100]:
            assert check_ujr(p, chamberlin_courant(p).ranking)


class TestUPJR:
    def test_example1(self):
        p, _, out = example1()
        assert check_upjr(p, out)

    def test_single_ranking_equality(self):
        r = Ranking((1, 0, 2, 3))
        report = check_upjr(Profile.single(r), r)
        assert report and report.value == 0

    def test_witness_is_genuine(self):
        r = Ranking((0, 1, 2, 3))
        p = Profile(4, {r: F(1, 2), r.inverse(): F(1, 2)})
        report = check_upjr(p, r)
        assert not report
        w = report.witness
        assert w["ranking"] == r.inverse()
        assert utility(w["ranking"], r) == w["utility"] == 0 and w["required"] == 3


class TestSPJR:
    def test_example4_printed_psb(self):
        p, _, group, printed_psb, _ = example4()
        report = check_spjr(p, printed_psb)
        assert not report
        assert spjr_coverage(p, printed_psb, group) == (269, 270)
        w = report.witness
        assert spjr_coverage(p, printed_psb, w["subset"]) == (w["coverage"], w["required"])
        assert w["coverage"] < w["required"]

    def test_matches_brute_force(self, profiles):
        rng = random.Random(3)
        for p in profiles[:120]:
            out = _random_out(rng, p.m)
            assert bool(check_spjr(p, out)) == _spjr_brute(p, out)

    def test_singletons_reproduce_upjr(self, profiles):
        rng = random.Random(4)
        for p in profiles[:120]:
            out = _random_out(rng, p.m)
            singles = all(cov >= need for cov, need in (spjr_coverage(p, out, [r]) for r in p))
            assert singles == bool(check_upjr(p, out))

    def test_capacity(self):
        p = gen_profile("ic", 6, 17, 0)
        with pytest.raises(CapacityError):
            check_spjr(p, Ranking.identity(6))
        assert check_spjr(p, Ranking.identity(6), cap=17) is not None

    def test_unknown_subset_member(self):
        p = Profile.single((0, 1, 2))
        with pytest.raises(InvalidInputError):
            spjr_coverage(p, Ranking((0, 1, 2)), [Ranking((2, 1, 0))])

    def test_fb_outputs(self, profiles):
        for p in profiles[:60]:
            assert check_spjr(p, run_fb(p)[0])


class TestPriceability:
    def test_example1(self):
        p, _, out = example1()
        report = verify_rank_priceability(p, out)
        assert not report
        assert report.witness == {"max_payment": 7, "leftover": 3}

    def test_single_ranking(self):
        r = Ranking((2, 0, 1, 3))
        report = verify_rank_priceability(Profile.single(r), r)
        assert report and report.value == 6
        assert verify_rank_scheme(Profile.single(r), r, report.certificate)

    def test_certificates_verify(self, profiles):
        rng = random.Random(6)
        for p in profiles[:80]:
            for out in (run_psb(p)[0], _random_out(rng, p.m)):
                rank = verify_rank_priceability(p, out)
                if rank:
                    assert verify_rank_scheme(p, out, rank.certificate)
                pair = verify_pair_priceability(p, out)
                if pair:
                    assert verify_pair_scheme(p, out, pair.certificate)
                else:
                    pair_w = pair.witness
                    assert pair_w["leftover"] == p.pairs - pair_w["max_payment"] >= 1

    def test_example5_fb_pair_priceable(self):
        p = example5()
        assert verify_pair_priceability(p, run_fb(p)[0])

    def test_pareto_violation_blocks_pair_priceability(self):
        r = Ranking((0, 1, 2, 3))
        p = Profile(4, {r: F(1, 2), Ranking((1, 0, 2, 3)): F(1, 2)})
        out = Ranking((0, 1, 3, 2))
        assert not check_pareto(p, out)
        report = verify_pair_priceability(p, out)
        assert not report and report.witness["unpaid_pair"] == (3, 2)

    def test_rank_scheme_conditions(self):
        r = Ranking((0, 1, 2))
        p = Profile.single(r)
        over_utility = PaymentScheme(by_candidate={(r, 2): F(1)})
        assert verify_rank_scheme(p, r, over_utility).witness["condition"] == 1
        slot = PaymentScheme(by_candidate={(r, 0): F(2), (r, 1): F(1)})
        assert verify_rank_scheme(p, r, slot)
        short = PaymentScheme(by_candidate={(r, 0): F(2)})
        assert verify_rank_scheme(p, r, short).witness["condition"] == 4
        q = Profile(3, {r: F(1, 6), r.inverse(): F(5, 6)})
        rich = PaymentScheme(by_candidate={(r, 0): F(2)})
        assert verify_rank_scheme(q, r, rich).witness["condition"] == 2
        two = Profile(3, {r: F(1, 2), Ranking((0, 2, 1)): F(1, 2)})
        crowded = PaymentScheme(by_candidate={(r, 0): F(3, 2), (Ranking((0, 2, 1)), 0): F(3, 2)})
        assert verify_rank_scheme(two, r, crowded).witness["condition"] == 3

    def test_pair_scheme_conditions(self):
        r = Ranking((0, 1, 2))
        p = Profile.single(r)
        wrong_way = PaymentScheme(by_pair={(r, (1, 0)): F(1)})
        assert verify_pair_scheme(p, r, wrong_way).witness["condition"] == 1
        two = Profile(3, {r: F(1, 2), Ranking((0, 2, 1)): F(1, 2)})
        double = PaymentScheme(by_pair={(r, (0, 1)): F(1), (Ranking((0, 2, 1)), (0, 1)): F(1)})
        assert verify_pair_scheme(two, r, double).witness["condition"] == 3
        full = PaymentScheme(by_pair={(r, pair): F(1) for pair in [(0, 1), (0, 2), (1, 2)]})
        assert verify_pair_scheme(p, r, full)


class TestPareto:
    def test_inverse_of_single_ranking(self):
        r = Ranking((0, 1, 2, 3))
        report = check_pareto(Profile.single(r), r.inverse())
        assert not report and report.witness["count"] == 6

    def test_rule_outputs(self, profiles):
        for p in profiles[:100]:
            assert check_pareto(p, run_psb(p)[0]) and check_pareto(p, run_fb(p)[0])


def test_implication_chain(profiles):
    rng = random.Random(12)
    for p in profiles[:120]:
        for out in (_random_out(rng, p.m), run_rmes(p)[0], run_psb(p)[0].inverse()):
            rank = bool(verify_rank_priceability(p, out))
            pair = bool(verify_pair_priceability(p, out))
            spjr = bool(check_spjr(p, out))
            upjr = bool(check_upjr(p, out))
            ujr = bool(check_ujr(p, out))
            assert not rank or upjr
            assert not pair or spjr
            assert not spjr or upjr
            assert not upjr or ujr


class TestBounds:
    def test_xi(self):
        assert [xi(m) for m in (4, 5, 6, 7, 8)] == [3, 6, 10, 15, 15]

    def test_branches(self):
        m, c, x = 6, 15, xi(6)
        switch = (x + F(1, 2)) / c
        assert bound_value(axioms.THM4_RMES, m, switch) == c * switch / 4 - F(1, 8)
        assert bound_value(axioms.THM4_RMES, m, switch, branch=2) == F(x * (x + 1), 4 * (2 * x + 1)) * 2
        assert bound_value(axioms.THM2_PSB, m, F(1)) == F(15, 4) - F(3, 16)
        with pytest.raises(InvalidInputError):
            bound_value("nope", m, F(1))

    def test_single_ranking(self):
        r = Ranking((0, 1, 2, 3, 4))
        curve = worst_group_margin(Profile.single(r), r, axioms.THM2_PSB)
        assert curve.min_margin == 10 - F(10, 4) + F(3, 16)
        assert curve.min_margin > 0

    def test_full_profile_row_is_welfare(self, profiles):
        for p in profiles[:50]:
            out, _ = run_psb(p)
            curve = worst_group_margin(p, out, axioms.THM2_PSB)
            full = [pt for pt in curve.breakpoints if pt.alpha == 1]
            welfare = sum((w * utility(r, out) for r, w in p.items()), F(0))
            assert full[0].min_avg_utility == welfare
            assert full[0].margin == welfare - F(p.pairs, 4) + F(3, 16)

    def test_switch_rows(self):
        p = gen_profile("ic", 6, 6, 1)
        out, _ = run_rmes(p)
        curve = worst_group_margin(p, out, axioms.THM4_RMES)
        switch = (xi(6) + F(1, 2)) / 15
        rows = [pt for pt in curve.breakpoints if pt.alpha == switch]
        assert len(rows) == 2 and rows[1].note == "switch"
        assert rows[0].bound_value < rows[1].bound_value
        assert curve.breakpoints[0].note == "limit"

    def test_rmes_needs_m4(self):
        p = Profile.single((0, 1, 2))
        with pytest.raises(InvalidInputError):
            worst_group_margin(p, Ranking((0, 1, 2)), axioms.THM4_RMES)

    def test_greedy_subprofile(self):
        p, _, out = example1()
        s = greedy_subprofile(p, out, F(1, 4))
        assert s.size == F(1, 4)
        assert s.average_utility(out) == oracles.min_avg_exhaustive(p, out, F(1, 4))
        with pytest.raises(InvalidInputError):
            greedy_subprofile(p, out, F(0))

    def test_grid_sweep_m6(self, profiles):
        """Every alpha = k/720 is at least the reported minimum margin."""
        cases = [p for p in profiles if p.m == 6][:12]
        for p in cases:
            for rule, bound in ((run_psb, axioms.THM2_PSB), (run_rmes, axioms.THM4_RMES),
                                (run_fb, axioms.THM6_FB)):
                out, _ = rule(p)
                curve = worst_group_margin(p, out, bound)
                assert curve.min_margin >= 0
                items = sorted((utility(r, out), w) for r, w in p.items())
                for k in range(1, 721):
                    alpha = F(k, 720)
                    total, left = F(0), alpha
                    for u, w in items:
                        part = min(w, left)
                        total += part * u
                        left -= part
                    margin = total / alpha - bound_value(bound, 6, alpha)
                    assert margin >= curve.min_margin
