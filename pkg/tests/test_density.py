import json
from fractions import Fraction
from math import gcd

import pytest

from taulab import factor
from taulab.density import (
    DELTA_EXCEPTIONAL_PRIMES,
    DensityQuery,
    chebotarev_sample,
    class_counts,
    closed_form_density,
    det_constrained_group_order,
    enumerate_density,
    enumerate_density_bruteforce,
    hensel_lift_count,
    lift_factor,
    psi_insoluble_mod_q_squared,
    sample_level_one_matches,
    unit_power_group_order,
    unit_power_subgroup,
)
from taulab.errors import BudgetExceededError


class TestQueryValidation:
    def test_q_must_be_odd_prime(self):
        with pytest.raises(ValueError):
            DensityQuery(4, 7)
        with pytest.raises(ValueError):
            DensityQuery(2, 7)

    def test_ell_must_be_prime(self):
        with pytest.raises(ValueError):
            DensityQuery(3, 8)

    def test_weight_must_be_even(self):
        with pytest.raises(ValueError):
            DensityQuery(3, 7, weight=11)


class TestLevelOne:
    def test_q3_ell7(self):
        r = enumerate_density(DensityQuery(3, 7, 1, 12))
        assert r.match_count == 336
        assert r.group_order == 2016
        assert r.delta == Fraction(1, 6)
        assert r.agrees
        assert r.class_tally["splitSemisimple"] == 336
        assert sum(r.class_tally.values()) == r.match_count

    def test_q3_ell3(self):
        r = enumerate_density(DensityQuery(3, 3, 1, 12))
        assert r.delta == Fraction(3, 8)
        assert r.agrees
        assert r.class_tally["central"] + r.class_tally["nonsemisimple"] == 18

    def test_q5_ell7_vanishes(self):
        r = enumerate_density(DensityQuery(5, 7, 1, 12))
        assert r.match_count == 0
        assert r.agrees

    def test_q3_ell5_nonsplit(self):
        r = enumerate_density(DensityQuery(3, 5, 1, 12))
        assert r.class_tally["nonsplitSemisimple"] == 80
        assert r.delta == Fraction(80, 480) == Fraction(1, 6)

    def test_class_tally_formulas(self):
        # per-type totals follow the split/nonsplit/ramified class counts
        for q in (3, 5, 7):
            for ell in (3, 5, 7, 11, 13):
                r = enumerate_density(DensityQuery(q, ell, 1, 12))
                d = gcd(ell - 1, 11)
                tally = r.class_tally
                if ell % q == 1:
                    assert tally["splitSemisimple"] == (q - 1) * (ell - 1) // (2 * d) * (ell**2 + ell)
                    assert tally["central"] == tally["nonsemisimple"] == tally["nonsplitSemisimple"] == 0
                elif ell % q == q - 1:
                    assert tally["nonsplitSemisimple"] == (q - 1) * (ell - 1) // (2 * d) * (ell**2 - ell)
                    assert tally["central"] == tally["nonsemisimple"] == tally["splitSemisimple"] == 0
                elif ell == q:
                    assert tally["central"] == (q - 1) // d
                    assert tally["nonsemisimple"] == (q - 1) // d * (q**2 - 1)
                    assert tally["splitSemisimple"] == tally["nonsplitSemisimple"] == 0
                else:
                    assert r.match_count == 0

    def test_mod2_cases(self):
        r = enumerate_density(DensityQuery(3, 2, 1, 12))
        assert r.match_count == 2 and r.group_order == 6 and r.delta == Fraction(1, 3)
        assert r.agrees
        for q in (5, 7, 11):
            assert enumerate_density(DensityQuery(q, 2, 1, 12)).match_count == 0

    def test_closed_form_grid(self):
        for q in (3, 5, 7):
            for ell in (2, 3, 5, 7, 11, 13):
                r = enumerate_density(DensityQuery(q, ell, 1, 12))
                assert r.agrees, (q, ell, r.delta, r.closed_form)

    def test_brute_force_oracle(self):
        for q, ell in [(3, 2), (3, 3), (3, 5), (3, 7), (5, 3), (5, 5), (5, 7), (7, 5), (7, 7)]:
            query = DensityQuery(q, ell, 1, 12)
            assert enumerate_density(query).match_count == enumerate_density_bruteforce(query)

    def test_weight_independence_at_level_one(self):
        # the unit-power index cancels in the ratio
        for k in (2, 12, 16, 26):
            r = enumerate_density(DensityQuery(3, 7, 1, k))
            assert r.delta == Fraction(1, 6)

    def test_class_counts_helper(self):
        tally = class_counts(DensityQuery(3, 7, 1, 12))
        assert tally["splitSemisimple"] == 336
        with pytest.raises(ValueError):
            class_counts(DensityQuery(3, 7, 2, 12))


class TestDetSubgroup:
    def test_power_subgroup_size(self):
        for ell in (3, 5, 7, 11, 13):
            d = gcd(ell - 1, 11)
            assert len(unit_power_subgroup(ell, 11)) == (ell - 1) // d

    def test_square_twist_count(self):
        # for any unit t, the a with a^2 t in the power subgroup number (l-1)/d
        for ell in (5, 7, 11, 13):
            subgroup = unit_power_subgroup(ell, 11)
            d = gcd(ell - 1, 11)
            for t in range(1, ell):
                hits = sum(1 for a in range(1, ell) if (a * a * t) % ell in subgroup)
                assert hits == (ell - 1) // d

    def test_group_orders_match_when_ell_coprime_to_weight_shift(self):
        assert det_constrained_group_order(5, 2, 12) == unit_power_group_order(5, 2, 12)
        assert det_constrained_group_order(7, 2, 12) == unit_power_group_order(7, 2, 12)
        # 11 divides k-1 = 11: the unit-power subgroup shrinks above level 1
        assert det_constrained_group_order(11, 2, 12) < unit_power_group_order(11, 2, 12)


class TestLifts:
    def test_lift_level_two_against_bruteforce(self):
        for q, ell in [(3, 3), (3, 5), (5, 5)]:
            query = DensityQuery(q, ell, 2, 12)
            assert enumerate_density(query).match_count == enumerate_density_bruteforce(query)

    def test_lift_ratio_one_over_ell(self):
        for q, ell in [(3, 5), (3, 7)]:
            report = lift_factor(q, ell, 12)
            assert report.ratio == Fraction(1, ell)

    def test_lift_at_q_vanishes_above_level_one(self):
        report = lift_factor(5, 5, 12)
        assert report.base.delta == Fraction(5, 24)
        assert report.lifted.match_count == 0
        assert report.ratio == 0

    def test_zero_density_marker(self):
        report = lift_factor(5, 7, 12)
        assert report.base.match_count == 0
        assert report.ratio is None

    def test_hensel_lift_counts(self):
        for q, ell in [(3, 5), (3, 7)]:
            for base in sample_level_one_matches(q, ell):
                assert hensel_lift_count(q, ell, base) == ell**3

    def test_hensel_rejects_non_match(self):
        with pytest.raises(ValueError):
            hensel_lift_count(3, 7, (1, 0, 0, 1))

    def test_insolubility_mod_q_squared(self):
        assert psi_insoluble_mod_q_squared(5)
        assert psi_insoluble_mod_q_squared(7)
        assert not psi_insoluble_mod_q_squared(3)

    def test_budget_error_carries_requirement(self):
        with pytest.raises(BudgetExceededError) as exc:
            enumerate_density(DensityQuery(5, 11, 2, 12))
        assert exc.value.needed == 11**8
        report = enumerate_density(DensityQuery(5, 11, 2, 12), budget=3 * 10**8)
        assert report.delta == Fraction(1, 55)

    def test_worker_determinism(self):
        q = DensityQuery(3, 5, 2, 12)
        assert (
            enumerate_density(q, workers=1).match_count
            == enumerate_density(q, workers=2).match_count
            == enumerate_density(q, workers=3).match_count
        )


class TestReports:
    def test_json_schema_keys(self):
        r = enumerate_density(DensityQuery(3, 7, 1, 12))
        payload = json.loads(r.to_json())
        assert set(payload) >= {"query", "matchCount", "groupOrder", "deltaExact", "closedForm", "agrees"}
        assert payload["deltaExact"] == "1/6"
        assert payload["classTally"]["splitSemisimple"] == 336

    def test_exceptional_flag(self):
        assert enumerate_density(DensityQuery(3, 7, 1, 12)).exceptional
        assert not enumerate_density(DensityQuery(5, 11, 1, 12)).exceptional
        assert DELTA_EXCEPTIONAL_PRIMES == {2, 3, 5, 7, 23, 691}


class TestChebotarev:
    def test_requires_minimum_range(self, delta):
        with pytest.raises(ValueError):
            chebotarev_sample(delta, 3, 11, 100)

    def test_nonexceptional_band(self, delta_warm_small):
        sample = chebotarev_sample(delta_warm_small, 3, 11, 10**4)
        assert sample.target == Fraction(1, 12)
        assert not sample.exceptional
        assert abs(sample.frequency - 1 / 12) <= 5 * sample.sigma

    def test_exceptional_flagged_and_zero(self, delta_warm_small):
        for d in (5, 7):
            sample = chebotarev_sample(delta_warm_small, 3, d, 10**4)
            assert sample.exceptional
            assert sample.hits == 0  # the mod-5 and mod-7 coefficient congruences forbid hits

    def test_vanishing_target(self, delta_warm_small):
        sample = chebotarev_sample(delta_warm_small, 5, 7, 10**4)
        assert sample.target == 0
        assert sample.frequency < 0.001

    def test_json_payload(self, delta_warm_small):
        sample = chebotarev_sample(delta_warm_small, 5, 11, 10**4)
        payload = sample.to_json_dict()
        assert payload["empirical"]["total"] == sample.total_primes
        assert payload["target"] == "1/5"

    def test_prime_power_modulus_accepted(self, delta_warm_small):
        sample = chebotarev_sample(delta_warm_small, 3, 121, 10**4)
        assert sample.target == closed_form_density(3, 11, 2)
        with pytest.raises(ValueError):
            chebotarev_sample(delta_warm_small, 3, 15, 10**4)
