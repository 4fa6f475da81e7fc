import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darwinism import (
    DeficitSpec,
    DeficitUnreachableError,
    EnvironmentSpec,
    SpecValidationError,
    avg_holevo_exact,
    binary_entropy,
    crossing_fragment_size,
    find_fragment_size,
    hypergeometric_pmf,
    info_curve,
    mc_avg_holevo,
    p_all_bad,
    redundancy_avg,
    redundancy_max,
    redundancy_report,
    stirling_fragment_size,
)
from darwinism import oracle
from darwinism.fragments import CurvePoint, InfoCurve, min_good_spins, split_seed


def perfect(ng, nb, p0=0.5):
    return EnvironmentSpec(ng, nb, 0.0, 1.0, p0)


class TestPAllBad:
    def test_worked_instance(self):
        # (4/6)(3/5) = 0.4
        assert p_all_bad(perfect(2, 4), 2) == pytest.approx(0.4, abs=1e-12)

    def test_fragment_larger_than_bad_pool(self):
        assert p_all_bad(perfect(2, 4), 5) == 0.0

    def test_empty_fragment(self):
        assert p_all_bad(perfect(2, 4), 0) == 1.0

    def test_identical_to_all_bad_pmf(self):
        for ng, nb in [(2, 4), (5, 7), (4, 96), (1000, 10**6)]:
            s = perfect(ng, nb)
            for f in (0, 1, 2, min(nb, 50)):
                assert p_all_bad(s, f) == hypergeometric_pmf(s, f, f)

    def test_telescoping_product(self):
        s = perfect(3, 9)
        for f in range(0, 10):
            want = 1.0
            for j in range(f):
                want *= (9 - j) / (12 - j)
            assert p_all_bad(s, f) == pytest.approx(want, abs=1e-13)


class TestAvgHolevoExact:
    def test_worked_instance(self):
        assert avg_holevo_exact(perfect(2, 4), 2) == pytest.approx(0.6, abs=1e-12)

    def test_empty_fragment(self):
        assert avg_holevo_exact(perfect(2, 4), 0) == 0.0

    def test_perfect_model_identity(self):
        for p0 in (0.5, 0.3):
            s = perfect(20, 30, p0)
            h_s = binary_entropy(p0)
            for f in range(0, 51):
                want = h_s * (1.0 - p_all_bad(s, f))
                assert avg_holevo_exact(s, f) == pytest.approx(want, abs=1e-12)

    def test_matches_monte_carlo_everywhere(self):
        s = EnvironmentSpec(50, 50, 0.2, 1.0, 0.5)
        for f in range(0, 101):
            exact = avg_holevo_exact(s, f)
            est = mc_avg_holevo(s, f, 100_000, split_seed(123, f))
            # 6 sigma: the per-composition distribution is heavy tailed near
            # saturation, where the sample stderr underestimates; 1e-9 bits
            # is the saturation floor
            assert abs(est.value - exact) <= max(6 * est.stderr, 1e-9), f

    @settings(max_examples=60, deadline=None)
    @given(
        ng=st.integers(min_value=0, max_value=25),
        nb=st.integers(min_value=0, max_value=25),
        g2g=st.sampled_from([0.0, 0.2, 0.6, 1.0]),
        g2b=st.sampled_from([0.4, 0.9, 1.0]),
        p0=st.sampled_from([0.5, 0.3]),
    )
    def test_monotone_in_fragment_size(self, ng, nb, g2g, g2b, p0):
        if ng + nb == 0:
            return
        s = EnvironmentSpec(ng, nb, g2g, g2b, p0)
        values = [avg_holevo_exact(s, f) for f in range(0, s.n_total + 1)]
        for a, b in zip(values, values[1:]):
            assert b >= a - 1e-12


class TestFindFragmentSize:
    def test_worked_instance(self):
        assert find_fragment_size(perfect(2, 4), DeficitSpec(0.1)) == 4

    def test_unreachable_without_good_spins(self):
        with pytest.raises(DeficitUnreachableError):
            find_fragment_size(perfect(0, 8), DeficitSpec(0.5))

    def test_exact_value_against_stirling_scale(self):
        # exact search gives 44; the Stirling form 96*ln(10)/4 = 55.26 sits
        # ~26% above it at this small good-spin count
        s = perfect(4, 96)
        d = DeficitSpec(0.1)
        assert find_fragment_size(s, d) == 44
        ratio = 44 / stirling_fragment_size(s, d)
        assert 0.75 < ratio < 0.85

    def test_deficit_one_returns_single_spin(self):
        assert find_fragment_size(perfect(3, 5), DeficitSpec(1.0)) == 1

    def test_pointer_probability_does_not_shift_perfect_model(self):
        for p0 in (0.5, 0.3, 0.9):
            assert find_fragment_size(perfect(2, 4, p0), DeficitSpec(0.1)) == 4

    def test_crossing_interpolation_brackets_integer(self):
        s = perfect(4, 96)
        d = DeficitSpec(0.1)
        f = find_fragment_size(s, d)
        x = crossing_fragment_size(s, d)
        assert f - 1 <= x <= f


class TestRedundancyAvg:
    def test_worked_instance(self):
        assert redundancy_avg(perfect(2, 4), DeficitSpec(0.1)) == 1.5

    def test_deficit_one_counts_whole_environment(self):
        assert redundancy_avg(EnvironmentSpec(3, 7, 0.4, 0.9, 0.5), DeficitSpec(1.0)) == 10.0

    def test_dilute_environment_approaches_good_spin_asymptote(self):
        s = perfect(10, 990)
        d = DeficitSpec(math.exp(-2))
        assert find_fragment_size(s, d) == 181
        r = redundancy_avg(s, d)
        assert r == pytest.approx(1000 / 181, rel=1e-12)
        # asymptote n_good / ln(1/delta) = 5; finite-size ratio stays modest
        assert 1.0 < r * math.log(1 / d.delta) / 10 < 1.25


class TestRedundancyMax:
    def test_perfect_model_counts_good_spins(self):
        for delta in (0.01, 0.1, 0.5, 0.99):
            for nb in (0, 4, 1000):
                assert redundancy_max(perfect(2, nb) if nb else EnvironmentSpec(2, 0, 0.0, 1.0, 0.5), DeficitSpec(delta)) == 2

    def test_two_good_spins_per_fragment(self):
        s = EnvironmentSpec(50, 50, 0.2, 1.0, 0.5)
        d = DeficitSpec(0.1)
        # k=1: holevo(0.2) = 0.8505 < 0.9; k=2: holevo(0.04) = 0.9710 >= 0.9
        assert min_good_spins(s, d) == 2
        assert redundancy_max(s, d) == 25
        # continuous counterpart ln(delta)/ln(gamma2) = 1.43 rounds up to it
        assert math.ceil(math.log(d.delta) / math.log(s.gamma2_good)) == 2

    def test_deficit_one_jumps_to_whole_environment(self):
        assert redundancy_max(perfect(2, 4), DeficitSpec(1.0)) == 6

    def test_unreachable_when_records_are_trivial(self):
        with pytest.raises(DeficitUnreachableError):
            redundancy_max(EnvironmentSpec(5, 3, 1.0, 1.0, 0.5), DeficitSpec(0.5))


class TestMonteCarlo:
    def test_deterministic_given_seed(self):
        s = EnvironmentSpec(5, 7, 0.3, 0.8, 0.5)
        a = mc_avg_holevo(s, 4, 5000, seed=99)
        b = mc_avg_holevo(s, 4, 5000, seed=99)
        assert (a.value, a.stderr) == (b.value, b.stderr)
        c = mc_avg_holevo(s, 4, 5000, seed=100)
        assert (a.value, a.stderr) != (c.value, c.stderr)

    def test_no_information_anywhere(self):
        est = mc_avg_holevo(EnvironmentSpec(5, 7, 1.0, 1.0, 0.5), 4, 100, seed=0)
        assert est.value == 0.0 and est.stderr == 0.0

    def test_full_interception_of_perfect_model(self):
        s = perfect(2, 4, p0=0.3)
        est = mc_avg_holevo(s, 6, 100, seed=0)
        assert est.value == binary_entropy(0.3)
        assert est.stderr == 0.0

    def test_sample_count_validated(self):
        with pytest.raises(SpecValidationError):
            mc_avg_holevo(perfect(2, 4), 2, 1, seed=0)

    def test_huge_classes_rejected_with_clear_error(self):
        with pytest.raises(SpecValidationError, match="1e9"):
            mc_avg_holevo(perfect(1000, 10**9), 10, 10, seed=0)

    def test_unbiased_against_enumeration(self):
        s = EnvironmentSpec(4, 8, 0.25, 0.75, 0.4)
        exact = avg_holevo_exact(s, 5)
        est = mc_avg_holevo(s, 5, 40_000, seed=3)
        assert abs(est.value - exact) <= 4 * est.stderr


class TestStirling:
    def test_arithmetic(self):
        val = stirling_fragment_size(perfect(4, 96), DeficitSpec(0.1))
        assert val == pytest.approx(96 * math.log(10) / 4, rel=1e-15)
        assert val == pytest.approx(55.26, abs=5e-3)

    def test_balanced_classes_give_order_one_fragments(self):
        val = stirling_fragment_size(perfect(7, 7), DeficitSpec(1 / math.e))
        assert val == pytest.approx(1.0, rel=1e-12)

    def test_requires_good_spins(self):
        with pytest.raises(SpecValidationError):
            stirling_fragment_size(perfect(0, 9), DeficitSpec(0.1))

    def test_relative_error_decreases_with_dilution(self):
        # at delta = 0.9 the integer-granularity error dominates and decays
        d = DeficitSpec(0.9)
        errors = []
        for nb in (100, 1000, 10000):
            s = perfect(4, nb)
            exact = find_fragment_size(s, d)
            errors.append(abs(stirling_fragment_size(s, d) - exact) / exact)
        assert errors[0] > errors[1] > errors[2]


class TestInfoCurve:
    def test_exact_entries_have_no_stderr(self):
        curve = info_curve(perfect(2, 4), range(0, 7), method="exact")
        assert [e.fragment_size for e in curve.entries] == list(range(7))
        assert all(e.stderr is None and e.method == "exact" for e in curve.entries)

    def test_monte_carlo_reproducible(self):
        s = EnvironmentSpec(5, 7, 0.3, 0.8, 0.5)
        a = info_curve(s, range(0, 13), method="monte-carlo", n_samples=2000, seed=5)
        b = info_curve(s, range(0, 13), method="monte-carlo", n_samples=2000, seed=5)
        assert a == b

    def test_validation(self):
        with pytest.raises(SpecValidationError):
            InfoCurve(entries=(CurvePoint(2, 0.5, "exact"), CurvePoint(1, 0.5, "exact")))
        with pytest.raises(SpecValidationError):
            InfoCurve(entries=(CurvePoint(0, 0.5, "exact", stderr=0.1),))
        with pytest.raises(SpecValidationError):
            InfoCurve(entries=(CurvePoint(0, 0.5, "bogus"),))


class TestRedundancyReport:
    def test_perfect_worked_instance(self):
        rep = redundancy_report(perfect(2, 4), DeficitSpec(0.1))
        assert rep.f_delta == 4
        assert rep.r_avg == 1.5
        assert rep.r_max_discrete == 2
        assert rep.ratio_avg_over_max == 0.75
        # 2 good spins < ln(10) puts the Chernoff estimate out of scope, and
        # the continuous disjoint-fragment formula needs delta <= gamma2_good
        assert "qcb_valid" not in rep.validity_flags
        assert "max_formula_valid" not in rep.validity_flags

    def test_imperfect_flags(self):
        rep = redundancy_report(EnvironmentSpec(50, 50, 0.2, 1.0, 0.5), DeficitSpec(0.1))
        assert "qcb_valid" in rep.validity_flags
        assert "max_formula_valid" in rep.validity_flags
        assert rep.r_qcb_expanded == pytest.approx(50 * 0.8 / math.log(10), rel=1e-12)

    def test_deficit_one(self):
        rep = redundancy_report(perfect(2, 4), DeficitSpec(1.0))
        assert rep.r_avg == 6.0
        assert rep.r_max_discrete == 6
        assert rep.r_qcb is None and rep.r_qcb_expanded is None

    def test_unreachable_max_route_flagged(self):
        # bad spins carry partial records, so the averaging route succeeds
        # while good spins alone cannot reach the target
        s = EnvironmentSpec(1, 40, 0.9, 0.5, 0.5)
        rep = redundancy_report(s, DeficitSpec(0.05))
        assert rep.r_max_discrete is None
        assert "deficit_unreachable" in rep.validity_flags
        assert rep.r_avg > 1.0

    def test_oracle_backs_the_exact_route(self):
        s = EnvironmentSpec(3, 5, 0.25, 0.75, 0.3)
        state = oracle.branch_state(s)
        for f in range(0, 9):
            assert avg_holevo_exact(s, f) == pytest.approx(
                oracle.all_fragment_average(state, f, "holevo"), abs=1e-10
            )
