import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from darwinism import (
    EnvironmentSpec,
    FragmentComposition,
    SpecValidationError,
    fragment_overlap,
    hypergeometric_pmf,
    validate_spec,
)
from darwinism.model import composition_support


def spec(ng, nb, g2g=0.0, g2b=1.0, p0=0.5):
    return EnvironmentSpec(ng, nb, g2g, g2b, p0)


class TestValidateSpec:
    def test_worked_instance_is_valid(self):
        s = spec(2, 4)
        assert validate_spec(s) is s

    def test_empty_environment(self):
        with pytest.raises(SpecValidationError, match="empty environment"):
            validate_spec(spec(0, 0))

    def test_overlap_out_of_range(self):
        with pytest.raises(SpecValidationError, match="overlap out of range"):
            validate_spec(spec(1, 1, g2g=1.5))

    def test_all_violations_reported(self):
        with pytest.raises(SpecValidationError) as err:
            validate_spec(EnvironmentSpec(0, 0, -0.1, 2.0, 7.0))
        msg = str(err.value)
        assert "empty environment" in msg
        assert "gamma2_good" in msg and "gamma2_bad" in msg
        assert "probability out of range" in msg


class TestHypergeometricPmf:
    def test_all_bad_pair_from_enumeration(self):
        # 6 of the C(6,2)=15 pairs are bad-bad when 4 of 6 spins are bad
        assert hypergeometric_pmf(spec(2, 4), 2, 2) == pytest.approx(6 / 15, abs=1e-12)

    def test_infeasible_composition_is_zero(self):
        assert hypergeometric_pmf(spec(2, 4), 2, 3) == 0.0
        assert hypergeometric_pmf(spec(2, 4), 3, 0) == 0.0  # needs 3 good, only 2

    def test_oversized_fragment_rejected(self):
        with pytest.raises(SpecValidationError):
            hypergeometric_pmf(spec(2, 4), 7, 0)

    @pytest.mark.parametrize("ng,nb", [(2, 4), (3, 3), (1, 7), (5, 7), (4, 0), (0, 6)])
    def test_matches_exhaustive_enumeration(self, ng, nb):
        s = spec(ng, nb)
        n = ng + nb
        for f in range(0, n + 1):
            counts = {}
            for subset in combinations(range(n), f):
                b = sum(1 for q in subset if q >= ng)
                counts[b] = counts.get(b, 0) + 1
            total = sum(counts.values())
            for b in range(0, f + 1):
                want = counts.get(b, 0) / total
                assert hypergeometric_pmf(s, f, b) == pytest.approx(want, abs=1e-12)

    @settings(max_examples=200, deadline=None)
    @given(
        ng=st.integers(min_value=0, max_value=800),
        nb=st.integers(min_value=0, max_value=800),
        frac=st.floats(min_value=0.0, max_value=1.0),
    )
    def test_normalization(self, ng, nb, frac):
        if ng + nb == 0:
            return
        s = spec(ng, nb)
        f = int(round(frac * s.n_total))
        lo = max(0, f - ng)
        hi = min(f, nb)
        total = math.fsum(hypergeometric_pmf(s, f, b) for b in range(lo, hi + 1))
        assert abs(total - 1.0) <= 1e-12

    def test_huge_counts_match_direct_product(self):
        # probability that a 100-spin fragment is all bad, by the telescoping
        # product (nb/n)((nb-1)/(n-1))... evaluated with log1p
        ng, nb, f = 10**6, 10**9, 100
        s = spec(ng, nb)
        log_p = math.fsum(
            math.log1p(-ng / (ng + nb - j)) for j in range(f)
        )
        assert hypergeometric_pmf(s, f, f) == pytest.approx(math.exp(log_p), rel=1e-9)

    def test_support_vector_matches_pointwise(self):
        for ng, nb, f in [(5, 7, 6), (50, 50, 37), (400, 1300, 612)]:
            s = spec(ng, nb)
            f_bad, weights = composition_support(s, f)
            direct = np.array([hypergeometric_pmf(s, f, int(b)) for b in f_bad])
            assert np.abs(weights - direct).max() <= 1e-12
            assert abs(weights.sum() - 1.0) <= 1e-12


class TestFragmentOverlap:
    def test_product_form(self):
        s = spec(50, 50, g2g=0.2, g2b=1.0)
        assert fragment_overlap(s, FragmentComposition(2, 7)) == pytest.approx(0.04, abs=1e-15)

    def test_empty_fragment(self):
        assert fragment_overlap(spec(2, 4, 0.3, 0.9), FragmentComposition(0, 0)) == 1.0

    def test_perfect_record_annihilates(self):
        s = spec(3, 5, g2g=0.0, g2b=0.7)
        assert fragment_overlap(s, FragmentComposition(1, 4)) == 0.0
        assert fragment_overlap(s, FragmentComposition(3, 0)) == 0.0

    def test_oversized_composition_rejected(self):
        with pytest.raises(SpecValidationError):
            fragment_overlap(spec(2, 4), FragmentComposition(3, 0))

    @settings(max_examples=100, deadline=None)
    @given(
        g2g=st.floats(min_value=0.0, max_value=1.0),
        g2b=st.floats(min_value=0.0, max_value=1.0),
        fg=st.integers(min_value=0, max_value=19),
        fb=st.integers(min_value=0, max_value=19),
    )
    def test_monotone_in_good_count_and_bad_invariance(self, g2g, g2b, fg, fb):
        s = spec(20, 20, g2g, g2b)
        a = fragment_overlap(s, FragmentComposition(fg, fb))
        b = fragment_overlap(s, FragmentComposition(fg + 1, fb))
        assert b <= a + 1e-15
        if g2b == 1.0:
            assert fragment_overlap(s, FragmentComposition(fg, fb + 1)) == a
