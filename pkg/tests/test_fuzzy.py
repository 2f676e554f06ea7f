import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pvfleet.fuzzy import (
    LabelThresholds,
    MembershipFunction,
    OwaWeights,
    PerformanceLabel,
    Shape,
    drop_extremes_weights,
    linguistic_label,
    owa,
)

unit = st.floats(0.0, 1.0)


class TestMembership:
    f = MembershipFunction(-21.662, -12.550)

    @pytest.mark.parametrize("x, mu", [(-12.550, 1.0), (-21.662, 0.0), (-17.106, 0.5), (-30.0, 0.0), (5.0, 1.0)])
    def test_trapezoid_values(self, x, mu):
        assert self.f(x) == pytest.approx(mu, abs=1e-12)

    def test_step(self):
        g = MembershipFunction(3.0, 3.0, Shape.STEP)
        assert g(3.0) == 1.0 and g(2.999) == 0.0

    def test_from_interval_picks_shape(self):
        assert MembershipFunction.from_interval(1.0, 1.0).shape is Shape.STEP
        assert MembershipFunction.from_interval(0.0, 1.0).shape is Shape.TRAPEZOID

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            MembershipFunction(1.0, 1.0)
        with pytest.raises(ValueError):
            MembershipFunction(0.0, 1.0, Shape.STEP)

    def test_array_matches_scalar(self):
        xs = np.linspace(-40, 10, 201)
        np.testing.assert_array_equal(self.f(xs), [self.f(float(x)) for x in xs])
        assert math.isnan(self.f(math.nan))
        assert np.isnan(self.f(np.array([math.nan, 0.0]))[0])

    @given(st.floats(-100, 100), st.floats(-100, 100), st.floats(0.001, 50))
    def test_monotone_and_bounded(self, x, y, width):
        f = MembershipFunction(-width, width)
        lo, hi = sorted((x, y))
        assert 0.0 <= f(lo) <= f(hi) <= 1.0


class TestWeights:
    def test_small_cases(self):
        assert drop_extremes_weights(3).weights == (0.0, 1.0, 0.0)
        assert drop_extremes_weights(4).weights == (0.0, 0.5, 0.5, 0.0)
        assert drop_extremes_weights(5).weights == pytest.approx((0, 1 / 3, 1 / 3, 1 / 3, 0), abs=1e-15)

    @pytest.mark.parametrize("m", [0, 1, 2])
    def test_too_few(self, m):
        with pytest.raises(ValueError, match="at least 3"):
            drop_extremes_weights(m)

    def test_sums_to_one(self):
        for m in range(3, 1001):
            assert abs(math.fsum(drop_extremes_weights(m).weights) - 1.0) <= 1e-12

    def test_rejects_bad_vectors(self):
        with pytest.raises(ValueError):
            OwaWeights((0.5, 0.6))
        with pytest.raises(ValueError):
            OwaWeights((1.5, -0.5))
        with pytest.raises(ValueError):
            OwaWeights(())


class TestOwa:
    def test_one_outlier_dropped(self):
        assert owa([1, 1, 1, 1, 0], drop_extremes_weights(5)) == pytest.approx(1.0, abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            owa([0.5, 0.5], drop_extremes_weights(3))

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            owa([0.5, 1.2, 0.1], drop_extremes_weights(3))
        with pytest.raises(ValueError):
            owa([0.5, math.nan, 0.1], drop_extremes_weights(3))

    @given(unit, st.integers(3, 12))
    def test_idempotent(self, c, m):
        assert owa([c] * m, drop_extremes_weights(m)) == pytest.approx(c, abs=1e-12)

    @settings(max_examples=100)
    @given(st.lists(unit, min_size=3, max_size=12), st.randoms(use_true_random=False))
    def test_symmetric_and_bounded(self, values, rnd):
        w = drop_extremes_weights(len(values))
        shuffled = list(values)
        rnd.shuffle(shuffled)
        y = owa(values, w)
        assert owa(shuffled, w) == y
        assert min(values) - 1e-12 <= y <= max(values) + 1e-12

    @given(st.lists(st.sampled_from([0.0, 0.25, 1.0]), min_size=3, max_size=8))
    def test_ties_are_well_defined(self, values):
        w = drop_extremes_weights(len(values))
        assert owa(values, w) == owa(sorted(values), w) == owa(sorted(values, reverse=True), w)


class TestLabels:
    @pytest.mark.parametrize("y, label", [
        (0.88, PerformanceLabel.LA),
        (1.0, PerformanceLabel.S),
        (0.0, PerformanceLabel.B),
        (0.75, PerformanceLabel.LA),
        (0.45, PerformanceLabel.A),
        (0.4499, PerformanceLabel.VA),
        (1 - 1e-12, PerformanceLabel.S),
        (1e-12, PerformanceLabel.B),
    ])
    def test_published_boundaries(self, y, label):
        assert linguistic_label(y) is label

    def test_long_names(self):
        assert PerformanceLabel.LA.long_name == "lightly anomalous performance"

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            linguistic_label(1.5)

    def test_custom_thresholds(self):
        t = LabelThresholds(upper=0.9, lower=0.5)
        assert linguistic_label(0.88, thresholds=t) is PerformanceLabel.A
        with pytest.raises(ValueError):
            LabelThresholds(upper=0.4, lower=0.5)

    @given(unit)
    def test_total_and_partitioned(self, y):
        label = linguistic_label(y)
        matches = [
            y >= 1 - 1e-9,
            0.75 <= y < 1 - 1e-9,
            0.45 <= y < 0.75,
            1e-9 < y < 0.45,
            y <= 1e-9,
        ]
        assert sum(matches) == 1
        order = [PerformanceLabel.S, PerformanceLabel.LA, PerformanceLabel.A, PerformanceLabel.VA, PerformanceLabel.B]
        assert label is order[matches.index(True)]
