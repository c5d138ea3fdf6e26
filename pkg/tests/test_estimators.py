import itertools
import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from robustmean.estimators import (
    CatoniParams,
    DegenerateScaleError,
    EstimatorSpec,
    IterationLimitError,
    MomParams,
    Sample,
    TrimParams,
    WinsorizeParams,
    catoni_mean,
    catoni_psi,
    lm_clip_levels,
    lm_trimmed_mean,
    mad,
    mean,
    median,
    mom,
    mom_partition,
    outlyingness,
    phi,
    winsorize_bounds,
    winsorized_fit,
    winsorized_mean,
)

from oracles import catoni_root_scan, mad_exact, median_exact, winsorized_exact

# frozen from oracles.catoni_root_scan on [-1, 11]
CATONI_0_0_10_HALF = 2.766693714771825

finite = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False, allow_subnormal=False)
samples = st.lists(finite, min_size=1, max_size=40)
scales = st.sampled_from([-7.5, -3.0, -1.0, -0.5, 0.25, 2.0, 10.0])
shifts = st.floats(min_value=-1e4, max_value=1e4)


def close(a, b, rel=1e-9, scale=1.0):
    return abs(a - b) <= rel * max(abs(a), abs(b), scale)


class TestSample:
    def test_rejects_nan_and_inf(self):
        with pytest.raises(ValueError):
            Sample([1.0, float("nan")])
        with pytest.raises(ValueError):
            Sample([float("inf")])

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            Sample([])

    def test_immutable(self):
        s = Sample([3.0, 1.0])
        with pytest.raises(ValueError):
            s.values[0] = 9.0
        assert list(s.sorted_view) == [1.0, 3.0]


class TestLocationScale:
    @pytest.mark.parametrize(
        "x, expected", [([1, 2, 3], 2), ([1, 2, 3, 4], 2.5), ([7], 7)]
    )
    def test_median(self, x, expected):
        assert median(x) == expected

    @pytest.mark.parametrize(
        "x, expected", [([1, 2, 3], 1), ([4, 4, 4, 4], 0), ([1, 1, 1, 10], 0)]
    )
    def test_mad(self, x, expected):
        assert mad(x) == expected
        assert float(mad_exact(x)) == expected

    @pytest.mark.parametrize("x, expected", [([1, 2, 3], 2), ([5.5], 5.5), ([-5, 5], 0)])
    def test_mean(self, x, expected):
        assert mean(x) == expected

    def test_outlyingness(self):
        assert outlyingness(5, 5, 2) == 0
        assert outlyingness(3, 1, 2) == 1
        with pytest.raises(DegenerateScaleError):
            outlyingness(0, 1, 0)

    def test_winsorize_bounds(self):
        assert winsorize_bounds(0, 1, 3) == (-3, 3)
        assert winsorize_bounds(10, 0, 5) == (10, 10)
        assert winsorize_bounds(2, 1.5, 2) == (-1, 5)

    def test_phi(self):
        assert phi(0, -1, 1) == 0
        assert phi(9, -1, 1) == 1
        assert phi(-9, -1, 1) == -1
        with pytest.raises(ValueError):
            phi(0, 1, -1)

    @given(samples)
    def test_median_matches_exact(self, x):
        assert median(x) == pytest.approx(float(median_exact(x)), rel=1e-12, abs=1e-12)

    @given(samples, scales, shifts)
    def test_median_affine(self, x, a, b):
        y = [a * v + b for v in x]
        s = max(map(abs, y)) + abs(b) + 1
        assert close(median(y), a * median(x) + b, scale=s)

    @given(samples, scales, shifts)
    def test_mad_affine(self, x, a, b):
        y = [a * v + b for v in x]
        s = max(map(abs, y)) + abs(b) + 1
        assert close(mad(y), abs(a) * mad(x), scale=s)

    @given(st.floats(-1e9, 1e9), st.floats(-1, 1), st.floats(0, 2))
    def test_phi_idempotent(self, x, lo, w):
        hi = lo + w
        assert phi(phi(x, lo, hi), lo, hi) == phi(x, lo, hi)


class TestWinsorized:
    def test_worked_example(self):
        fit = winsorized_fit([1, 2, 3, 4, 100], beta=2)
        assert (fit.estimate, fit.median, fit.mad) == (3.0, 3.0, 1.0)
        assert (fit.lower, fit.upper) == (1.0, 5.0)
        assert (fit.clipped_low, fit.clipped_high) == (0, 1)

    def test_beta_zero_is_median(self):
        assert winsorized_mean([1, 2, 3, 4, 100], beta=0) == 3

    def test_huge_beta_is_mean(self):
        assert winsorized_mean([1, 2, 3, 4, 100], beta=1e9) == 22

    def test_degenerate_scale_raises(self):
        with pytest.raises(DegenerateScaleError):
            winsorized_mean([1, 1, 1, 10], beta=3)

    def test_negative_beta_rejected(self):
        with pytest.raises(ValueError):
            WinsorizeParams(-1.0)

    def test_brute_force_grid(self):
        """Every multiset of size <= 8 over a 5-value grid, four betas."""
        grid = (-3.0, -0.5, 0.0, 1.25, 8.0)
        checked = 0
        for size in range(1, 9):
            for combo in itertools.combinations_with_replacement(grid, size):
                for beta in (0.0, 0.5, 1.0, 3.0):
                    if beta > 0 and mad_exact(combo) == 0:
                        with pytest.raises(DegenerateScaleError):
                            winsorized_mean(combo, beta)
                        continue
                    want = float(winsorized_exact(combo, beta))
                    # order must not matter
                    got = winsorized_mean(combo[::-1], beta)
                    assert close(got, want, scale=1e-300), (combo, beta, got, want)
                    checked += 1
        assert checked == 3464

    @given(st.lists(st.sampled_from([-3.0, -0.5, 0.0, 1.25, 8.0]), min_size=1, max_size=8), st.randoms())
    def test_grid_permutation_invariant(self, x, rnd):
        # the exhaustive check above runs over multisets; order is covered here
        y = list(x)
        rnd.shuffle(y)
        if mad(x) == 0:
            return
        assert close(winsorized_mean(y, 1.0), winsorized_mean(x, 1.0))

    @given(samples, st.floats(0.5, 6.0))
    def test_stays_inside_clip_levels(self, x, beta):
        assume(mad(x) > 0)
        fit = winsorized_fit(x, beta)
        assert fit.lower <= fit.estimate <= fit.upper
        assert fit.lower == fit.median - beta * fit.mad

    @given(samples, scales, shifts, st.sampled_from([0.5, 1.0, 2.0, 3.0]))
    def test_affine(self, x, a, b, beta):
        assume(mad(x) > 1e-6 * (max(map(abs, x)) + 1))
        y = [a * v + b for v in x]
        s = max(map(abs, y)) + abs(b) + 1
        assert close(winsorized_mean(y, beta), a * winsorized_mean(x, beta) + b, scale=s)

    @given(samples)
    def test_beta_above_max_outlyingness_gives_mean(self, x):
        m = mad(x)
        # a MAD at the edge of the float range makes outlyingness overflow
        assume(m > 1e-9 * max(map(abs, x)))
        top = float(np.max(outlyingness(np.asarray(x), median(x), m)))
        assert close(winsorized_mean(x, top * 1.01 + 1), mean(x), scale=max(map(abs, x)))

    @given(samples)
    def test_beta_zero_is_median_always(self, x):
        assert winsorized_mean(x, 0) == median(x)


class TestCatoni:
    def test_psi_values(self):
        assert catoni_psi(0) == 0
        assert catoni_psi(1) == pytest.approx(math.log(2.5), rel=1e-15)
        assert catoni_psi(-1) == -catoni_psi(1)

    def test_psi_extreme_arguments_finite(self):
        v = catoni_psi(np.array([1e150, -1e300, 1e308]))
        assert np.all(np.isfinite(v))
        assert v[0] == pytest.approx(2 * math.log(1e150) - math.log(2), rel=1e-12)

    @given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=50, unique=True))
    def test_psi_strictly_increasing(self, xs):
        xs = np.sort(xs)
        assert np.all(np.diff(catoni_psi(xs)) > 0)

    @given(st.floats(-1e6, 1e6))
    def test_psi_magnitude(self, x):
        assert abs(catoni_psi(x)) == pytest.approx(math.log1p(abs(x) + x * x / 2), rel=1e-12)

    def test_constant_sample(self):
        assert catoni_mean([4.0, 4.0, 4.0], alpha=0.3) == pytest.approx(4.0, abs=1e-10)

    def test_symmetric_pair(self):
        assert catoni_mean([-1.0, 1.0], alpha=2.0) == pytest.approx(0.0, abs=1e-10)

    def test_scan_oracle(self):
        oracle = catoni_root_scan([0, 0, 10], 0.5, -1.0, 11.0)
        assert oracle == pytest.approx(CATONI_0_0_10_HALF, abs=1e-9)
        got = catoni_mean([0, 0, 10], alpha=0.5)
        assert got == pytest.approx(CATONI_0_0_10_HALF, abs=1e-9)
        assert 0 < got < 10 / 3

    @given(st.lists(st.floats(-100, 100), min_size=1, max_size=30), st.floats(-1e3, 1e3))
    def test_translation_equivariant(self, x, b):
        lhs = catoni_mean([v + b for v in x], alpha=1.0)
        rhs = catoni_mean(x, alpha=1.0) + b
        # bisection tolerance plus rounding of the shifted data
        assert abs(lhs - rhs) <= 1e-9 * (1 + abs(b) + max(map(abs, x)))

    def test_scale_non_equivariance_witness(self):
        x, s = [0.0, 0.0, 10.0], 2.0
        gap = abs(catoni_mean([s * v for v in x], 0.5) - s * catoni_mean(x, 0.5))
        assert gap > 10 * CatoniParams().tolerance
        assert gap > 0.1

    def test_iteration_limit(self):
        with pytest.raises(IterationLimitError) as info:
            catoni_mean([0.0, 0.0, 1e6], alpha=1.0, tolerance=1e-12, max_iterations=5)
        lo, hi = info.value.bracket
        assert lo < hi


class TestMedianOfMeans:
    def test_example(self):
        assert mom([1, 2, 3, 4, 5, 6], k=3) == 3.5

    def test_constant(self):
        assert mom([2.5] * 12, k=4) == 2.5

    @given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=30))
    def test_single_group_is_mean(self, x):
        assert mom(x, k=1) == pytest.approx(np.mean(x), rel=1e-12, abs=1e-12)

    def test_remainder_rule(self):
        sizes = [len(g) for g in mom_partition(11, 3)]
        assert sizes == [4, 4, 3]

    def test_brute_force_partition(self):
        x = np.arange(1.0, 12.0) ** 2
        groups = [x[0:4], x[4:8], x[8:11]]
        means = sorted(g.mean() for g in groups)
        assert mom(x, k=3) == means[1]

    def test_shuffle_deterministic(self):
        x = np.linspace(-3, 5, 37) ** 3
        a = mom(x, k=5, partition_rule="seeded_shuffle", seed=11)
        b = mom(x, k=5, partition_rule="seeded_shuffle", seed=11)
        assert a == b
        perm = np.concatenate(mom_partition(37, 5, "seeded_shuffle", 11))
        assert sorted(perm) == list(range(37))

    def test_invalid_k(self):
        with pytest.raises(ValueError):
            MomParams(k=0)
        with pytest.raises(ValueError):
            mom([1.0, 2.0, 3.0], k=4)


class TestTwoSampleTrimmed:
    def test_example(self):
        x = list(range(1, 11))
        assert lm_clip_levels(x, 0.2) == (2.0, 9.0)
        assert lm_trimmed_mean(x, x, 0.2) == 5.5

    def test_no_trim_is_mean(self):
        x = [0.3, -1.0, 8.0]
        assert lm_trimmed_mean(x, [5, 6, 7], 0.0) == pytest.approx(np.mean(x))

    def test_interior_points(self):
        y = np.linspace(-5, 5, 20)
        assert lm_trimmed_mean(np.zeros(20), y, 0.1) == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            lm_trimmed_mean([1, 2], [1, 2, 3], 0.1)

    def test_epsilon_range(self):
        with pytest.raises(ValueError):
            TrimParams(0.5)

    @given(
        st.lists(st.floats(-1e4, 1e4), min_size=10, max_size=10),
        st.lists(st.floats(-1e4, 1e4), min_size=10, max_size=10),
        scales,
        shifts,
    )
    def test_joint_affine(self, x, y, a, b):
        tx = [a * v + b for v in x]
        ty = [a * v + b for v in y]
        s = max(map(abs, tx + ty)) + abs(b) + 1
        assert close(lm_trimmed_mean(tx, ty, 0.2), a * lm_trimmed_mean(x, y, 0.2) + b, scale=s)


class TestEstimatorSpec:
    def test_defaults(self):
        assert EstimatorSpec("winsorized").tuning.beta == 3.0
        assert EstimatorSpec("mom").tuning.k == 5

    def test_round_trip(self):
        spec = EstimatorSpec.make("mom", k=7, partition_rule="seeded_shuffle")
        assert EstimatorSpec.from_dict(spec.to_dict()) == spec

    def test_unknown_kind_and_fields(self):
        with pytest.raises(ValueError):
            EstimatorSpec("trimmean")
        with pytest.raises(TypeError):
            EstimatorSpec.make("winsorized", bta=2)
        with pytest.raises(ValueError):
            EstimatorSpec.from_dict({"kind": "mean", "tunning": {}})

    def test_two_sample_requires_y(self):
        with pytest.raises(ValueError):
            EstimatorSpec("lm_trimmed").estimate([1.0, 2.0])

    @pytest.mark.parametrize("kind", ["mean", "median", "winsorized", "catoni", "mom"])
    def test_dispatch(self, kind):
        x = np.linspace(-2, 3, 25) ** 3
        spec = EstimatorSpec(kind)
        direct = {
            "mean": lambda: mean(x),
            "median": lambda: median(x),
            "winsorized": lambda: winsorized_mean(x, 3.0),
            "catoni": lambda: catoni_mean(x, 1.0),
            "mom": lambda: mom(x, 5),
        }[kind]()
        assert spec.estimate(x) == direct
