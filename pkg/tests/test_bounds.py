import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from robustmean.bounds import (
    BoundParams,
    bernstein_tail,
    check_validity,
    default_eps_star,
    delta_star,
    minimal_eps_star,
    rbp_theoretical,
    subgaussian_radius,
    theorem41_bound,
)
from robustmean.estimators import EstimatorSpec

from oracles import bernstein_line, bound_line, delta_star_line, radius_line

SQ2PI = math.sqrt(2 * math.pi)

# frozen from the straight-line oracles in tests/oracles.py
BERNSTEIN_100 = 2.222515695969596e-05
DELTA_STAR_1000 = 0.007672368811656655
BOUND_1E5 = 0.3516053342477347
STAT_1E5 = 0.00997893424773466
RADIUS_4_400 = 0.17308183826022852


def param_grid(points=100, seed=1234):
    """Deterministic pseudo-random parameter cells."""
    g = np.random.default_rng(seed)
    for _ in range(points):
        eps = float(g.uniform(0, 0.2))
        yield dict(
            n=int(g.integers(10, 10**7)),
            delta=float(g.uniform(1e-6, 0.5)),
            eps=eps,
            eps_star=float(g.uniform(2 * eps, 0.49)),
            beta=float(g.uniform(1, 6)),
            mu=float(g.normal(0, 5)),
            sigma=float(g.uniform(0.01, 5)),
            sigma_x=float(g.uniform(0.01, 5)),
            c1=float(g.uniform(0.1, 5)),
            c2=float(g.uniform(0.1, 5)),
        )


class TestBernstein:
    def test_example(self):
        assert bernstein_tail(100, 0.5, 1, 1) == pytest.approx(math.exp(-75 / 7), rel=1e-12)
        assert bernstein_tail(100, 0.5, 1, 1) == pytest.approx(BERNSTEIN_100, rel=1e-12)

    def test_small_t_tends_to_one(self):
        assert bernstein_tail(10, 1e-12, 1, 1) == pytest.approx(1.0)

    def test_grid_matches_line(self):
        g = np.random.default_rng(7)
        for _ in range(100):
            n = int(g.integers(1, 10**6))
            nu, b = float(g.uniform(0, 3)), float(g.uniform(0.01, 3))
            t = math.sqrt(float(g.uniform(0.01, 100)) * (nu + 0.1) / n)
            assert bernstein_tail(n, t, nu, b) > 0
            assert bernstein_tail(n, t, nu, b) == pytest.approx(bernstein_line(n, t, nu, b), rel=1e-12)

    @given(st.integers(1, 10**5), st.floats(1e-3, 2), st.floats(0, 2), st.floats(0.01, 2))
    def test_monotone(self, n, t, nu, b):
        p = bernstein_tail(n, t, nu, b)
        assert 0 < p <= 1 or p == 0.0
        assert bernstein_tail(n, t * 1.1, nu, b) <= p
        assert bernstein_tail(n + 1, t, nu, b) <= p
        assert bernstein_tail(n, t, nu + 0.1, b) >= p
        assert bernstein_tail(n, t, nu, b + 0.1) >= p


class TestDeltaStar:
    def test_example(self):
        assert delta_star(1000, 0.1) == pytest.approx(DELTA_STAR_1000, rel=1e-12)
        assert delta_star(1000, 0.1) == pytest.approx(math.exp(-10 / (8 * (0.24 + 0.1 / 6))), rel=1e-12)

    def test_grid_matches_line(self):
        g = np.random.default_rng(11)
        for _ in range(100):
            n = int(g.integers(1, 10**7))
            e = min(0.499, math.sqrt(float(g.uniform(0.01, 200)) / n))
            assert delta_star(n, e) == pytest.approx(delta_star_line(n, e), rel=1e-12)

    def test_tends_to_one(self):
        assert delta_star(100, 1e-9) == pytest.approx(1.0)

    def test_domain(self):
        for e in (0.0, 0.5, -0.1):
            with pytest.raises(ValueError):
                delta_star(10, e)

    def test_is_bernstein_instance(self):
        # indicator variables: variance 1/4 - e^2, bound 1, deviation e/2
        for n in (10, 1000, 10**5):
            for e in np.linspace(0.01, 0.49, 25):
                e = float(e)
                via = math.exp(-n * (e / 2) ** 2 / (2 * ((0.25 - e * e) + (e / 2) / 3)))
                assert delta_star(n, e) == pytest.approx(via, rel=1e-12)

    @given(st.integers(1, 10**6), st.floats(0.001, 0.49), st.floats(0.001, 0.49))
    def test_nonincreasing_in_eps_star(self, n, a, b):
        lo, hi = sorted((a, b))
        assert delta_star(n, hi) <= delta_star(n, lo)


class TestValidity:
    def test_large_n_valid(self):
        v = check_validity(BoundParams(100_000, 0.05, 0.0, 0.05))
        assert v.valid and 24 * v.delta_star < 1e-50

    def test_small_n_invalid(self):
        v = check_validity(BoundParams(100, 0.05, 0.0, 0.05))
        assert not v.valid
        assert v.threshold == pytest.approx(21.24, abs=0.01)
        assert v.min_n == 5055

    def test_min_n_is_tight(self):
        v = check_validity(BoundParams(100, 0.05, 0.0, 0.05))
        assert check_validity(BoundParams(v.min_n, 0.05, 0.0, 0.05)).valid
        assert not check_validity(BoundParams(v.min_n - 1, 0.05, 0.0, 0.05)).valid

    def test_zero_eps_star_never_valid(self):
        assert not check_validity(BoundParams(10**9, 0.5, 0.0, 0.0)).valid

    def test_delta_near_one(self):
        assert check_validity(BoundParams(10**7, 0.999, 0.0, 0.05)).valid

    def test_minimal_eps_star(self):
        e = minimal_eps_star(100_000, 0.05)
        assert e == pytest.approx(0.011150434341621114, rel=1e-12)
        assert 0.05 > 24 * delta_star(100_000, e)
        assert not 0.05 > 24 * delta_star(100_000, e * (1 - 1e-9))

    def test_default_eps_star(self):
        assert default_eps_star(100_000, 0.05, 0.02) == 0.04
        assert default_eps_star(100_000, 0.05, 0.0) == minimal_eps_star(100_000, 0.05)

    def test_param_validation(self):
        with pytest.raises(ValueError):
            BoundParams(100, 0.05, 0.02, 0.03)
        with pytest.raises(ValueError):
            BoundParams(100, 1.2, 0.0, 0.1)
        with pytest.raises(ValueError):
            BoundParams(100, 0.05, 0.0, 0.1, beta=0.5)


class TestDeviationBound:
    def test_example(self):
        p = BoundParams(100_000, 0.05, 0.02, 0.05, 3.0, 0.0, 0.6745, 1.0, 2.5066, 2.5066)
        r = theorem41_bound(p)
        assert r.value == pytest.approx(BOUND_1E5, rel=1e-12)
        assert r.statistical == pytest.approx(STAT_1E5, rel=1e-12)
        assert r.valid

    def test_grid_matches_line(self):
        for cell in param_grid():
            got = theorem41_bound(BoundParams(**cell)).value
            assert got == pytest.approx(bound_line(**cell), rel=1e-12)

    def test_invalid_still_computed(self):
        r = theorem41_bound(BoundParams(100, 0.05, 0.0, 0.05))
        assert not r.valid and r.value > 0 and float(r) == r.value

    def test_no_contamination_reduces_to_statistical_term(self):
        p = BoundParams(5000, 0.1, 0.0, 1e-300)
        r = theorem41_bound(p)
        assert r.contamination == 0
        assert r.value == pytest.approx(r.statistical, rel=1e-12)

    def test_large_n_limit(self):
        kw = dict(delta=0.05, eps=0.02, eps_star=0.05, beta=3.0, sigma=0.6745, c1=SQ2PI, c2=SQ2PI)
        floor = 2 * SQ2PI * 0.05 + 0.02 * (2 * 3 * 0.6745 + 2 * 2 * SQ2PI * 0.05)
        r = theorem41_bound(BoundParams(n=10**15, **kw))
        assert r.value == pytest.approx(floor, rel=1e-6)
        assert r.value > floor

    def test_deterministic(self):
        p = BoundParams(777, 0.01, 0.01, 0.2)
        assert theorem41_bound(p) == theorem41_bound(p)


class TestRadius:
    def test_examples(self):
        assert subgaussian_radius(1, 1, 1 / math.e) == pytest.approx(1.0, rel=1e-15)
        assert subgaussian_radius(4, 400, 0.05) == pytest.approx(RADIUS_4_400, rel=1e-12)

    def test_grid_matches_line(self):
        g = np.random.default_rng(3)
        for _ in range(100):
            v, n = float(g.uniform(0.01, 10)), int(g.integers(1, 10**6))
            d, c = float(g.uniform(1e-6, 0.99)), float(g.uniform(0.1, 3))
            assert subgaussian_radius(v, n, d, c) == pytest.approx(radius_line(v, n, d, c), rel=1e-12)


class TestBreakdownValues:
    def test_examples(self):
        assert rbp_theoretical(EstimatorSpec("mean"), 10) == Fraction(1, 10)
        assert rbp_theoretical(EstimatorSpec("winsorized"), 10) == Fraction(5, 10)
        assert rbp_theoretical(EstimatorSpec.make("mom", k=5), 10) == Fraction(3, 10)
        assert rbp_theoretical(EstimatorSpec.make("lm_trimmed", epsilon=0.2), 20) == Fraction(5, 40)

    @pytest.mark.parametrize("n", range(4, 60))
    def test_winsorized_dominates(self, n):
        w = rbp_theoretical(EstimatorSpec("winsorized"), n)
        rivals = [EstimatorSpec("mean"), EstimatorSpec("catoni")]
        rivals += [EstimatorSpec.make("mom", k=k) for k in range(1, n // 2 + 1)]
        rivals += [EstimatorSpec.make("lm_trimmed", epsilon=e) for e in (0.0, 0.1, 0.2, 0.3, 0.45)]
        for r in rivals:
            assert w > rbp_theoretical(r, n), r.label
