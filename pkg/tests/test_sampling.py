import time

import numpy as np
import pytest

import oracles
from conftest import random_fuzzy, random_rough
from softcompare.distributional import distribution_over_rcs, evidential_expectations, fuzzy_rand_expectation_fast
from softcompare.errors import OutOfRange, ValidationError
from softcompare.metrics import PARTITION, RAND
from softcompare.model import HardClustering, RoughClustering, SoftClustering
from softcompare.sampling import (
    NESTED_WARNING,
    SamplePlan,
    approx_expectation_fuzzy,
    approx_expectations_evidential,
    approx_interval_rough,
    approximate,
    draw_hard,
    draw_rc,
    hoeffding_epsilon,
    make_rng,
    required_samples,
)


def test_required_samples():
    assert required_samples(0.05, 0.05) == 738
    assert required_samples(0.01, 0.05) == 18445
    assert required_samples(0.02, 0.05) == 4612
    assert required_samples(0.5, 1 - 1e-9) >= 1
    with pytest.raises(OutOfRange):
        required_samples(0.0, 0.05)
    assert hoeffding_epsilon(10_000, 0.05) == pytest.approx(0.01358, abs=1e-5)


def test_plan_defaults_and_validation():
    assert SamplePlan().samples == 4612
    with pytest.raises(OutOfRange):
        SamplePlan(samples=-1)
    with pytest.raises(ValidationError):
        SamplePlan(mode="bootstrap")


def test_draw_hard_rough_is_uniform(fixture_r):
    labels = draw_hard(fixture_r.to_soft(), make_rng(42), size=10_000)
    freq = (labels[:, 0] == 0).mean()
    assert abs(freq - 0.5) <= 0.02
    assert set(map(tuple, labels[:, 1:].tolist())) == {(0, 1)}


def test_draw_hard_fuzzy_and_hard(fixture_f1, c_hard):
    labels = draw_hard(fixture_f1, make_rng(1), size=10_000)
    assert abs((labels[:, 0] == 0).mean() - 0.5) <= 0.02
    h = SoftClustering.from_hard(c_hard)
    assert all(draw_hard(h, make_rng(s)) == c_hard for s in range(20))


def test_draw_rc(fixture_e, fixture_r, fixture_f1):
    regions = draw_rc(fixture_e, make_rng(3), size=10_000)
    assert abs((regions[:, 0] == 0b11).mean() - 0.4) <= 0.02
    assert draw_rc(fixture_r.to_soft(), make_rng(0)) == fixture_r
    rc = draw_rc(fixture_f1, make_rng(0))
    assert rc.is_hard


def test_rough_interval_estimates(fixture_r, c_hard):
    r = approx_interval_rough(fixture_r, RoughClustering.from_hard(c_hard), RAND, SamplePlan(samples=100, seed=9))
    assert (r.lower, r.upper) == pytest.approx((0.0, 2 / 3))
    h = RoughClustering.from_hard(c_hard)
    r = approx_interval_rough(h, h, RAND, SamplePlan(samples=1))
    assert (r.lower, r.upper) == (0.0, 0.0)


def test_rough_estimates_stay_inside():
    rng = np.random.default_rng(8)
    for i in range(200):
        n, k = int(rng.integers(2, 6)), int(rng.integers(2, 4))
        r1, r2 = random_rough(rng, n, k), random_rough(rng, n, k)
        lo, hi = oracles.rough_interval(r1.regions, r2.regions)
        est = approx_interval_rough(r1, r2, RAND, SamplePlan(samples=int(rng.integers(1, 40)), seed=i))
        assert lo - 1e-12 <= est.lower <= est.upper <= hi + 1e-12


def test_fuzzy_estimate(fixture_f1, c_hard):
    h = SoftClustering.from_hard(c_hard)
    r = approx_expectation_fuzzy(fixture_f1, h, RAND, SamplePlan(samples=10_000, seed=7))
    assert abs(r.estimate - 1 / 3) <= 0.02
    assert r.epsilon == pytest.approx(0.0136, abs=1e-4)
    r = approx_expectation_fuzzy(h, SoftClustering.from_hard(HardClustering(c_hard.frame, (0, 1, 1))),
                                 RAND, SamplePlan(samples=50))
    assert r.lower == r.upper == pytest.approx(2 / 3)


def test_evidential_exact_inner(fixture_e, c_hard):
    h = SoftClustering.from_hard(c_hard)
    r = approx_expectations_evidential(fixture_e, h, RAND, SamplePlan(samples=10_000, mode="evidential-exact-inner"))
    assert r.lower == pytest.approx(0.0, abs=0.01)
    assert r.upper == pytest.approx(4 / 15, abs=0.01)
    r = approx_expectations_evidential(h, h, PARTITION, SamplePlan(samples=5, mode="evidential-exact-inner"))
    assert (r.lower, r.upper) == (0.0, 0.0)


def test_nested_bias_with_one_inner_sample(fixture_e, c_hard):
    h = SoftClustering.from_hard(c_hard)
    plan = SamplePlan(samples=20_000, mode="evidential-nested", inner_samples=1, seed=3)
    r = approx_expectations_evidential(fixture_e, h, RAND, plan)
    assert r.lower == r.upper
    # a single inner draw cannot reach the max of {0, 2/3} every time: 0.4 * 0.5 * 2/3 = 2/15
    assert r.upper < 4 / 15 - 0.05
    assert r.upper == pytest.approx(2 / 15, abs=0.01)
    assert NESTED_WARNING in r.warnings


def test_determinism_across_threads(fixture_e, c_hard):
    h = SoftClustering.from_hard(c_hard)
    a = approximate(fixture_e, h, RAND, SamplePlan(samples=5000, seed=11, workers=1))
    b = approximate(fixture_e, h, RAND, SamplePlan(samples=5000, seed=11, workers=4))
    assert a.payload() == b.payload()
    assert approximate(fixture_e, h, RAND, SamplePlan(samples=5000, seed=11)).payload() == a.payload()


def test_dispatch(fixture_r, fixture_f1, fixture_e, c_hard):
    h = SoftClustering.from_hard(c_hard)
    assert approximate(fixture_r.to_soft(), h).mode == "rough-interval"
    assert approximate(fixture_f1, h).mode == "fuzzy-expectation"
    assert approximate(fixture_e, h).mode == "evidential-exact-inner"
    assert approximate(distribution_over_rcs(fixture_e), h).mode == "evidential-exact-inner"


def test_unbiased_over_seeds(fixture_f1, fixture_e, c_hard):
    h = SoftClustering.from_hard(c_hard)
    est = np.array([approx_expectation_fuzzy(fixture_f1, h, RAND, SamplePlan(samples=50, seed=s)).estimate
                    for s in range(1000)])
    se = est.std(ddof=1) / np.sqrt(len(est))
    assert abs(est.mean() - 1 / 3) <= 3 * se
    exact = evidential_expectations(fixture_e, h)
    up = np.array([approx_expectations_evidential(fixture_e, h, RAND,
                                                  SamplePlan(samples=20, seed=s, mode="evidential-exact-inner")).upper
                   for s in range(1000)])
    se = up.std(ddof=1) / np.sqrt(len(up))
    assert abs(up.mean() - exact.upper) <= 3 * se


def _time(fn, reps=5):
    best = float("inf")
    for _ in range(reps):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def test_runtime_linear_in_samples():
    rng = np.random.default_rng(0)
    f1, f2 = random_fuzzy(rng, 300, 3, sparse=False), random_fuzzy(rng, 300, 3, sparse=False)
    t1 = _time(lambda: approx_expectation_fuzzy(f1, f2, RAND, SamplePlan(samples=8192)))
    t2 = _time(lambda: approx_expectation_fuzzy(f1, f2, RAND, SamplePlan(samples=16384)))
    assert 1.6 <= t2 / t1 <= 2.6, (t1, t2)


def test_estimator_matches_closed_form():
    rng = np.random.default_rng(4)
    f1, f2 = random_fuzzy(rng, 40, 3), random_fuzzy(rng, 40, 3)
    r = approx_expectation_fuzzy(f1, f2, RAND, SamplePlan(samples=20_000, seed=1))
    assert abs(r.estimate - fuzzy_rand_expectation_fast(f1, f2)) <= r.epsilon
