import numpy as np
import pytest

from calibdist import (
    BadWidth,
    IntervalEstimatorConfig,
    SeededRng,
    gap_quadratic,
    induce_gamma_exact,
    make_empirical,
    rintce_exact,
    rintce_hat,
    sintce_exact,
    sintce_hat,
)
from calibdist.interval import default_shifts, width_exponent

from _oracles import random_distribution, rintce_mc_direct


def test_rintce_zero_on_calibrated_endpoints():
    d = make_empirical([(0.0, 0), (1.0, 1)])
    for width in (1.0, 0.5, 0.125, 0.3):
        assert rintce_exact(d, width) == 0.0
        assert rintce_hat(d, width, 50, SeededRng(1)) == 0.0


def test_rintce_single_sample():
    d = make_empirical([(0.5, 1)])
    assert rintce_exact(d, 1.0) == pytest.approx(0.5, abs=1e-15)
    assert rintce_hat(d, 1.0, 200, SeededRng(2)) == pytest.approx(0.5, abs=1e-15)


def test_rintce_two_point_closed_form():
    # residuals +-0.75 at distance 0.5: with width 1 the points share a bin
    # with probability 1/2 (contribution 0, the residuals cancel) and split
    # otherwise (contribution 0.75); with width exactly 0.5 a bin boundary
    # always falls between them.
    d = make_empirical([(0.25, 1), (0.75, 0)])
    assert rintce_exact(d, 1.0) == pytest.approx(0.375, abs=1e-12)
    assert rintce_exact(d, 0.5) == pytest.approx(0.75, abs=1e-12)


def test_rintce_matches_direct_monte_carlo():
    rng = np.random.default_rng(20)
    for _ in range(10):
        d = random_distribution(rng, max_n=40)
        width = float(rng.choice([1.0, 0.5, 0.3, 0.17]))
        ours = rintce_hat(d, width, 300, SeededRng(99))
        direct = rintce_mc_direct(d, width, 300, SeededRng(99))
        assert ours == pytest.approx(direct, abs=1e-12)


def test_rintce_hat_converges_to_exact():
    rng = np.random.default_rng(21)
    for _ in range(5):
        d = random_distribution(rng, max_n=80)
        exact = rintce_exact(d, 0.25)
        est = rintce_hat(d, 0.25, 20_000, SeededRng(5))
        assert est == pytest.approx(exact, abs=0.02)


def test_rintce_monotone_in_width():
    # doubling the width never increases the exact randomized-shift error
    rng = np.random.default_rng(22)
    for _ in range(20):
        d = random_distribution(rng, max_n=100)
        for eps in (0.05, 0.1, 0.25, 0.5):
            assert rintce_exact(d, 2 * eps) <= rintce_exact(d, eps) + 1e-12


def test_rintce_range_and_errors():
    rng = np.random.default_rng(23)
    for _ in range(20):
        d = random_distribution(rng, max_n=50)
        val = rintce_exact(d, 0.31)
        assert 0.0 <= val <= 1.0
    with pytest.raises(BadWidth):
        rintce_exact(make_empirical([(0.5, 1)]), 0.0)
    with pytest.raises(BadWidth):
        rintce_hat(make_empirical([(0.5, 1)]), 1.5, 10, SeededRng(0))


def test_width_exponent_rule():
    assert width_exponent(0.01) == 8  # eps/4 < 2^-8 = 0.0039.. <= eps/2
    assert width_exponent(0.5) == 2
    assert default_shifts(0.01) >= 1


def test_estimator_config_validation():
    from calibdist.errors import BadConfig

    with pytest.raises(BadConfig):
        IntervalEstimatorConfig(epsilon=0.0)
    with pytest.raises(BadConfig):
        IntervalEstimatorConfig(epsilon=1.0)
    with pytest.raises(BadConfig):
        IntervalEstimatorConfig(epsilon=0.1, shifts_m=0)
    assert IntervalEstimatorConfig(epsilon=0.01).resolved_shifts() == default_shifts(0.01)


def test_sintce_calibrated_floor():
    d = make_empirical([(0.0, 0), (1.0, 1)])
    assert sintce_exact(d, 0.01) == pytest.approx(2**-8, abs=1e-15)
    cfg = IntervalEstimatorConfig(epsilon=0.01, shifts_m=100, rng=SeededRng(3))
    assert sintce_hat(d, cfg) == pytest.approx(2**-8, abs=1e-15)


def test_sintce_single_sample():
    # every width >= the support sees the full 0.5 residual, so the dyadic
    # minimization bottoms out at width 2^-2 from k* = 2
    d = make_empirical([(0.5, 1)])
    assert sintce_exact(d, 0.5) == pytest.approx(0.75, abs=1e-12)


def test_sintce_gap_fixture_stays_large():
    gamma = induce_gamma_exact(gap_quadratic(0.2))
    assert sintce_exact(gamma, 0.01) >= 0.2


def test_sintce_deterministic_given_seed():
    rng = np.random.default_rng(24)
    d = random_distribution(rng, max_n=120)
    cfg = lambda: IntervalEstimatorConfig(epsilon=0.05, shifts_m=500, rng=SeededRng(11))
    assert sintce_hat(d, cfg()) == sintce_hat(d, cfg())


def test_sintce_sits_in_the_distance_chain():
    # post-processing distance <= sintce (+ estimator error) <= 6 sqrt(ldce)
    from calibdist import ldce, udce_bruteforce

    slack = 3 * (0.005 + 0.005) + 1e-6
    rng = np.random.default_rng(26)
    checked = 0
    while checked < 15:
        d = random_distribution(rng, max_n=60)
        if len(np.unique(d.v)) > 9:
            continue
        checked += 1
        s = sintce_exact(d, 0.01)
        assert udce_bruteforce(d) <= s + 0.02
        assert s <= 6 * np.sqrt(ldce(d) + slack) + 0.02


def test_sintce_range():
    rng = np.random.default_rng(25)
    for _ in range(10):
        d = random_distribution(rng, max_n=60)
        val = sintce_hat(d, IntervalEstimatorConfig(epsilon=0.1, shifts_m=50, rng=SeededRng(4)))
        assert 0.0 < val <= 2.0
        exact = sintce_exact(d, 0.1)
        assert 0.0 < exact <= 2.0
