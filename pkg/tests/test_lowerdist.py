import numpy as np
import pytest

from calibdist import (
    BadEps,
    Grid,
    gap_pa_pair,
    induce_gamma_exact,
    kce_exact,
    KernelKind,
    ldce,
    ldce_both_forms,
    ldce_dual_solution,
    ldce_primal_solution,
    make_empirical,
    smce,
)

from _oracles import random_distribution

SLACK = 3 * (0.005 + 0.005) + 1e-6


def test_single_sample_forced_coupling():
    # y is always 1, so the calibrated coordinate must sit at u = 1
    d = make_empirical([(0.5, 1)])
    assert ldce(d) == pytest.approx(0.5, abs=1e-9)
    p, du = ldce_both_forms(d)
    assert p == pytest.approx(0.5, abs=1e-9)
    assert du == pytest.approx(0.5, abs=1e-9)


def test_perfectly_calibrated_endpoints():
    d = make_empirical([(0.0, 0), (1.0, 1)])
    p, du = ldce_both_forms(d)
    assert p == pytest.approx(0.0, abs=1e-9)
    assert du == pytest.approx(0.0, abs=1e-9)


def test_bad_eps():
    d = make_empirical([(0.5, 1)])
    with pytest.raises(BadEps):
        ldce(d, eps1=0.0)
    with pytest.raises(BadEps):
        ldce(d, eps2=0.7)
    with pytest.raises(BadEps):
        ldce(d, form="nonsense")


def test_strong_duality_random_instances():
    rng = np.random.default_rng(40)
    for _ in range(30):
        d = random_distribution(rng, max_n=30)
        p, du = ldce_both_forms(d)
        assert p == pytest.approx(du, abs=1e-6)


def test_pa_gap_lower_distance_golden():
    # Exact optimum of the coupling LP on the alpha=0.25 gap distribution.
    # The value is 1/6: keep a third of each residual in place and route the
    # label imbalance through the u = 1/2 bucket at cost 1/4 per unit.
    gamma = induce_gamma_exact(gap_pa_pair(0.25)[0])
    val = ldce(gamma)
    assert val == pytest.approx(1 / 6, abs=1e-6)
    # cross-check through the smooth-calibration sandwich
    sm, _ = smce(gamma)
    assert sm == pytest.approx(0.125, abs=1e-9)
    assert 0.5 * val - SLACK <= sm <= 2.0 * val + SLACK


def test_smce_sandwich():
    rng = np.random.default_rng(41)
    for _ in range(25):
        d = random_distribution(rng, max_n=60)
        val = ldce(d)
        sm, _ = smce(d)
        assert 0.5 * val - SLACK <= sm <= 2.0 * val + SLACK


def test_kernel_upper_bound():
    rng = np.random.default_rng(42)
    for _ in range(25):
        d = random_distribution(rng, max_n=60)
        val = ldce(d)
        assert kce_exact(d, KernelKind.LAPLACE) <= np.sqrt(val + SLACK)


def test_monotone_refinement():
    # halving eps2 can move the value by at most twice the new radius
    rng = np.random.default_rng(43)
    for _ in range(10):
        d = random_distribution(rng, max_n=40)
        eps2 = 0.04
        prev = ldce(d, eps1=0.005, eps2=eps2)
        while eps2 > 0.005:
            new = eps2 / 2
            cur = ldce(d, eps1=0.005, eps2=new)
            assert cur - prev <= 2 * new + 1e-6
            assert prev - cur <= 2 * eps2 + 1e-6
            prev, eps2 = cur, new


def test_primal_solution_is_a_valid_coupling():
    rng = np.random.default_rng(44)
    for _ in range(10):
        d = random_distribution(rng, max_n=25)
        sol = ldce_primal_solution(d)
        assert np.all(sol.mass >= -1e-9)
        # v-marginal matches the observed masses
        np.testing.assert_allclose(sol.mass.sum(axis=0), sol.gamma, atol=1e-8)
        # calibration balance (1-u) * mass(u, y=1) = u * mass(u, y=0) per u
        m1 = sol.mass[:, sol.support_y == 1].sum(axis=1)
        m0 = sol.mass[:, sol.support_y == 0].sum(axis=1)
        np.testing.assert_allclose((1 - sol.u) * m1, sol.u * m0, atol=1e-8)
        # objective matches the transport cost of the plan
        cost = np.abs(sol.u[:, None] - sol.support_v[None, :])
        assert float((cost * sol.mass).sum()) == pytest.approx(sol.objective, abs=1e-9)


def test_dual_solution_is_feasible():
    rng = np.random.default_rng(45)
    for _ in range(10):
        d = random_distribution(rng, max_n=25)
        sol = ldce_dual_solution(d)
        for r in (sol.r0, sol.r1):
            assert np.all(np.abs(r) <= 1 + 1e-9)
            assert np.all(np.abs(np.diff(r)) <= np.diff(sol.u) + 1e-9)
        assert np.all(np.abs(sol.s) <= 1 + 1e-9)
        # r(u, y) <= (y - u) s(u)
        assert np.all(sol.r0 <= -sol.u * sol.s + 1e-9)
        assert np.all(sol.r1 <= (1 - sol.u) * sol.s + 1e-9)


def test_grid_validation():
    with pytest.raises(BadEps):
        Grid(points=(0.0, 0.5), covering_radius=0.1)  # spacing too wide
    with pytest.raises(BadEps):
        Grid(points=(0.1, 1.0), covering_radius=1.0)  # missing 0
    Grid(points=(0.0, 0.5, 1.0), covering_radius=0.5)
