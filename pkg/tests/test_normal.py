"""Normal CDF, empirical Kolmogorov distance, bound evaluator, simulation."""

import math

import mpmath
import numpy as np
import pytest

from treecross import (
    CrossingIndex,
    EmpiricalSummary,
    GuardError,
    adjacency_event_probability,
    adjacency_event_probability_exact,
    empirical_kolmogorov,
    exact_mean,
    exact_variance,
    make_rng,
    normal_cdf,
    normal_cdf_array,
    rate_fit,
    simulate_standardized,
    theoretical_bound,
    worker_rng,
)

mpmath.mp.dps = 30


class TestNormalCdf:
    def test_reference_grid(self):
        zs = np.linspace(-8.0, 8.0, 10_001)
        got = normal_cdf_array(zs)
        ref = np.array([float(mpmath.ncdf(z)) for z in zs])
        assert np.max(np.abs(got - ref)) <= 1e-10

    def test_half_at_zero(self):
        assert normal_cdf(0.0) == 0.5

    def test_two_sigma_quantile(self):
        assert abs(normal_cdf(1.959963985) - 0.975) < 1e-7

    def test_deep_tail(self):
        assert 0 < normal_cdf(-8.0) < 1e-14

    def test_monotone(self):
        zs = np.linspace(-8.5, 8.5, 10_000)
        assert np.all(np.diff(normal_cdf_array(zs)) >= 0)

    def test_symmetry(self):
        zs = np.linspace(0.0, 8.0, 4001)
        dev = np.abs(normal_cdf_array(-zs) - (1.0 - normal_cdf_array(zs)))
        assert dev.max() <= 1e-12

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            normal_cdf(float("nan"))


def summary_from(samples):
    arr = np.sort(np.asarray(samples, dtype=np.float64))
    mean = float(arr.mean()) if arr.size else 0.0
    return EmpiricalSummary(n=0, sample_count=arr.size, samples=arr,
                            mean=mean, variance=0.0)


class TestEmpiricalKolmogorov:
    def test_single_sample_at_zero(self):
        assert empirical_kolmogorov(summary_from([0.0])) == pytest.approx(0.5)

    def test_all_equal_at_three(self):
        # left term Phi(3) - 0/N dominates 1 - Phi(3)
        d = empirical_kolmogorov(summary_from([3.0] * 50))
        assert d == pytest.approx(normal_cdf(3.0))

    def test_gaussian_samples_small_distance(self):
        rng = make_rng(77)
        d = empirical_kolmogorov(summary_from(rng.standard_normal(100_000)))
        assert d < 0.01  # 95% KS radius is ~0.0043

    def test_matches_grid_brute_force(self):
        rng = make_rng(3)
        x = np.sort(rng.standard_normal(100))
        d = empirical_kolmogorov(summary_from(x))
        zs = np.linspace(-5, 5, 200_001)
        ecdf = np.searchsorted(x, zs, side="right") / x.size
        brute = np.max(np.abs(ecdf - normal_cdf_array(zs)))
        assert abs(d - brute) < 1e-3  # grid resolution error only

    def test_permutation_invariance(self):
        rng = make_rng(4)
        x = rng.standard_normal(500)
        assert empirical_kolmogorov(summary_from(x)) == empirical_kolmogorov(
            summary_from(x[::-1]))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            empirical_kolmogorov(summary_from([]))


class TestTheoreticalBound:
    def test_hand_expansion_n10(self):
        rep = theoretical_bound(10)
        mu = 8.4
        sigma = math.sqrt(6783 / 500)  # exact variance at n = 10
        term1 = 6 * mu * 28.0**2 / sigma**3
        term2 = 2 * mu * math.sqrt(2112 * 10) / sigma**2
        assert rep.mu == pytest.approx(mu, rel=1e-12)
        assert rep.sigma == pytest.approx(sigma, rel=1e-12)
        assert rep.term1 == pytest.approx(term1, rel=1e-12)
        assert rep.term2 == pytest.approx(term2, rel=1e-12)
        assert rep.total == rep.term1 + rep.term2

    def test_terms_positive(self):
        for n in (5, 17, 400):
            rep = theoretical_bound(n)
            assert rep.term1 > 0 and rep.term2 > 0
            assert rep.a_bound == 4 * (n - 3)

    def test_decreasing_for_large_n(self):
        totals = [theoretical_bound(n).total for n in range(100, 2000, 50)]
        assert all(a > b for a, b in zip(totals, totals[1:]))

    def test_sqrt_n_scaling_constant(self):
        # sqrt(n) * total converges to 16*45^1.5 + 15*sqrt(2112)
        limit = 16 * 45**1.5 + 15 * math.sqrt(2112)
        for n in (10**5, 10**6):
            val = n * theoretical_bound(n).total ** 2
            assert abs(val / limit**2 - 1) < 0.10

    def test_guard(self):
        with pytest.raises(GuardError):
            theoretical_bound(4)


class TestSimulation:
    def test_moments_match_formulas(self):
        n, samples = 100, 100_000
        s = simulate_standardized(n, samples, worker_rng(31, 0))
        mu = float(exact_mean(n))
        sigma = math.sqrt(float(exact_variance(n)))
        assert abs(s.mean - mu) < 4 * sigma / math.sqrt(samples)
        assert abs(s.variance / float(exact_variance(n)) - 1) < 0.10
        assert s.sample_count == samples
        assert np.all(np.diff(s.samples) >= 0)

    def test_reproducible(self):
        a = simulate_standardized(20, 5000, worker_rng(9, 0))
        b = simulate_standardized(20, 5000, worker_rng(9, 0))
        assert np.array_equal(a.samples, b.samples)
        assert a.mean == b.mean and a.variance == b.variance

    def test_guards(self):
        with pytest.raises(GuardError):
            simulate_standardized(4, 10, make_rng(0))
        with pytest.raises(GuardError):
            simulate_standardized(10, 0, make_rng(0))


class TestAdjacencyEvent:
    def test_small_n_estimate_is_probability(self):
        p = adjacency_event_probability(
            20, CrossingIndex(1, 2, 3, 4), CrossingIndex(5, 6, 7, 8), 20_000, make_rng(1))
        assert 0 <= p <= 1  # 32/n = 1.6 is vacuous here

    def test_exact_n8_vs_monte_carlo(self):
        # the two sites cover all of 1..8, so every spanning tree contains
        # a cut edge between them and the event is certain
        i, j = CrossingIndex(1, 2, 3, 4), CrossingIndex(5, 6, 7, 8)
        exact = adjacency_event_probability_exact(8, i, j)
        assert exact == 1
        est = adjacency_event_probability(8, i, j, 100_000, make_rng(2))
        se = math.sqrt(float(exact) * (1 - float(exact)) / 100_000)
        assert abs(est - float(exact)) <= 4 * se

    def test_uncovered_vertices_leave_slack(self):
        # with spare vertices outside both sites the event is no longer
        # certain, and the estimate respects the 32/n union bound
        est = adjacency_event_probability(
            12, CrossingIndex(1, 2, 3, 4), CrossingIndex(5, 6, 7, 8), 50_000, make_rng(5))
        assert 0.5 < est < 1.0
        assert est <= 32 / 12

    def test_shared_vertex_rejected(self):
        with pytest.raises(ValueError):
            adjacency_event_probability(
                20, CrossingIndex(1, 2, 3, 4), CrossingIndex(4, 5, 6, 7), 10, make_rng(0))


class TestRateFit:
    def test_recovers_inverse_sqrt(self):
        pts = [(float(n), n**-0.5) for n in (50, 100, 200, 400)]
        slope, intercept = rate_fit(pts)
        assert abs(slope - (-0.5)) < 1e-9
        assert abs(intercept) < 1e-9

    def test_recovers_inverse_linear(self):
        pts = [(float(n), 3.0 / n) for n in (10, 20, 40, 80)]
        slope, intercept = rate_fit(pts)
        assert abs(slope - (-1.0)) < 1e-9
        assert abs(intercept - math.log(3.0)) < 1e-9

    def test_guards(self):
        with pytest.raises(GuardError):
            rate_fit([(10.0, 0.1), (20.0, 0.05)])
        with pytest.raises(ValueError):
            rate_fit([(10.0, 0.1), (20.0, 0.0), (40.0, 0.01)])
