import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from observer_knowledge.bayes import (
    CountData,
    HypothesisState,
    Prior,
    _panel_breakpoints,
    amalgamate,
    effective_density,
    effective_density_quadrature,
    hypothesis_update,
    mean_check,
    posterior,
    posterior_density_at,
    posterior_mean,
)
from observer_knowledge.errors import DegeneratePosteriorError, DomainError
from observer_knowledge.quadrature import panel_nodes

UNIFORM = Prior.uniform()
TABLE = Prior.tabulated([-1.0, -0.2, 0.5, 1.0], [0.1, 2.0, 1.0, 0.3])
PRIORS = [UNIFORM, Prior.beta_prior(2.0, 5.0), Prior.beta_prior(0.7, 1.3), TABLE]


def integrate_density(p, n_nodes=128):
    """Integrate the public density with composite Gauss-Legendre panels."""
    bp = _panel_breakpoints(*p.exponents(), p.prior.knots())
    total = 0.0
    for lo, hi in zip(bp, bp[1:]):
        s, w = panel_nodes(lo, hi, n_nodes)
        total += sum(wi * p.density(si) for si, wi in zip(s, w))
    return total


class TestCountData:
    def test_amalgamate(self):
        assert amalgamate(CountData(3, 1), CountData(2, 2)) == CountData(5, 3)

    def test_identity(self):
        d = CountData(7, 4)
        assert amalgamate(CountData(0, 0), d) == d

    @pytest.mark.parametrize("bad", [-1, 1.5, True])
    def test_rejects_bad_counts(self, bad):
        with pytest.raises(DomainError):
            CountData(bad, 0)


class TestPosterior:
    def test_no_data_returns_prior(self):
        p = posterior(UNIFORM, CountData(0, 0))
        for s in (-1.0, -0.3, 0.0, 0.8, 1.0):
            assert posterior_density_at(p, s) == pytest.approx(0.5, rel=1e-14)

    def test_peak_location(self):
        p = posterior(UNIFORM, CountData(700, 300))
        s = np.linspace(-1, 1, 20001)
        dens = [p.density(v) for v in s]
        assert s[int(np.argmax(dens))] == pytest.approx(0.4, abs=1e-4)

    @pytest.mark.parametrize("d", [(0, 0), (3, 1), (40, 2), (500, 800)])
    def test_beta11_is_uniform(self, d):
        pu = posterior(UNIFORM, CountData(*d))
        pb = posterior(Prior.beta_prior(1, 1), CountData(*d))
        for s in np.linspace(-1, 1, 41):
            assert pb.density(s) == pytest.approx(pu.density(s), rel=1e-12, abs=1e-300)

    def test_density_point_values(self):
        assert posterior_density_at(posterior(UNIFORM, CountData(0, 0)), 0.3) == 0.5
        assert posterior_density_at(posterior(UNIFORM, CountData(1, 0)), -1.0) == 0.0
        # (1 - s^2) normalised by its integral 4/3, evaluated at 0
        assert posterior_density_at(posterior(UNIFORM, CountData(1, 1)), 0.0) == pytest.approx(0.75, rel=1e-14)

    def test_endpoint_with_zero_exponent_keeps_prior_value(self):
        p = posterior(UNIFORM, CountData(0, 3))
        # (1-s)^3 * 1/2 normalised: 4 * (1-s)^3 / 16 at s=-1 is 2
        assert posterior_density_at(p, -1.0) == pytest.approx(2.0, rel=1e-13)
        assert posterior_density_at(p, 1.0) == 0.0

    def test_sigma_out_of_range(self):
        with pytest.raises(DomainError):
            posterior_density_at(posterior(UNIFORM, CountData(1, 1)), 1.5)

    @pytest.mark.parametrize("prior", PRIORS, ids=["uniform", "beta25", "beta0713", "table"])
    @pytest.mark.parametrize("d", [(0, 0), (8, 2), (13, 40)])
    def test_normalised_against_adaptive_quadrature(self, prior, d):
        p = posterior(prior, CountData(*d))
        val, err = integrate.quad(p.density, -1, 1, points=[-0.2, 0.5], limit=200, epsabs=1e-13)
        assert val == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("prior", [UNIFORM, Prior.beta_prior(2, 5), TABLE], ids=["u", "b", "t"])
    @pytest.mark.parametrize("d", [(10**4, 3 * 10**4), (999_000, 1000), (500_000, 500_000), (10**6, 0)])
    def test_normalised_at_large_counts(self, prior, d):
        p = posterior(prior, CountData(*d))
        assert integrate_density(p) == pytest.approx(1.0, abs=1e-9)

    def test_all_zero_table_is_degenerate(self):
        with pytest.raises(DegeneratePosteriorError):
            Prior.tabulated([-1, 0, 1], [0, 0, 0])

    def test_invalid_priors(self):
        with pytest.raises(DomainError):
            Prior.beta_prior(0, 1)
        with pytest.raises(DomainError):
            Prior.tabulated([0.5, 0.2], [1, 1])
        with pytest.raises(DomainError):
            Prior.tabulated([-1, 1], [1, -1])


class TestSequentialUpdate:
    @pytest.mark.parametrize("prior", PRIORS, ids=["uniform", "beta25", "beta0713", "table"])
    @pytest.mark.parametrize("d1,d2", [((3, 1), (2, 2)), ((0, 0), (5, 9)), ((120, 40), (33, 77))])
    def test_matches_amalgamated_data(self, prior, d1, d2):
        d1, d2 = CountData(*d1), CountData(*d2)
        chained = posterior(posterior(prior, d1).as_prior(), d2)
        pooled = posterior(prior, amalgamate(d1, d2))
        for s in np.linspace(-0.999, 0.999, 37):
            assert chained.density(s) == pytest.approx(pooled.density(s), rel=1e-12, abs=1e-12)


class TestMeans:
    def test_symmetric(self):
        assert posterior_mean(posterior(UNIFORM, CountData(0, 0))) == 0.0

    def test_eight_two(self):
        assert posterior_mean(posterior(UNIFORM, CountData(8, 2))) == pytest.approx(0.5, abs=1e-15)

    def test_hundred_up(self):
        m = posterior_mean(posterior(UNIFORM, CountData(100, 0)))
        assert m == pytest.approx(100 / 102, abs=1e-15)

    @pytest.mark.parametrize("alpha,beta,d", [(2, 5, (3, 4)), (0.5, 0.5, (10, 0)), (3, 1, (0, 7))])
    def test_beta_formula_against_adaptive_quadrature(self, alpha, beta, d):
        p = posterior(Prior.beta_prior(alpha, beta), CountData(*d))
        expected = (d[0] - d[1] + alpha - beta) / (sum(d) + alpha + beta)
        assert posterior_mean(p) == pytest.approx(expected, abs=1e-14)
        val, _ = integrate.quad(lambda s: s * p.density(s), -1, 1, limit=200)
        assert val == pytest.approx(expected, abs=1e-8)

    @pytest.mark.parametrize("d", [(0, 0), (8, 2), (100, 0), (7000, 3000), (1, 9999), (10**6, 3)])
    def test_tabulated_routes_agree(self, d):
        p = posterior(TABLE, CountData(*d))
        _, residual = mean_check(p)
        assert residual <= 1e-9

    def test_tabulated_mean_against_adaptive_quadrature(self):
        p = posterior(TABLE, CountData(8, 2))
        val, _ = integrate.quad(lambda s: s * p.density(s), -1, 1, points=[-0.2, 0.5], epsabs=1e-13)
        assert posterior_mean(p) == pytest.approx(val, abs=1e-10)


class TestEffectiveDensity:
    def test_no_data(self):
        rho = effective_density(posterior(UNIFORM, CountData(0, 0)))
        np.testing.assert_array_equal(rho.matrix, np.eye(2) / 2)

    def test_eight_two(self):
        rho = effective_density(posterior(UNIFORM, CountData(8, 2)))
        np.testing.assert_allclose(rho.matrix, np.diag([9 / 12, 3 / 12]), atol=1e-15)

    @pytest.mark.parametrize("n", [10**3, 10**4, 10**5])
    def test_large_data_limit(self, n):
        up = int(0.3 * n)
        rho = effective_density(posterior(UNIFORM, CountData(up, n - up)))
        np.testing.assert_allclose(np.diag(rho.matrix).real, [up / n, (n - up) / n], atol=2.0 / n)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(0, 10**4), st.integers(0, 10**4))
    def test_closed_form_matches_quadrature(self, up, down):
        p = posterior(UNIFORM, CountData(up, down))
        closed = effective_density(p).matrix
        np.testing.assert_allclose(closed, np.diag([up + 1, down + 1]) / (up + down + 2), atol=1e-12, rtol=0)
        np.testing.assert_allclose(effective_density_quadrature(p).matrix, closed, atol=1e-9, rtol=0)


class TestPriorIndependence:
    @pytest.mark.parametrize("q", [0.1, 0.5, 0.73])
    def test_means_converge(self, q):
        n = 10**4
        d = CountData(round(n * q), n - round(n * q))
        means = [posterior_mean(posterior(p, d)) for p in (UNIFORM, Prior.beta_prior(2, 5), TABLE)]
        assert max(means) - min(means) <= 0.01
        assert all(abs(m - (2 * q - 1)) <= 0.01 for m in means)


class TestHypothesis:
    def test_uninformative(self):
        h = HypothesisState(0.5, 0.5, 0.5)
        assert all(hypothesis_update(h, n) == pytest.approx(0.5) for n in (1, 5, 100))

    def test_twenty_repeats(self):
        expected = 1 / (1 + Fraction(99) / 2**20)
        got = hypothesis_update(HypothesisState(0.01, 1.0, 0.5), 20)
        assert got == pytest.approx(float(expected), rel=1e-14)
        assert got == pytest.approx(0.99991, abs=1e-5)

    @pytest.mark.parametrize("p", [0.0, 1.0])
    def test_certainty_never_moves(self, p):
        assert hypothesis_update(HypothesisState(p, 0.3, 0.9), 50) == p

    def test_refuted(self):
        assert hypothesis_update(HypothesisState(0.7, 0.0, 0.4), 3) == 0.0

    def test_both_likelihoods_zero(self):
        with pytest.raises(DomainError):
            hypothesis_update(HypothesisState(0.5, 0.0, 0.0), 1)

    def test_huge_n_is_stable(self):
        assert hypothesis_update(HypothesisState(1e-6, 0.6, 0.5), 10**7) == 1.0

    @given(
        st.floats(0.001, 0.999),
        st.floats(0.01, 1.0),
        st.floats(0.0, 0.99),
    )
    def test_monotone_to_one(self, p_h, like_h, frac):
        h = HypothesisState(p_h, like_h, like_h * frac)
        vals = [hypothesis_update(h, n) for n in range(1, 60)]
        assert all(b >= a for a, b in zip(vals, vals[1:]))
        if frac < 0.9:
            assert hypothesis_update(h, 5000) == pytest.approx(1.0, abs=1e-9)


class TestLogBetaKernel:
    @staticmethod
    def exact(a, b):
        # 2**(a+b+1) a! b! / (a+b+1)! with integers, logged at the end
        num = math.factorial(a) * math.factorial(b) << (a + b + 1)
        return math.log(num) - math.log(math.factorial(a + b + 1))

    @pytest.mark.parametrize(
        "a,b", [(0, 0), (5, 3), (19, 40), (200_000, 30), (150_000, 150_000), (7, 250_000), (190_000, 2_000)]
    )
    def test_against_integer_arithmetic(self, a, b):
        from observer_knowledge.bayes import _log_beta_kernel

        assert _log_beta_kernel(a, b) == pytest.approx(self.exact(a, b), abs=1e-9)
