"""Distribution laws against scipy.stats and quadrature oracles."""

import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import gammaln
from scipy.stats import chisquare, kstest, nbinom, poisson

from zetasums import (
    DiscreteCountLaw,
    ExponentialLaw,
    GammaDistribution,
    GammaLaw,
    GeneralizedGammaDistribution,
    GeneralizedGammaLaw,
    PointMassLaw,
    gamma_cdf,
    gamma_quantile,
    gg_cdf,
    gg_moment,
    gg_quantile,
    gg_sample,
    mixed_poisson_sample,
    negative_binomial_pmf,
)

from oracles import bisection_quantile

GG_CASES = [
    GeneralizedGammaLaw(0.5, 2.0, 1.0),
    GeneralizedGammaLaw(0.5, -1.0, 1.0),
    GeneralizedGammaLaw(1.5, -0.7, 2.0),
    GeneralizedGammaLaw(2.0, 1.0, 3.0),
]


def gamma_pdf(law, x):
    return math.exp(
        law.shape * math.log(law.rate)
        + (law.shape - 1.0) * math.log(x)
        - law.rate * x
        - gammaln(law.shape)
    )


def gg_pdf(law, x):
    return math.exp(
        math.log(abs(law.power))
        + law.shape * math.log(law.rate)
        + (law.power * law.shape - 1.0) * math.log(x)
        - law.rate * x ** law.power
        - gammaln(law.shape)
    )


def merged_chisquare(draws, pmf, top):
    """Chi-square p-value with tail bins merged so every cell expects >= 5."""
    n = len(draws)
    ks = np.arange(top + 1)
    expected = n * pmf(ks)
    observed = np.bincount(np.minimum(draws, top + 1), minlength=top + 2).astype(float)
    expected = np.append(expected, n - expected.sum())
    cut = top + 1
    while cut > 0 and not (
        np.all(expected[:cut] >= 5.0) and expected[cut:].sum() >= 5.0
    ):
        cut -= 1
    obs = np.append(observed[:cut], observed[cut:].sum())
    exp = np.append(expected[:cut], expected[cut:].sum())
    assert np.all(exp >= 5.0)
    return chisquare(obs, exp * (obs.sum() / exp.sum())).pvalue


class TestGammaLaw:
    def test_erlang_cdf_frozen(self):
        # shape 2, rate 1 at x = 2: 1 - 3 e^{-2}
        assert gamma_cdf(GammaLaw(2.0, 1.0), 2.0) == pytest.approx(
            0.5939941502901616, abs=1e-15
        )

    def test_cdf_left_of_origin(self):
        assert gamma_cdf(GammaLaw(2.0, 1.0), -1.0) == 0.0
        assert gamma_cdf(GammaLaw(2.0, 1.0), 0.0) == 0.0

    def test_quantile_roundtrip(self):
        law = GammaLaw(2.3, 1.7)
        q = np.concatenate([[1e-6, 1e-3], np.linspace(0.01, 0.99, 25), [0.999, 1 - 1e-6]])
        back = gamma_cdf(law, gamma_quantile(law, q))
        assert np.max(np.abs(back - q)) <= 1e-10

    def test_quantile_matches_bisection(self):
        law = GammaLaw(2.3, 1.7)
        for q in (0.05, 0.5, 0.95):
            want = bisection_quantile(lambda x: gamma_cdf(law, x), q, 0.0, 100.0)
            assert gamma_quantile(law, q) == pytest.approx(want, abs=1e-9)

    def test_quantile_rejects_endpoints(self):
        with pytest.raises(ValueError):
            gamma_quantile(GammaLaw(2.0, 1.0), 0.0)
        with pytest.raises(ValueError):
            gamma_quantile(GammaLaw(2.0, 1.0), 1.0)

    def test_moments(self):
        law = GammaLaw(2.0, 2.0)
        assert law.mean == pytest.approx(1.0)
        assert law.variance == pytest.approx(0.5)
        assert law.moment(2.0) == pytest.approx(1.5, rel=1e-14)
        assert law.moment(0.5) == pytest.approx(
            math.exp(gammaln(2.5) - gammaln(2.0)) / math.sqrt(2.0), rel=1e-14
        )

    def test_moment_nonexistence(self):
        with pytest.raises(ValueError):
            GammaLaw(0.5, 1.0).moment(-0.5)

    def test_scaled_cdf_identity(self):
        law = GammaLaw(2.0, 2.0)
        doubled = law.scaled(3.0)
        for x in (0.5, 1.0, 4.0):
            assert gamma_cdf(doubled, 3.0 * x) == pytest.approx(
                gamma_cdf(law, x), rel=1e-13
            )

    def test_validation(self):
        with pytest.raises(ValueError):
            GammaLaw(0.0, 1.0)
        with pytest.raises(ValueError):
            GammaLaw(1.0, -1.0)
        with pytest.raises(ValueError):
            GammaLaw(2.0, 2.0).scaled(0.0)


class TestGeneralizedGammaLaw:
    def test_power_one_reduces_to_gamma(self):
        gg = GeneralizedGammaLaw(2.0, 1.0, 3.0)
        gam = GammaLaw(2.0, 3.0)
        x = np.linspace(0.01, 5.0, 50)
        assert np.max(np.abs(gg_cdf(gg, x) - gamma_cdf(gam, x))) <= 1e-12

    def test_transform_positive_power(self):
        # X = G^{1/2} for G ~ Gamma(0.5, 1): P(X <= x) = P(G <= x^2)
        law = GeneralizedGammaLaw(0.5, 2.0, 1.0)
        base = GammaLaw(0.5, 1.0)
        for x in (0.3, 1.0, 2.5):
            assert gg_cdf(law, x) == pytest.approx(gamma_cdf(base, x * x), rel=1e-13)

    def test_transform_negative_power(self):
        # X = 1/G for G ~ Gamma(0.5, 1): P(X <= x) = P(G >= 1/x)
        law = GeneralizedGammaLaw(0.5, -1.0, 1.0)
        base = GammaLaw(0.5, 1.0)
        for x in (0.3, 1.0, 2.5):
            assert gg_cdf(law, x) == pytest.approx(
                1.0 - gamma_cdf(base, 1.0 / x), rel=1e-12
            )

    @pytest.mark.parametrize("law", GG_CASES)
    def test_quantile_roundtrip(self, law):
        q = np.concatenate([[1e-6, 1e-3], np.linspace(0.01, 0.99, 25), [0.999, 1 - 1e-6]])
        back = gg_cdf(law, gg_quantile(law, q))
        assert np.max(np.abs(back - q)) <= 1e-10

    @pytest.mark.parametrize("law", GG_CASES)
    def test_sampler_matches_cdf(self, law):
        rng = np.random.default_rng(2024)
        draws = gg_sample(law, rng, size=100_000)
        assert kstest(draws, lambda x: gg_cdf(law, x)).pvalue > 0.001

    def test_moment_frozen_values(self):
        assert gg_moment(GeneralizedGammaLaw(1.0, 2.0, 1.0), 1.0) == pytest.approx(
            0.886226925452758, rel=1e-14
        )
        assert gg_moment(GeneralizedGammaLaw(5.0, -1.0, 1.0), 2.0) == pytest.approx(
            1.0 / 12.0, rel=1e-14
        )

    def test_moment_against_monte_carlo(self):
        law = GeneralizedGammaLaw(1.0, 2.0, 1.0)
        rng = np.random.default_rng(77)
        draws = gg_sample(law, rng, size=1_000_000)
        for delta in (0.5, 1.0, 2.0):
            mc = float(np.mean(draws ** delta))
            assert mc == pytest.approx(gg_moment(law, delta), rel=0.02)

    def test_moment_nonexistence(self):
        with pytest.raises(ValueError):
            gg_moment(GeneralizedGammaLaw(0.5, -1.0, 1.0), 1.0)
        with pytest.raises(ValueError):
            gg_moment(GeneralizedGammaLaw(1.0, -2.0, 1.0), 2.0)

    def test_scaled_cdf_identity(self):
        for law in GG_CASES:
            scaled = law.scaled(2.5)
            for x in (0.4, 1.0, 3.0):
                assert gg_cdf(scaled, 2.5 * x) == pytest.approx(
                    gg_cdf(law, x), rel=1e-12
                )

    def test_validation(self):
        with pytest.raises(ValueError):
            GeneralizedGammaLaw(1.0, 0.0, 1.0)
        with pytest.raises(ValueError):
            GeneralizedGammaLaw(-1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            GeneralizedGammaLaw(1.0, 1.0, 0.0)


class TestSimpleLaws:
    def test_exponential_matches_unit_shape_gamma(self):
        law = ExponentialLaw(2.0)
        gam = GammaLaw(1.0, 2.0)
        assert law.mean == gam.mean
        assert law.variance == gam.variance
        assert law.moment(1.5) == pytest.approx(gam.moment(1.5), rel=1e-14)
        assert law.scaled(3.0) == ExponentialLaw(2.0 / 3.0)

    def test_point_mass(self):
        law = PointMassLaw(2.0)
        assert law.mean == 2.0
        assert law.variance == 0.0
        assert law.moment(1.5) == pytest.approx(2.0 ** 1.5)
        assert law.scaled(2.0) == PointMassLaw(4.0)
        assert PointMassLaw(0.0).mean == 0.0
        with pytest.raises(ValueError):
            PointMassLaw(-1.0)

    def test_point_mass_sampling(self):
        rng = np.random.default_rng(0)
        assert PointMassLaw(3.0).sample(rng) == 3.0
        assert np.all(PointMassLaw(3.0).sample(rng, size=5) == 3.0)


class TestAnalyticAdapters:
    @pytest.mark.parametrize("t", [-1.0, 0.0, 0.2, 1.0, 3.0])
    def test_gamma_partial_moments_vs_quadrature(self, t):
        law = GammaLaw(2.0, 2.0)
        dist = GammaDistribution(law)
        if t < 0.0:
            # below the support the truncation keeps the full moments
            upm = dist.mean - t
            upm2 = dist.second_moment - 2.0 * t * dist.mean + t * t
        else:
            upm, _ = quad(lambda x: (x - t) * gamma_pdf(law, x), t, np.inf)
            upm2, _ = quad(lambda x: (x - t) ** 2 * gamma_pdf(law, x), t, np.inf)
        assert dist.upper_partial_moment(t) == pytest.approx(upm, abs=1e-10)
        assert dist.upper_partial_moment2(t) == pytest.approx(upm2, abs=1e-10)

    @pytest.mark.parametrize(
        "law",
        [GeneralizedGammaLaw(1.0, 2.0, 1.0), GeneralizedGammaLaw(5.0, -1.0, 1.0)],
    )
    @pytest.mark.parametrize("t", [0.1, 0.5, 2.0])
    def test_gg_partial_moments_vs_quadrature(self, law, t):
        dist = GeneralizedGammaDistribution(law)
        upm, _ = quad(lambda x: (x - t) * gg_pdf(law, x), t, np.inf)
        upm2, _ = quad(lambda x: (x - t) ** 2 * gg_pdf(law, x), t, np.inf)
        assert dist.upper_partial_moment(t) == pytest.approx(upm, abs=1e-9)
        assert dist.upper_partial_moment2(t) == pytest.approx(upm2, abs=1e-9)

    def test_gg_adapter_requires_second_moment(self):
        with pytest.raises(ValueError):
            GeneralizedGammaDistribution(GeneralizedGammaLaw(1.5, -0.7, 2.0))

    def test_abs_moment_delegates_to_law(self):
        dist = GammaDistribution(GammaLaw(2.0, 2.0))
        assert dist.abs_moment(1.5) == pytest.approx(
            GammaLaw(2.0, 2.0).moment(1.5), rel=1e-14
        )


class TestNegativeBinomialPmf:
    def test_matches_scipy(self):
        k = np.arange(0, 60)
        for r, p in [(1.0, 0.3), (2.5, 0.2), (7.0, 0.8)]:
            want = nbinom.pmf(k, r, p)
            got = negative_binomial_pmf(r, p, k)
            assert np.max(np.abs(got - want)) <= 1e-12

    def test_r_one_is_geometric(self):
        k = np.arange(0, 30)
        got = negative_binomial_pmf(1.0, 0.25, k)
        want = 0.25 * 0.75 ** k
        assert np.max(np.abs(got - want)) <= 1e-15

    def test_normalizes(self):
        k = np.arange(0, 2000)
        assert negative_binomial_pmf(2.5, 0.2, k).sum() == pytest.approx(1.0, abs=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            negative_binomial_pmf(0.0, 0.5, 1)
        with pytest.raises(ValueError):
            negative_binomial_pmf(1.0, 1.0, 1)
        with pytest.raises(ValueError):
            negative_binomial_pmf(1.0, 0.5, -1)
        with pytest.raises(ValueError):
            negative_binomial_pmf(1.0, 0.5, 1.5)


class TestDiscreteCountLaw:
    def test_poisson_pmf_matches_scipy(self):
        law = DiscreteCountLaw.poisson(3.5)
        k = np.arange(0, 40)
        assert np.max(np.abs(law.pmf(k) - poisson.pmf(k, 3.5))) <= 1e-13
        assert law.mean == 3.5

    def test_geometric_mean(self):
        assert DiscreteCountLaw.geometric(0.25).mean == pytest.approx(3.0)

    def test_negative_binomial_delegates(self):
        law = DiscreteCountLaw.negative_binomial(2.5, 0.2)
        k = np.arange(0, 20)
        assert np.max(np.abs(law.pmf(k) - nbinom.pmf(k, 2.5, 0.2))) <= 1e-13
        assert law.mean == pytest.approx(2.5 * 0.8 / 0.2)

    def test_truncation_point_captures_mass(self):
        law = DiscreteCountLaw.poisson(7.0)
        top = law.truncation_point()
        assert law.pmf(np.arange(top + 1)).sum() >= 1.0 - 1e-12

    def test_validation(self):
        with pytest.raises(ValueError):
            DiscreteCountLaw.poisson(0.0)
        with pytest.raises(ValueError):
            DiscreteCountLaw.geometric(1.0)
        with pytest.raises(ValueError):
            DiscreteCountLaw.negative_binomial(-1.0, 0.5)
        with pytest.raises(ValueError):
            DiscreteCountLaw("binomial", (1.0,))


class TestMixedPoissonSample:
    def test_validation(self):
        rng = np.random.default_rng(0)
        with pytest.raises(ValueError):
            mixed_poisson_sample(-1.0, rng)
        with pytest.raises(ValueError):
            mixed_poisson_sample(float("inf"), rng)

    def test_zero_intensity(self):
        rng = np.random.default_rng(0)
        assert mixed_poisson_sample(0.0, rng) == 0

    def test_exponential_mixing_gives_geometric(self):
        # intensity Exp with mean 3 makes the count geometric, p = 1/4
        rng = np.random.default_rng(314)
        lams = ExponentialLaw(1.0 / 3.0).sample(rng, 20_000)
        draws = np.array([mixed_poisson_sample(lam, rng) for lam in lams])
        p_value = merged_chisquare(draws, DiscreteCountLaw.geometric(0.25).pmf, 60)
        assert p_value > 0.001

    def test_gamma_mixing_gives_negative_binomial(self):
        # intensity 4 Gamma(2.5, 1) = Gamma(2.5, 1/4): NB(2.5, 0.2)
        rng = np.random.default_rng(159)
        lams = GammaLaw(2.5, 1.0).scaled(4.0).sample(rng, 20_000)
        draws = np.array([mixed_poisson_sample(lam, rng) for lam in lams])
        pmf = DiscreteCountLaw.negative_binomial(2.5, 0.2).pmf
        assert merged_chisquare(draws, pmf, 80) > 0.001
