"""Closed-form bounds: frozen values, cross-formula identities, validation."""

import math

import numpy as np
import pytest

from zetasums import (
    BoundReport,
    GeneralizedGammaLaw,
    ZetaOrder,
    corollary2_bound,
    example1_bound,
    gg_bound,
    gg_moment,
    lemma5_bound,
    moment_ratio,
    negative_binomial_bound,
    theorem1_bound,
)

ORDER1 = ZetaOrder.from_s(1.0)
ORDER2 = ZetaOrder.from_s(2.0)


class TestMomentRatio:
    def test_values(self):
        assert moment_ratio(1.0, 1.0) == 2.0
        assert moment_ratio(2.0, 0.0) == 1.0
        assert moment_ratio(-1.0, 3.0) == 4.0

    def test_validation(self):
        with pytest.raises(ValueError):
            moment_ratio(0.0, 1.0)
        with pytest.raises(ValueError):
            moment_ratio(1.0, -1.0)
        with pytest.raises(ValueError):
            moment_ratio(float("nan"), 1.0)


class TestBoundReport:
    def test_total_must_decompose(self):
        with pytest.raises(ValueError):
            BoundReport(1.0, 0.5, 0.4, "lemma5")
        with pytest.raises(ValueError):
            BoundReport(0.0, -0.5, 0.5, "lemma5")

    def test_inputs_default(self):
        report = BoundReport(1.0, 1.0, 0.0, "lemma5")
        assert report.inputs == {}


class TestFrozenValues:
    def test_lemma5_exponential_at_fifty(self):
        # ratio 2 at lam 50: 2 / (2 * 50)
        report = lemma5_bound(ORDER2, 50.0, 1.0, 1.0)
        assert report.total == pytest.approx(0.02, rel=1e-15)
        assert report.mixing_term == 0.0

    def test_lemma5_order_one_deterministic_summand(self):
        # s = 1: gamma factor 1, (1/4)^(1/2)
        assert lemma5_bound(ORDER1, 4.0, 1.0, 0.0).total == pytest.approx(0.5)

    def test_lemma5_order_two_unit_intensity(self):
        assert lemma5_bound(ORDER2, 1.0, 1.0, 0.0).total == pytest.approx(0.5)

    def test_example1_small_p(self):
        report = example1_bound(ORDER2, 0.01, 1.0, 1.0)
        assert report.total == pytest.approx(0.010101010101010102, rel=1e-15)
        assert report.source == "example1"

    def test_negative_binomial(self):
        # p/( (1-p) r ) * ratio = 0.5/(0.5*2) * 2 = 1; factor 1/2
        report = negative_binomial_bound(ORDER2, 2.0, 0.5, 1.0, 1.0)
        assert report.total == pytest.approx(0.5, rel=1e-15)

    def test_gg(self):
        # half Gamma(1.5) / n, doubled by the exponential moment ratio
        law = GeneralizedGammaLaw(1.0, 2.0, 1.0)
        report = gg_bound(ORDER2, law, 100.0, 1.0, 1.0)
        assert report.total == pytest.approx(math.gamma(1.5) / 100.0, rel=1e-14)

    def test_fractional_order(self):
        # s = 1.5: factor 2/3, (ratio/lam)^(3/4)
        report = lemma5_bound(ZetaOrder.from_s(1.5), 8.0, 1.0, 1.0)
        assert report.total == pytest.approx((2.0 / 3.0) * 0.25 ** 0.75, rel=1e-14)


def random_order(rng):
    pick = rng.integers(0, 4)
    if pick == 0:
        return ORDER1
    if pick == 1:
        return ORDER2
    return ZetaOrder.from_s(float(rng.uniform(1.01, 1.99)))


class TestCrossFormulaIdentities:
    """The specialized formulas are one general bound in disguise."""

    def test_lattice_sweep(self):
        rng = np.random.default_rng(60)
        for _ in range(50):
            order = random_order(rng)
            s = order.s
            lam = float(rng.uniform(0.5, 400.0))
            a = float(rng.uniform(0.2, 3.0)) * (1.0 if rng.random() < 0.5 else -1.0)
            sigma2 = float(rng.uniform(0.0, 4.0))
            m_n = float(rng.uniform(0.5, 400.0))
            r = float(rng.uniform(0.2, 8.0))

            # deterministic intensity: theorem form with moment lam^(s/2)
            via_thm = theorem1_bound(order, lam ** (s / 2.0), lam, a, sigma2)
            want = lemma5_bound(order, lam, a, sigma2)
            assert via_thm.total == pytest.approx(want.total, rel=1e-12)

            # scale family: intensity moment factorizes through m_n
            ell = float(rng.uniform(0.3, 5.0))
            via_thm = theorem1_bound(order, m_n ** (s / 2.0) * ell, m_n, a, sigma2)
            want = corollary2_bound(order, ell, m_n, a, sigma2)
            assert via_thm.total == pytest.approx(want.total, rel=1e-12)

            # negative binomial count with mean m_n: a unit-moment scale
            # family, since p/((1-p) r) is exactly 1/m_n
            p = r / (m_n + r)
            via_cor = corollary2_bound(order, 1.0, m_n, a, sigma2)
            want = negative_binomial_bound(order, r, p, a, sigma2)
            assert via_cor.total == pytest.approx(want.total, rel=1e-12)

            # r = 1 is the geometric case
            p1 = 1.0 / (m_n + 1.0)
            via_nb = negative_binomial_bound(order, 1.0, p1, a, sigma2)
            want = example1_bound(order, p1, a, sigma2)
            assert via_nb.total == want.total

            # generalized gamma bound is the scale-family bound at the
            # limit law's s/2 moment, by construction bit for bit
            law = GeneralizedGammaLaw(
                float(rng.uniform(0.5, 4.0)), float(rng.uniform(0.5, 3.0)), float(rng.uniform(0.5, 4.0))
            )
            via_cor = corollary2_bound(order, gg_moment(law, s / 2.0), m_n, a, sigma2)
            want = gg_bound(order, law, m_n, a, sigma2)
            assert via_cor.total == want.total

            # at order two the power-one generalized gamma with shape =
            # rate = r has unit mean, so it meets the negative binomial
            law_r = GeneralizedGammaLaw(r, 1.0, r)
            via_gg = gg_bound(ORDER2, law_r, m_n, a, sigma2)
            want = negative_binomial_bound(ORDER2, r, p, a, sigma2)
            assert via_gg.total == pytest.approx(want.total, rel=1e-12)

            # theorem with a mixing term just shifts the total
            zeta_mix = float(rng.uniform(0.0, 0.5))
            with_mix = theorem1_bound(order, lam ** (s / 2.0), lam, a, sigma2, zeta_mix)
            assert with_mix.mixing_term == zeta_mix
            assert with_mix.total == pytest.approx(
                with_mix.poissonization_term + zeta_mix, rel=1e-15
            )

    def test_mean_intensity_normalization_at_two(self):
        # s = 2 with m_n = E Lambda_n: the moment cancels and the bound
        # is (1 + sigma^2/a^2) / (2 m_n) plus the mixing distance
        m_n, a, sigma2, zeta_mix = 80.0, 2.0, 3.0, 0.01
        report = theorem1_bound(ORDER2, m_n, m_n, a, sigma2, zeta_mix)
        want = (1.0 + sigma2 / a ** 2) / (2.0 * m_n) + zeta_mix
        assert report.total == pytest.approx(want, rel=1e-14)


class TestMonotonicity:
    def test_decreasing_in_intensity(self):
        totals = [lemma5_bound(ORDER2, lam, 1.0, 1.0).total for lam in (5.0, 50.0, 500.0)]
        assert totals[0] > totals[1] > totals[2]

    def test_increasing_in_summand_noise(self):
        totals = [lemma5_bound(ORDER2, 50.0, 1.0, v).total for v in (0.0, 1.0, 4.0)]
        assert totals[0] < totals[1] < totals[2]

    def test_sign_of_mean_is_immaterial(self):
        assert (
            lemma5_bound(ORDER2, 50.0, -1.0, 1.0).total
            == lemma5_bound(ORDER2, 50.0, 1.0, 1.0).total
        )


class TestValidation:
    def test_lemma5(self):
        with pytest.raises(ValueError):
            lemma5_bound(ORDER2, 0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            lemma5_bound(ORDER2, 50.0, 0.0, 1.0)

    def test_theorem1(self):
        with pytest.raises(ValueError):
            theorem1_bound(ORDER2, 0.0, 10.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            theorem1_bound(ORDER2, 1.0, 0.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            theorem1_bound(ORDER2, 1.0, 10.0, 1.0, 1.0, -0.1)

    def test_corollary2(self):
        with pytest.raises(ValueError):
            corollary2_bound(ORDER2, -1.0, 10.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            corollary2_bound(ORDER2, 1.0, float("inf"), 1.0, 1.0)

    def test_negative_binomial(self):
        with pytest.raises(ValueError):
            negative_binomial_bound(ORDER2, 0.0, 0.5, 1.0, 1.0)
        with pytest.raises(ValueError):
            negative_binomial_bound(ORDER2, 1.0, 1.0, 1.0, 1.0)
        with pytest.raises(ValueError):
            example1_bound(ORDER2, 0.0, 1.0, 1.0)

    def test_gg_moment_must_exist(self):
        law = GeneralizedGammaLaw(0.5, -1.0, 1.0)
        with pytest.raises(ValueError):
            gg_bound(ORDER2, law, 10.0, 1.0, 1.0)


class TestReportContents:
    def test_sources(self):
        assert lemma5_bound(ORDER2, 1.0, 1.0, 0.0).source == "lemma5"
        assert theorem1_bound(ORDER2, 1.0, 1.0, 1.0, 0.0).source == "theorem1"
        assert corollary2_bound(ORDER2, 1.0, 1.0, 1.0, 0.0).source == "corollary2"
        assert negative_binomial_bound(ORDER2, 1.0, 0.5, 1.0, 0.0).source == "negative_binomial"
        assert example1_bound(ORDER2, 0.5, 1.0, 0.0).source == "example1"
        law = GeneralizedGammaLaw(1.0, 2.0, 1.0)
        assert gg_bound(ORDER2, law, 1.0, 1.0, 0.0).source == "gg"

    def test_inputs_echo(self):
        report = lemma5_bound(ORDER2, 50.0, 1.0, 1.0)
        assert report.inputs == {"s": 2.0, "lambda": 50.0, "a": 1.0, "sigma2": 1.0}
        report = theorem1_bound(ORDER2, 3.0, 9.0, 1.0, 0.5, 0.25)
        assert report.inputs["mixing_zeta"] == 0.25
        assert report.inputs["m_n"] == 9.0
        law = GeneralizedGammaLaw(1.5, 2.0, 3.0)
        report = gg_bound(ORDER2, law, 10.0, 1.0, 0.0)
        assert report.inputs["shape"] == 1.5
        assert report.inputs["power"] == 2.0
        assert report.inputs["rate"] == 3.0
