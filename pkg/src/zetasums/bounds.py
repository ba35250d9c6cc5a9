"""Closed-form convergence-rate bounds for normalized mixed Poisson sums.

Every bound is the moment prefactor Gamma(1+alpha)/Gamma(1+s) times a
power of the summand second-moment ratio E X^2 / (E X)^2 = 1 + var/mean^2
divided by the relevant intensity scale, plus (in the general form) the
distance between the normalized mixing law and its limit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .distributions import GeneralizedGammaLaw, gg_moment
from .zeta_metrics import ZetaOrder

__all__ = [
    "BoundReport",
    "corollary2_bound",
    "example1_bound",
    "gg_bound",
    "lemma5_bound",
    "moment_ratio",
    "negative_binomial_bound",
    "theorem1_bound",
]


@dataclass(frozen=True)
class BoundReport:
    """A theoretical bound split into its Poissonization and mixing parts."""

    total: float
    poissonization_term: float
    mixing_term: float
    source: str
    inputs: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.poissonization_term < 0.0 or self.mixing_term < 0.0:
            raise ValueError("bound terms must be nonnegative")
        if self.total != self.poissonization_term + self.mixing_term:
            raise ValueError("total must equal the sum of its terms")


def moment_ratio(summand_mean: float, summand_variance: float) -> float:
    """E X^2 / (E X)^2 expressed through mean and variance."""
    if summand_mean == 0.0 or not math.isfinite(summand_mean):
        raise ValueError(f"summand mean must be finite and nonzero, got {summand_mean}")
    if summand_variance < 0.0 or not math.isfinite(summand_variance):
        raise ValueError(f"summand variance must be finite and nonnegative, got {summand_variance}")
    return 1.0 + summand_variance / summand_mean ** 2


def _report(source: str, pois: float, mixing: float, inputs: dict) -> BoundReport:
    return BoundReport(pois + mixing, pois, mixing, source, inputs)


def lemma5_bound(
    order: ZetaOrder, lam: float, summand_mean: float, summand_variance: float
) -> BoundReport:
    """Bound for a plain Poisson(lam) sum normalized to mean one.

    Equals Gamma(1+alpha)/Gamma(1+s) ((mean^2 + var) / (lam mean^2))^(s/2);
    at s = 2 this is (1 + var/mean^2) / (2 lam).
    """
    if not (lam > 0.0 and math.isfinite(lam)):
        raise ValueError(f"intensity must be positive, got {lam}")
    ratio = moment_ratio(summand_mean, summand_variance)
    pois = order.gamma_factor * (ratio / lam) ** (order.s / 2.0)
    return _report(
        "lemma5",
        pois,
        0.0,
        {"s": order.s, "lambda": lam, "a": summand_mean, "sigma2": summand_variance},
    )


def theorem1_bound(
    order: ZetaOrder,
    mixing_moment_half_s: float,
    m_n: float,
    summand_mean: float,
    summand_variance: float,
    mixing_zeta: float = 0.0,
) -> BoundReport:
    """General two-term bound for a mixed Poisson sum normalized by m_n.

    mixing_moment_half_s is the s/2 moment of the mixing intensity and
    mixing_zeta the zeta_s distance between the normalized intensity and
    its limit law.
    """
    if not (mixing_moment_half_s > 0.0 and math.isfinite(mixing_moment_half_s)):
        raise ValueError(f"mixing moment must be positive, got {mixing_moment_half_s}")
    if not (m_n > 0.0 and math.isfinite(m_n)):
        raise ValueError(f"normalization must be positive, got {m_n}")
    if mixing_zeta < 0.0 or not math.isfinite(mixing_zeta):
        raise ValueError(f"mixing distance must be finite and nonnegative, got {mixing_zeta}")
    ratio = moment_ratio(summand_mean, summand_variance)
    pois = (
        mixing_moment_half_s
        / m_n ** order.s
        * order.gamma_factor
        * ratio ** (order.s / 2.0)
    )
    return _report(
        "theorem1",
        pois,
        mixing_zeta,
        {
            "s": order.s,
            "mixing_moment_half_s": mixing_moment_half_s,
            "m_n": m_n,
            "a": summand_mean,
            "sigma2": summand_variance,
            "mixing_zeta": mixing_zeta,
        },
    )


def _scale_family_pois(order: ZetaOrder, limit_moment_half_s: float, m_n: float, ratio: float) -> float:
    return (
        limit_moment_half_s
        / m_n ** (order.s / 2.0)
        * order.gamma_factor
        * ratio ** (order.s / 2.0)
    )


def corollary2_bound(
    order: ZetaOrder,
    limit_moment_half_s: float,
    m_n: float,
    summand_mean: float,
    summand_variance: float,
) -> BoundReport:
    """Scale-family case: the mixing term vanishes and only the s/2
    moment of the limit law enters."""
    if not (limit_moment_half_s > 0.0 and math.isfinite(limit_moment_half_s)):
        raise ValueError(f"limit moment must be positive, got {limit_moment_half_s}")
    if not (m_n > 0.0 and math.isfinite(m_n)):
        raise ValueError(f"normalization must be positive, got {m_n}")
    ratio = moment_ratio(summand_mean, summand_variance)
    pois = _scale_family_pois(order, limit_moment_half_s, m_n, ratio)
    return _report(
        "corollary2",
        pois,
        0.0,
        {
            "s": order.s,
            "limit_moment_half_s": limit_moment_half_s,
            "m_n": m_n,
            "a": summand_mean,
            "sigma2": summand_variance,
        },
    )


def negative_binomial_bound(
    order: ZetaOrder, r: float, p: float, summand_mean: float, summand_variance: float
) -> BoundReport:
    """Gamma-mixed case indexed by the negative binomial count law.

    The count has mean r(1-p)/p, so p/((1-p) r) is one over the
    normalization; at r = 1 this is the geometric case.
    """
    if not (r > 0.0 and math.isfinite(r)):
        raise ValueError(f"r must be positive, got {r}")
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p}")
    ratio = moment_ratio(summand_mean, summand_variance)
    pois = order.gamma_factor * (p / ((1.0 - p) * r) * ratio) ** (order.s / 2.0)
    return _report(
        "negative_binomial",
        pois,
        0.0,
        {"s": order.s, "r": r, "p": p, "a": summand_mean, "sigma2": summand_variance},
    )


def example1_bound(
    order: ZetaOrder, p: float, summand_mean: float, summand_variance: float
) -> BoundReport:
    """Geometric count with standard exponential mixing limit (r = 1)."""
    base = negative_binomial_bound(order, 1.0, p, summand_mean, summand_variance)
    return _report(
        "example1",
        base.poissonization_term,
        0.0,
        {"s": order.s, "p": p, "a": summand_mean, "sigma2": summand_variance},
    )


def gg_bound(
    order: ZetaOrder,
    law: GeneralizedGammaLaw,
    n: float,
    summand_mean: float,
    summand_variance: float,
) -> BoundReport:
    """Generalized gamma mixing scaled by n.

    This is the scale-family bound with the limit's s/2 moment
    Gamma(shape + s/(2 power)) / (rate^(s/(2 power)) Gamma(shape)); it
    raises when that moment does not exist.
    """
    if not (n > 0.0 and math.isfinite(n)):
        raise ValueError(f"n must be positive, got {n}")
    limit_moment = gg_moment(law, order.s / 2.0)
    ratio = moment_ratio(summand_mean, summand_variance)
    pois = _scale_family_pois(order, limit_moment, n, ratio)
    return _report(
        "gg",
        pois,
        0.0,
        {
            "s": order.s,
            "shape": law.shape,
            "power": law.power,
            "rate": law.rate,
            "n": n,
            "a": summand_mean,
            "sigma2": summand_variance,
        },
    )
