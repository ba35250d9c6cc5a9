"""Gamma-type mixing laws, count laws, and their analytic adapters.

The gamma law here is rate-parameterized: density proportional to
x^(shape-1) exp(-rate x).  The generalized gamma law is the power
transform of a gamma variable: X has GG(shape, power, rate) law exactly
when X^power has Gamma(shape, rate) law; power may be negative.  The
exponent is called "power" throughout to keep it apart from the Hoelder
exponent alpha of the metric order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc, gammaincc, gammainccinv, gammaincinv, gammaln

from .zeta_metrics import AnalyticDistribution, PointMass

__all__ = [
    "DiscreteCountLaw",
    "ExponentialLaw",
    "GammaDistribution",
    "GammaLaw",
    "GeneralizedGammaDistribution",
    "GeneralizedGammaLaw",
    "PointMassLaw",
    "gamma_cdf",
    "gamma_quantile",
    "gg_cdf",
    "gg_moment",
    "gg_quantile",
    "gg_sample",
    "mixed_poisson_sample",
    "negative_binomial_pmf",
]


@dataclass(frozen=True)
class GammaLaw:
    """Gamma law with density rate^shape / Gamma(shape) x^(shape-1) e^(-rate x)."""

    shape: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0.0 and math.isfinite(self.shape)):
            raise ValueError(f"shape must be positive, got {self.shape}")
        if not (self.rate > 0.0 and math.isfinite(self.rate)):
            raise ValueError(f"rate must be positive, got {self.rate}")

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    @property
    def variance(self) -> float:
        return self.shape / self.rate ** 2

    def moment(self, delta: float) -> float:
        """E X^delta = Gamma(shape + delta) / (rate^delta Gamma(shape))."""
        if self.shape + delta <= 0.0:
            raise ValueError(f"moment of order {delta} does not exist for shape {self.shape}")
        return math.exp(gammaln(self.shape + delta) - gammaln(self.shape) - delta * math.log(self.rate))

    def scaled(self, c: float) -> "GammaLaw":
        """Law of c X for c > 0."""
        if c <= 0.0:
            raise ValueError("scale factor must be positive")
        return GammaLaw(self.shape, self.rate / c)

    def sample(self, rng: np.random.Generator, size=None):
        return rng.gamma(self.shape, 1.0 / self.rate, size=size)

    def to_distribution(self) -> "GammaDistribution":
        return GammaDistribution(self)


def gamma_cdf(law: GammaLaw, x):
    """P(G <= x); zero left of the origin."""
    x = np.asarray(x, dtype=float)
    out = gammainc(law.shape, law.rate * np.clip(x, 0.0, None))
    return np.where(x <= 0.0, 0.0, out)[()]


def gamma_quantile(law: GammaLaw, q):
    """Inverse gamma CDF at q in (0, 1)."""
    q = np.asarray(q, dtype=float)
    if np.any(q <= 0.0) or np.any(q >= 1.0):
        raise ValueError("quantile level must lie in (0, 1)")
    return (gammaincinv(law.shape, q) / law.rate)[()]


@dataclass(frozen=True)
class GeneralizedGammaLaw:
    """Power transform of a gamma law: X^power has Gamma(shape, rate) law.

    The density is |power| rate^shape / Gamma(shape) x^(power shape - 1)
    e^(-rate x^power) on the positive half line.  Negative powers give
    heavy right tails, and the moment of order delta exists only when
    shape + delta / power is positive.
    """

    shape: float
    power: float
    rate: float

    def __post_init__(self):
        if not (self.shape > 0.0 and math.isfinite(self.shape)):
            raise ValueError(f"shape must be positive, got {self.shape}")
        if self.power == 0.0 or not math.isfinite(self.power):
            raise ValueError(f"power must be finite and nonzero, got {self.power}")
        if not (self.rate > 0.0 and math.isfinite(self.rate)):
            raise ValueError(f"rate must be positive, got {self.rate}")

    @property
    def mean(self) -> float:
        return self.moment(1.0)

    @property
    def variance(self) -> float:
        return self.moment(2.0) - self.mean ** 2

    def moment(self, delta: float) -> float:
        return gg_moment(self, delta)

    def scaled(self, c: float) -> "GeneralizedGammaLaw":
        """Law of c X for c > 0: the rate becomes rate / c^power."""
        if c <= 0.0:
            raise ValueError("scale factor must be positive")
        return GeneralizedGammaLaw(self.shape, self.power, self.rate / c ** self.power)

    def sample(self, rng: np.random.Generator, size=None):
        return gg_sample(self, rng, size=size)

    def to_distribution(self) -> "GeneralizedGammaDistribution":
        return GeneralizedGammaDistribution(self)


def gg_cdf(law: GeneralizedGammaLaw, x):
    """P(X <= x) for the generalized gamma law; zero left of the origin."""
    x = np.asarray(x, dtype=float)
    pos = np.clip(x, np.finfo(float).tiny, None)
    t = law.rate * pos ** law.power
    if law.power > 0.0:
        out = gammainc(law.shape, t)
    else:
        # X <= x iff the underlying gamma variable exceeds x^power.
        out = gammaincc(law.shape, t)
    return np.where(x <= 0.0, 0.0, out)[()]


def gg_quantile(law: GeneralizedGammaLaw, q):
    q = np.asarray(q, dtype=float)
    if np.any(q <= 0.0) or np.any(q >= 1.0):
        raise ValueError("quantile level must lie in (0, 1)")
    if law.power > 0.0:
        t = gammaincinv(law.shape, q) / law.rate
    else:
        t = gammainccinv(law.shape, q) / law.rate
    return (t ** (1.0 / law.power))[()]


def gg_sample(law: GeneralizedGammaLaw, rng: np.random.Generator, size=None):
    """Draw by power-transforming a gamma draw."""
    t = rng.gamma(law.shape, 1.0 / law.rate, size=size)
    return t ** (1.0 / law.power)


def gg_moment(law: GeneralizedGammaLaw, delta: float) -> float:
    """E X^delta = Gamma(shape + delta/power) / (rate^(delta/power) Gamma(shape)).

    Raises when shape + delta / power <= 0, where the moment diverges.
    """
    adj = law.shape + delta / law.power
    if adj <= 0.0:
        raise ValueError(
            f"moment of order {delta} does not exist: shape + delta/power = {adj:.6g} <= 0"
        )
    return math.exp(
        gammaln(adj) - gammaln(law.shape) - (delta / law.power) * math.log(law.rate)
    )


@dataclass(frozen=True)
class ExponentialLaw:
    """Exponential law, the shape-one gamma."""

    rate: float

    def __post_init__(self):
        if not (self.rate > 0.0 and math.isfinite(self.rate)):
            raise ValueError(f"rate must be positive, got {self.rate}")

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    @property
    def variance(self) -> float:
        return 1.0 / self.rate ** 2

    def moment(self, delta: float) -> float:
        return GammaLaw(1.0, self.rate).moment(delta)

    def scaled(self, c: float) -> "ExponentialLaw":
        if c <= 0.0:
            raise ValueError("scale factor must be positive")
        return ExponentialLaw(self.rate / c)

    def sample(self, rng: np.random.Generator, size=None):
        return rng.exponential(1.0 / self.rate, size=size)

    def to_distribution(self) -> "GammaDistribution":
        return GammaDistribution(GammaLaw(1.0, self.rate))


@dataclass(frozen=True)
class PointMassLaw:
    """Deterministic intensity, the degenerate mixing law."""

    value: float

    def __post_init__(self):
        # Zero is allowed: a zero intensity gives the empty sum, which
        # the sampler must handle.
        if not (self.value >= 0.0 and math.isfinite(self.value)):
            raise ValueError(f"point mass intensity must be nonnegative, got {self.value}")

    @property
    def mean(self) -> float:
        return self.value

    @property
    def variance(self) -> float:
        return 0.0

    def moment(self, delta: float) -> float:
        return self.value ** delta

    def scaled(self, c: float) -> "PointMassLaw":
        if c <= 0.0:
            raise ValueError("scale factor must be positive")
        return PointMassLaw(c * self.value)

    def sample(self, rng: np.random.Generator, size=None):
        if size is None:
            return self.value
        return np.full(size, self.value)

    def to_distribution(self) -> PointMass:
        return PointMass(self.value)


class GammaDistribution(AnalyticDistribution):
    """Analytic adapter for the gamma law with closed partial moments."""

    def __init__(self, law: GammaLaw):
        self.law = law
        self._m1 = law.mean
        self._m2 = law.moment(2.0)

    @property
    def mean(self) -> float:
        return self._m1

    @property
    def second_moment(self) -> float:
        return self._m2

    def cdf(self, x):
        return gamma_cdf(self.law, x)

    def quantile(self, q):
        return gamma_quantile(self.law, q)

    def _tail_moment(self, k: int, t):
        """E X^k 1{X > t}, via P(Gamma(shape+k) > rate t)."""
        t = np.asarray(t, dtype=float)
        full = 1.0 if k == 0 else (self._m1 if k == 1 else self._m2)
        tail = gammaincc(self.law.shape + k, self.law.rate * np.clip(t, 0.0, None))
        return np.where(t <= 0.0, full, full * tail)

    def upper_partial_moment(self, t):
        t = np.asarray(t, dtype=float)
        return (self._tail_moment(1, t) - t * self._tail_moment(0, t))[()]

    def upper_partial_moment2(self, t):
        t = np.asarray(t, dtype=float)
        return (
            self._tail_moment(2, t)
            - 2.0 * t * self._tail_moment(1, t)
            + t * t * self._tail_moment(0, t)
        )[()]

    def abs_moment(self, s: float) -> float:
        return self.law.moment(s)

    def __repr__(self):
        return f"GammaDistribution(shape={self.law.shape}, rate={self.law.rate})"


class GeneralizedGammaDistribution(AnalyticDistribution):
    """Analytic adapter for the generalized gamma law.

    Partial moments reduce to regularized incomplete gamma functions of
    the transformed argument; for negative powers the tail event flips
    to the lower incomplete branch.
    """

    def __init__(self, law: GeneralizedGammaLaw):
        self.law = law
        self._m1 = law.moment(1.0)
        # The second moment must exist for the order-2 machinery; fail here
        # rather than deep inside an integration routine.
        self._m2 = law.moment(2.0)

    @property
    def mean(self) -> float:
        return self._m1

    @property
    def second_moment(self) -> float:
        return self._m2

    def cdf(self, x):
        return gg_cdf(self.law, x)

    def quantile(self, q):
        return gg_quantile(self.law, q)

    def _tail_moment(self, k: int, t):
        t = np.asarray(t, dtype=float)
        full = 1.0 if k == 0 else (self._m1 if k == 1 else self._m2)
        pos = np.clip(t, np.finfo(float).tiny, None)
        arg = self.law.rate * pos ** self.law.power
        adj = self.law.shape + k / self.law.power
        if self.law.power > 0.0:
            tail = gammaincc(adj, arg)
        else:
            tail = gammainc(adj, arg)
        return np.where(t <= 0.0, full, full * tail)

    def upper_partial_moment(self, t):
        t = np.asarray(t, dtype=float)
        return (self._tail_moment(1, t) - t * self._tail_moment(0, t))[()]

    def upper_partial_moment2(self, t):
        t = np.asarray(t, dtype=float)
        return (
            self._tail_moment(2, t)
            - 2.0 * t * self._tail_moment(1, t)
            + t * t * self._tail_moment(0, t)
        )[()]

    def abs_moment(self, s: float) -> float:
        return self.law.moment(s)

    def __repr__(self):
        law = self.law
        return f"GeneralizedGammaDistribution(shape={law.shape}, power={law.power}, rate={law.rate})"


def negative_binomial_pmf(r: float, p: float, k):
    """P(N = k) = Gamma(k+r)/(k! Gamma(r)) p^r (1-p)^k for k = 0, 1, ...

    r may be any positive real; p in (0, 1).
    """
    if not (r > 0.0 and math.isfinite(r)):
        raise ValueError(f"r must be positive, got {r}")
    if not (0.0 < p < 1.0):
        raise ValueError(f"p must lie in (0, 1), got {p}")
    k = np.asarray(k)
    if np.any(k != np.floor(k)) or np.any(k < 0):
        raise ValueError("k must be a nonnegative integer")
    kf = k.astype(float)
    logpmf = (
        gammaln(kf + r)
        - gammaln(kf + 1.0)
        - gammaln(r)
        + r * math.log(p)
        + kf * math.log1p(-p)
    )
    return np.exp(logpmf)[()]


@dataclass(frozen=True)
class DiscreteCountLaw:
    """Count law on {0, 1, 2, ...}: poisson, geometric, or negative binomial."""

    kind: str
    params: tuple

    @classmethod
    def poisson(cls, lam: float) -> "DiscreteCountLaw":
        if not (lam > 0.0 and math.isfinite(lam)):
            raise ValueError(f"poisson intensity must be positive, got {lam}")
        return cls("poisson", (float(lam),))

    @classmethod
    def geometric(cls, p: float) -> "DiscreteCountLaw":
        if not (0.0 < p < 1.0):
            raise ValueError(f"geometric parameter must lie in (0, 1), got {p}")
        return cls("geometric", (float(p),))

    @classmethod
    def negative_binomial(cls, r: float, p: float) -> "DiscreteCountLaw":
        if not (r > 0.0 and math.isfinite(r)):
            raise ValueError(f"r must be positive, got {r}")
        if not (0.0 < p < 1.0):
            raise ValueError(f"p must lie in (0, 1), got {p}")
        return cls("negative_binomial", (float(r), float(p)))

    def __post_init__(self):
        if self.kind not in ("poisson", "geometric", "negative_binomial"):
            raise ValueError(f"unknown count law kind {self.kind!r}")

    @property
    def mean(self) -> float:
        if self.kind == "poisson":
            return self.params[0]
        if self.kind == "geometric":
            p = self.params[0]
            return (1.0 - p) / p
        r, p = self.params
        return r * (1.0 - p) / p

    def pmf(self, k):
        k = np.asarray(k)
        if np.any(k != np.floor(k)) or np.any(k < 0):
            raise ValueError("k must be a nonnegative integer")
        kf = k.astype(float)
        if self.kind == "poisson":
            lam = self.params[0]
            return np.exp(kf * math.log(lam) - lam - gammaln(kf + 1.0))[()]
        if self.kind == "geometric":
            p = self.params[0]
            return np.exp(math.log(p) + kf * math.log1p(-p))[()]
        r, p = self.params
        return negative_binomial_pmf(r, p, k)

    def truncation_point(self, mass: float = 1.0 - 1e-12) -> int:
        """Smallest K with P(N <= K) >= mass, found by doubling."""
        hi = max(16, int(8 * self.mean) + 16)
        while True:
            k = np.arange(hi + 1)
            if self.pmf(k).sum() >= mass:
                return hi
            hi *= 2


def mixed_poisson_sample(mixing_draw: float, rng: np.random.Generator) -> int:
    """One count draw: Poisson with the supplied (already drawn) intensity."""
    if not (mixing_draw >= 0.0 and math.isfinite(mixing_draw)):
        raise ValueError(f"intensity draw must be finite and nonnegative, got {mixing_draw}")
    return int(rng.poisson(mixing_draw))
