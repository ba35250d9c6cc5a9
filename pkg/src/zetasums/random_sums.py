"""Random sums with a mixed Poisson number of terms.

A model couples a summand law X with a mixing intensity law: the count N
is Poisson with a randomly drawn intensity, and the sum X_1 + ... + X_N
is normalized by the summand mean times the intensity scale m_n.  Batch
sampling is deterministic for a given seed: work is split into fixed
sub-batches, each drawing from its own counter-based substream, so the
result does not depend on the degree of parallelism.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import gammaln, hyp1f1

from .zeta_metrics import AnalyticDistribution, EmpiricalDistribution

__all__ = [
    "MixingModel",
    "RandomSumModel",
    "SummandLaw",
    "draw_batch",
    "sample_batch",
    "sample_normalized",
    "sample_sum",
]

_SUMMAND_KINDS = (
    "exponential",
    "uniform",
    "shifted_bernoulli",
    "lognormal",
    "normal",
    "constant",
)
_CHUNK_SIZE = 8192


@dataclass(frozen=True)
class SummandLaw:
    """I.i.d. summand family with closed-form moments.

    The mean must be nonzero: sums are normalized by it, so a zero-mean
    summand leaves the model with no usable scale.
    """

    kind: str
    params: tuple

    def __post_init__(self):
        if self.kind not in _SUMMAND_KINDS:
            raise ValueError(f"unknown summand kind {self.kind!r}")
        if self.mean == 0.0:
            raise ValueError("summand mean must be nonzero")

    @classmethod
    def exponential(cls, rate: float) -> "SummandLaw":
        if not (rate > 0.0 and math.isfinite(rate)):
            raise ValueError(f"rate must be positive, got {rate}")
        return cls("exponential", (float(rate),))

    @classmethod
    def uniform(cls, lo: float, hi: float) -> "SummandLaw":
        if not (lo < hi and math.isfinite(lo) and math.isfinite(hi)):
            raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
        return cls("uniform", (float(lo), float(hi)))

    @classmethod
    def shifted_bernoulli(cls, p: float, shift: float = 0.0) -> "SummandLaw":
        if not (0.0 < p < 1.0):
            raise ValueError(f"p must lie in (0, 1), got {p}")
        if not math.isfinite(shift):
            raise ValueError("shift must be finite")
        return cls("shifted_bernoulli", (float(p), float(shift)))

    @classmethod
    def lognormal(cls, logmean: float, logsd: float) -> "SummandLaw":
        if not (logsd > 0.0 and math.isfinite(logsd)) or not math.isfinite(logmean):
            raise ValueError("lognormal needs finite logmean and positive logsd")
        return cls("lognormal", (float(logmean), float(logsd)))

    @classmethod
    def normal(cls, mean: float, sd: float) -> "SummandLaw":
        if not (sd > 0.0 and math.isfinite(sd)) or not math.isfinite(mean):
            raise ValueError("normal needs finite mean and positive sd")
        return cls("normal", (float(mean), float(sd)))

    @classmethod
    def constant(cls, value: float) -> "SummandLaw":
        if not math.isfinite(value):
            raise ValueError("constant summand needs a finite value")
        return cls("constant", (float(value),))

    @property
    def mean(self) -> float:
        if self.kind == "exponential":
            return 1.0 / self.params[0]
        if self.kind == "uniform":
            lo, hi = self.params
            return 0.5 * (lo + hi)
        if self.kind == "shifted_bernoulli":
            p, shift = self.params
            return shift + p
        if self.kind == "lognormal":
            logmean, logsd = self.params
            return math.exp(logmean + 0.5 * logsd ** 2)
        return self.params[0]

    @property
    def variance(self) -> float:
        if self.kind == "exponential":
            return 1.0 / self.params[0] ** 2
        if self.kind == "uniform":
            lo, hi = self.params
            return (hi - lo) ** 2 / 12.0
        if self.kind == "shifted_bernoulli":
            p = self.params[0]
            return p * (1.0 - p)
        if self.kind == "lognormal":
            logmean, logsd = self.params
            return (math.exp(logsd ** 2) - 1.0) * math.exp(2.0 * logmean + logsd ** 2)
        if self.kind == "constant":
            return 0.0
        return self.params[1] ** 2

    @property
    def moment_ratio(self) -> float:
        """E X^2 / (E X)^2 = 1 + variance / mean^2."""
        return 1.0 + self.variance / self.mean ** 2

    def abs_moment(self, s: float) -> float:
        """E |X|^s for 1 <= s <= 2, in closed form per kind."""
        if not (1.0 <= s <= 2.0):
            raise ValueError(f"s must lie in [1, 2], got {s}")
        if self.kind == "exponential":
            return math.gamma(1.0 + s) / self.params[0] ** s
        if self.kind == "uniform":
            lo, hi = self.params

            def prim(x):
                return math.copysign(abs(x) ** (s + 1.0), x) / (s + 1.0)

            return (prim(hi) - prim(lo)) / (hi - lo)
        if self.kind == "shifted_bernoulli":
            p, shift = self.params
            return (1.0 - p) * abs(shift) ** s + p * abs(shift + 1.0) ** s
        if self.kind == "lognormal":
            logmean, logsd = self.params
            return math.exp(s * logmean + 0.5 * (s * logsd) ** 2)
        if self.kind == "constant":
            return abs(self.params[0]) ** s
        mean, sd = self.params
        # Absolute moment of a noncentral normal via Kummer's function.
        prefactor = sd ** s * 2.0 ** (s / 2.0) * math.exp(gammaln((1.0 + s) / 2.0)) / math.sqrt(math.pi)
        return prefactor * float(hyp1f1(-s / 2.0, 0.5, -(mean ** 2) / (2.0 * sd ** 2)))

    def sample(self, rng: np.random.Generator, size=None):
        if self.kind == "exponential":
            return rng.exponential(1.0 / self.params[0], size=size)
        if self.kind == "uniform":
            lo, hi = self.params
            return rng.uniform(lo, hi, size=size)
        if self.kind == "shifted_bernoulli":
            p, shift = self.params
            return shift + np.asarray(rng.random(size=size) < p, dtype=float)[()]
        if self.kind == "lognormal":
            logmean, logsd = self.params
            return rng.lognormal(logmean, logsd, size=size)
        if self.kind == "constant":
            value = self.params[0]
            return value if size is None else np.full(size, value)
        mean, sd = self.params
        return rng.normal(mean, sd, size=size)


_MIXING_MODES = ("scale_family", "explicit")


@dataclass(frozen=True)
class MixingModel:
    """Intensity law for the Poisson count, indexed by n.

    In scale_family mode the intensity is m_n times the base law, and
    the base law itself is the limit.  In explicit mode each n carries
    its own intensity law and the limit is supplied separately; the
    normalized intensity then need not have the limit's mean.
    """

    mode: str
    base_law: object
    m_sequence: Callable[[float], float]
    law_for_n: Callable[[float], object] | None = None

    def __post_init__(self):
        if self.mode not in _MIXING_MODES:
            raise ValueError(f"unknown mixing mode {self.mode!r}")
        if self.mode == "explicit" and self.law_for_n is None:
            raise ValueError("explicit mode needs a per-n intensity law")

    @classmethod
    def scale_family(cls, base_law, m_sequence: Callable[[float], float] | None = None) -> "MixingModel":
        if m_sequence is None:
            m_sequence = float
        return cls("scale_family", base_law, m_sequence)

    @classmethod
    def explicit(
        cls,
        law_for_n: Callable[[float], object],
        limit_law,
        m_sequence: Callable[[float], float],
    ) -> "MixingModel":
        return cls("explicit", limit_law, m_sequence, law_for_n)

    def m(self, n: float) -> float:
        value = float(self.m_sequence(n))
        if not (value > 0.0 and math.isfinite(value)):
            raise ValueError(f"intensity scale must be positive, got {value} at n={n}")
        return value

    def intensity_law(self, n: float):
        """Law of the (unnormalized) intensity at index n."""
        if self.mode == "scale_family":
            return self.base_law.scaled(self.m(n))
        return self.law_for_n(n)

    def normalized_intensity_distribution(self, n: float) -> AnalyticDistribution:
        return self.intensity_law(n).scaled(1.0 / self.m(n)).to_distribution()

    def limit_distribution(self) -> AnalyticDistribution:
        return self.base_law.to_distribution()

    def moment_half_s(self, n: float, s: float) -> float:
        """E of the intensity to the power s/2."""
        return self.intensity_law(n).moment(s / 2.0)

    def sample_intensity(self, n: float, rng: np.random.Generator, size=None):
        return self.intensity_law(n).sample(rng, size=size)


@dataclass(frozen=True)
class RandomSumModel:
    """Summand law plus mixing model at a fixed grid index n."""

    summand: SummandLaw
    mixing: MixingModel
    n: float

    def __post_init__(self):
        if not (self.n > 0.0 and math.isfinite(self.n)):
            raise ValueError(f"n must be positive, got {self.n}")

    @property
    def m_n(self) -> float:
        return self.mixing.m(self.n)

    @property
    def normalization(self) -> float:
        return self.summand.mean * self.m_n


def sample_sum(model: RandomSumModel, rng: np.random.Generator) -> float:
    """One draw of the raw random sum: intensity, then count, then terms."""
    lam = float(model.mixing.sample_intensity(model.n, rng))
    count = int(rng.poisson(lam))
    if count == 0:
        return 0.0
    return float(np.sum(model.summand.sample(rng, size=count)))


def sample_normalized(model: RandomSumModel, rng: np.random.Generator) -> float:
    """One draw of the sum divided by (summand mean times m_n)."""
    return sample_sum(model, rng) / model.normalization


def _substream(entropy: tuple) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def _segment_sums(values: np.ndarray, counts: np.ndarray) -> np.ndarray:
    sums = np.zeros(counts.size)
    if values.size == 0:
        return sums
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    nonempty = counts > 0
    # reduceat needs strictly increasing in-range offsets, which the
    # nonempty starts are; empty segments stay exactly zero.
    sums[nonempty] = np.add.reduceat(values, starts[nonempty])
    return sums


def _seed_entropy(seed) -> tuple:
    if isinstance(seed, (int, np.integer)):
        seed = (int(seed),)
    entropy = tuple(int(v) for v in seed)
    if not entropy or any(v < 0 for v in entropy):
        raise ValueError("seed must be a nonnegative integer or a tuple of them")
    return entropy


def _sample_chunk(model: RandomSumModel, count: int, entropy: tuple, index: int) -> np.ndarray:
    # Two substreams per sub-batch keep the intensity/count draws and the
    # summand draws independent by construction.
    rng_mix = _substream(entropy + (index, 0))
    rng_sum = _substream(entropy + (index, 1))
    lam = np.atleast_1d(np.asarray(model.mixing.sample_intensity(model.n, rng_mix, size=count), dtype=float))
    counts = rng_mix.poisson(lam)
    total = int(counts.sum())
    draws = model.summand.sample(rng_sum, size=total) if total > 0 else np.empty(0)
    return _segment_sums(np.asarray(draws, dtype=float), counts)


def draw_batch(
    model: RandomSumModel,
    count: int,
    seed,
    workers: int = 1,
    normalized: bool = True,
) -> np.ndarray:
    """Draw `count` sums reproducibly, in generation order.

    The batch is split into fixed-size sub-batches; sub-batch i draws
    from the substream keyed by (seed, i), so the merged sample is
    bitwise identical for any worker count.  Sums are normalized by
    (summand mean times m_n) unless normalized=False.
    """
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")
    entropy = _seed_entropy(seed)
    sizes = [_CHUNK_SIZE] * (count // _CHUNK_SIZE)
    if count % _CHUNK_SIZE:
        sizes.append(count % _CHUNK_SIZE)

    if workers == 1 or len(sizes) == 1:
        parts = [_sample_chunk(model, size, entropy, i) for i, size in enumerate(sizes)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_sample_chunk, model, size, entropy, i)
                for i, size in enumerate(sizes)
            ]
            parts = [f.result() for f in futures]

    sums = np.concatenate(parts)
    if normalized:
        sums = sums / model.normalization
    return sums


def sample_batch(
    model: RandomSumModel,
    count: int,
    seed,
    workers: int = 1,
    normalized: bool = True,
) -> EmpiricalDistribution:
    """Like draw_batch, but wrapped as an empirical law for the metrics."""
    return EmpiricalDistribution(draw_batch(model, count, seed, workers, normalized))
