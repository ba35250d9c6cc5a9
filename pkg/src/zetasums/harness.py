"""Experiment harness: run rate-verification sweeps and emit row tables.

A sweep fixes a summand law, a mixing model, and a metric order, then
walks a grid of indices n.  At each n it draws replicated batches of
normalized sums, estimates the metric distance to the limit law, and
compares against the applicable theoretical bound.  Rows serialize to
CSV or JSON with a fixed column set so downstream tooling can diff
runs byte for byte.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np

try:
    import tomllib as _toml
except ImportError:
    import tomli as _toml

from .bounds import (
    BoundReport,
    corollary2_bound,
    example1_bound,
    gg_bound,
    lemma5_bound,
    negative_binomial_bound,
    theorem1_bound,
)
from .distributions import (
    ExponentialLaw,
    GammaLaw,
    GeneralizedGammaLaw,
    PointMassLaw,
)
from .random_sums import MixingModel, RandomSumModel, SummandLaw, sample_batch
from .zeta_metrics import (
    MeanMismatchError,
    ZetaOrder,
    lemma4_upper_bound,
    zeta1,
    zeta2,
    zeta_s_lower_bound,
)

__all__ = [
    "DEFAULT_VERIFY_SEED",
    "ExperimentConfig",
    "ExperimentRow",
    "InsufficientDataError",
    "PRESET_NAMES",
    "emit",
    "fit_decay_slope",
    "load_config",
    "parse_config",
    "parse_rows_json",
    "preset_config",
    "rows_to_csv",
    "rows_to_json",
    "run_experiment",
    "run_preset",
    "verify_presets",
]

_BOUND_KINDS = (
    "auto",
    "lemma5",
    "example1",
    "corollary2",
    "gg",
    "negative_binomial",
    "theorem1",
)
_OUTPUT_FORMATS = ("csv", "json")


class InsufficientDataError(ValueError):
    """Raised when a slope fit has fewer than three usable rows."""


@dataclass(frozen=True)
class ExperimentConfig:
    summand: SummandLaw
    mixing: MixingModel
    order: ZetaOrder
    n_grid: tuple
    samples_per_point: int = 100_000
    replications: int = 8
    seed: int = 0
    bound_kind: str = "auto"
    output_path: str | None = None
    output_format: str = "csv"

    def __post_init__(self):
        grid = tuple(float(n) for n in self.n_grid)
        object.__setattr__(self, "n_grid", grid)
        if not grid:
            raise ValueError("n_grid must be nonempty")
        if any(not (n > 0.0 and math.isfinite(n)) for n in grid):
            raise ValueError("n_grid entries must be positive and finite")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("n_grid must be strictly increasing")
        if self.samples_per_point < 1:
            raise ValueError("samples_per_point must be positive")
        if self.order.s == 2.0 and self.samples_per_point < 1000:
            raise ValueError("s = 2 runs need at least 1000 samples per point")
        if self.replications < 2:
            raise ValueError("replications must be at least 2, stderr needs them")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")
        if self.bound_kind not in _BOUND_KINDS:
            raise ValueError(f"unknown bound kind {self.bound_kind!r}")
        if self.output_format not in _OUTPUT_FORMATS:
            raise ValueError(f"unknown output format {self.output_format!r}")


@dataclass(frozen=True)
class ExperimentRow:
    """One grid point: estimates, their spread, and the bound verdict.

    zeta_empirical is NaN when the exact estimator is unavailable for
    the configured order (fractional s) or a replication failed its
    mean check; the comparison then falls back to zeta_lower.
    """

    n: float
    m_n: float
    zeta_empirical: float
    zeta_stderr: float
    zeta_lower: float
    lemma4_upper: float
    bound: BoundReport
    bound_satisfied: bool


def _auto_bound_kind(mixing: MixingModel) -> str:
    if mixing.mode == "explicit":
        return "theorem1"
    base = mixing.base_law
    if isinstance(base, PointMassLaw) and base.value == 1.0:
        return "lemma5"
    if isinstance(base, ExponentialLaw) and base.rate == 1.0:
        return "example1"
    if isinstance(base, GeneralizedGammaLaw):
        return "gg"
    return "corollary2"


def _mixing_zeta(mixing: MixingModel, n: float, order: ZetaOrder) -> float:
    if mixing.mode == "scale_family":
        return 0.0
    current = mixing.normalized_intensity_distribution(n)
    limit = mixing.limit_distribution()
    if order.s == 1.0:
        return zeta1(current, limit).value
    if order.s == 2.0:
        return zeta2(current, limit).value
    if not math.isclose(current.mean, limit.mean, rel_tol=1e-9, abs_tol=1e-12):
        raise ValueError(
            "fractional s needs the normalized intensity mean to match the limit"
        )
    return lemma4_upper_bound(
        order, current.abs_moment(order.s), limit.abs_moment(order.s)
    ).value


def theoretical_bound(config: ExperimentConfig, n: float) -> BoundReport:
    """Pick and evaluate the bound for one grid point.

    bound_kind "auto" keys off the mixing model: explicit mode gets the
    general two-term bound, scale families get the sharpest matching
    special case.
    """
    mixing = config.mixing
    order = config.order
    m_n = mixing.m(n)
    a = config.summand.mean
    v = config.summand.variance
    kind = config.bound_kind
    if kind == "auto":
        kind = _auto_bound_kind(mixing)
    if kind != "theorem1" and mixing.mode != "scale_family":
        raise ValueError(f"bound kind {kind!r} needs a scale-family mixing model")
    if kind == "lemma5":
        base = mixing.base_law
        if not isinstance(base, PointMassLaw) or base.value != 1.0:
            raise ValueError("lemma5 bound needs a unit point-mass mixing law")
        return lemma5_bound(order, m_n, a, v)
    if kind == "example1":
        base = mixing.base_law
        if not isinstance(base, ExponentialLaw) or base.rate != 1.0:
            raise ValueError("example1 bound needs a standard exponential mixing law")
        return example1_bound(order, 1.0 / (1.0 + m_n), a, v)
    if kind == "gg":
        base = mixing.base_law
        if not isinstance(base, GeneralizedGammaLaw):
            raise ValueError("gg bound needs a generalized gamma mixing law")
        return gg_bound(order, base, m_n, a, v)
    if kind == "negative_binomial":
        base = mixing.base_law
        if not isinstance(base, GammaLaw) or base.rate != base.shape:
            raise ValueError("negative binomial bound needs a gamma(r, r) mixing law")
        r = base.shape
        return negative_binomial_bound(order, r, r / (m_n + r), a, v)
    if kind == "corollary2":
        limit_moment = mixing.base_law.moment(order.s / 2.0)
        return corollary2_bound(order, limit_moment, m_n, a, v)
    moment = mixing.moment_half_s(n, order.s)
    return theorem1_bound(
        order, moment, m_n, a, v, mixing_zeta=_mixing_zeta(mixing, n, order)
    )


def _replicate(config, model, limit_dist, limit_abs, n_index, rep):
    emp = sample_batch(
        model, config.samples_per_point, seed=(config.seed, n_index, rep)
    )
    s = config.order.s
    mismatched = False
    if s == 2.0:
        try:
            value = zeta2(emp, limit_dist).value
        except MeanMismatchError:
            value = math.nan
            mismatched = True
    elif s == 1.0:
        value = zeta1(emp, limit_dist).value
    else:
        value = math.nan
    if s > 1.0:
        try:
            lower = zeta_s_lower_bound(config.order, emp, limit_dist).value
        except MeanMismatchError:
            lower = math.nan
            mismatched = True
    else:
        lower = math.nan
    upper = lemma4_upper_bound(config.order, emp.abs_moment(s), limit_abs).value
    return value, lower, upper, mismatched


def _aggregate(config, n, m_n, report, replicates) -> ExperimentRow:
    values = np.array([r[0] for r in replicates])
    lowers = np.array([r[1] for r in replicates])
    uppers = np.array([r[2] for r in replicates])
    mismatched = any(r[3] for r in replicates)

    have_exact = (
        config.order.s in (1.0, 2.0)
        and not mismatched
        and bool(np.all(np.isfinite(values)))
    )
    zeta_empirical = float(np.mean(values)) if have_exact else math.nan
    stat = values if have_exact else lowers
    if np.all(np.isfinite(stat)):
        check_value = float(np.mean(stat))
        stderr = float(np.std(stat, ddof=1) / math.sqrt(stat.size))
    else:
        check_value = math.nan
        stderr = math.nan
    zeta_lower = float(np.mean(lowers)) if np.all(np.isfinite(lowers)) else math.nan
    lemma4 = float(np.mean(uppers)) if np.all(np.isfinite(uppers)) else math.nan
    satisfied = (
        math.isfinite(check_value)
        and math.isfinite(stderr)
        and check_value <= report.total + 3.0 * stderr
    )
    return ExperimentRow(
        n=float(n),
        m_n=m_n,
        zeta_empirical=zeta_empirical,
        zeta_stderr=stderr,
        zeta_lower=zeta_lower,
        lemma4_upper=lemma4,
        bound=report,
        bound_satisfied=satisfied,
    )


def run_experiment(config: ExperimentConfig, workers: int = 1) -> list[ExperimentRow]:
    """Run the full sweep; deterministic for a fixed config and seed.

    Replications are keyed by (seed, grid index, replication index), so
    the worker count changes wall time only, never the rows.
    """
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")
    limit_dist = config.mixing.limit_distribution()
    limit_abs = limit_dist.abs_moment(config.order.s)
    models = [RandomSumModel(config.summand, config.mixing, n) for n in config.n_grid]
    reports = [theoretical_bound(config, n) for n in config.n_grid]

    tasks = [
        (i, rep)
        for i in range(len(models))
        for rep in range(config.replications)
    ]
    results = {}
    if workers == 1:
        for i, rep in tasks:
            results[(i, rep)] = _replicate(
                config, models[i], limit_dist, limit_abs, i, rep
            )
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = {
                pool.submit(
                    _replicate, config, models[i], limit_dist, limit_abs, i, rep
                ): (i, rep)
                for i, rep in tasks
            }
            for future, key in futures.items():
                results[key] = future.result()

    return [
        _aggregate(
            config,
            n,
            models[i].m_n,
            reports[i],
            [results[(i, rep)] for rep in range(config.replications)],
        )
        for i, n in enumerate(config.n_grid)
    ]


def fit_decay_slope(rows: Sequence[ExperimentRow]) -> float:
    """Least-squares slope of log(estimate) against log(n).

    Uses zeta_empirical where finite, falling back to zeta_lower, and
    skips rows where neither is a positive finite number.
    """
    xs, ys = [], []
    for row in rows:
        value = row.zeta_empirical
        if not math.isfinite(value):
            value = row.zeta_lower
        if math.isfinite(value) and value > 0.0:
            xs.append(math.log(row.n))
            ys.append(math.log(value))
    if len(xs) < 3:
        raise InsufficientDataError(f"need at least 3 usable rows, got {len(xs)}")
    slope = np.polyfit(np.array(xs), np.array(ys), 1)[0]
    return float(slope)


_CSV_COLUMNS = (
    "n",
    "m_n",
    "zeta_empirical",
    "zeta_stderr",
    "zeta_lower",
    "lemma4_upper",
    "bound_total",
    "bound_poissonization",
    "bound_mixing",
    "bound_source",
    "bound_satisfied",
)


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _row_fields(row: ExperimentRow) -> list[tuple[str, str, bool]]:
    report = row.bound
    flag = "true" if row.bound_satisfied else "false"
    return [
        ("n", _fmt(row.n), False),
        ("m_n", _fmt(row.m_n), False),
        ("zeta_empirical", _fmt(row.zeta_empirical), False),
        ("zeta_stderr", _fmt(row.zeta_stderr), False),
        ("zeta_lower", _fmt(row.zeta_lower), False),
        ("lemma4_upper", _fmt(row.lemma4_upper), False),
        ("bound_total", _fmt(report.total), False),
        ("bound_poissonization", _fmt(report.poissonization_term), False),
        ("bound_mixing", _fmt(report.mixing_term), False),
        ("bound_source", report.source, True),
        ("bound_satisfied", flag, False),
    ]


def rows_to_csv(rows: Sequence[ExperimentRow]) -> str:
    lines = [",".join(_CSV_COLUMNS)]
    for row in rows:
        lines.append(",".join(text for _, text, _ in _row_fields(row)))
    return "\n".join(lines) + "\n"


def _json_scalar(text: str, quoted: bool) -> str:
    if quoted:
        return f'"{text}"'
    if text == "nan":
        return "NaN"
    return text


def rows_to_json(rows: Sequence[ExperimentRow]) -> str:
    # Hand-rolled so floats keep their full 17 significant digits and
    # the output stays byte-stable across runs.
    items = []
    for row in rows:
        fields = ", ".join(
            f'"{key}": {_json_scalar(text, quoted)}'
            for key, text, quoted in _row_fields(row)
        )
        items.append("  {" + fields + "}")
    return "[\n" + ",\n".join(items) + "\n]\n"


def parse_rows_json(text: str) -> list[ExperimentRow]:
    rows = []
    for record in json.loads(text):
        report = BoundReport(
            total=record["bound_total"],
            poissonization_term=record["bound_poissonization"],
            mixing_term=record["bound_mixing"],
            source=record["bound_source"],
        )
        rows.append(
            ExperimentRow(
                n=record["n"],
                m_n=record["m_n"],
                zeta_empirical=record["zeta_empirical"],
                zeta_stderr=record["zeta_stderr"],
                zeta_lower=record["zeta_lower"],
                lemma4_upper=record["lemma4_upper"],
                bound=report,
                bound_satisfied=record["bound_satisfied"],
            )
        )
    return rows


def emit(
    rows: Sequence[ExperimentRow],
    output_format: str = "csv",
    path: str | None = None,
) -> str:
    if output_format == "csv":
        text = rows_to_csv(rows)
    elif output_format == "json":
        text = rows_to_json(rows)
    else:
        raise ValueError(f"unknown output format {output_format!r}")
    if path is not None:
        with open(path, "w", newline="\n") as handle:
            handle.write(text)
    return text


_SUMMAND_BUILDERS = {
    "exponential": SummandLaw.exponential,
    "uniform": SummandLaw.uniform,
    "shifted_bernoulli": SummandLaw.shifted_bernoulli,
    "lognormal": SummandLaw.lognormal,
    "normal": SummandLaw.normal,
    "constant": SummandLaw.constant,
}

_MIXING_BUILDERS = {
    "point_mass": (PointMassLaw, ("value",)),
    "exponential": (ExponentialLaw, ("rate",)),
    "gamma": (GammaLaw, ("shape", "rate")),
    "gg": (GeneralizedGammaLaw, ("shape", "power", "rate")),
}


class _LinearScale:
    """m_n = coeff * n, as a named object so configs stay comparable."""

    __slots__ = ("coeff",)

    def __init__(self, coeff: float):
        self.coeff = float(coeff)

    def __call__(self, n: float) -> float:
        return self.coeff * float(n)

    def __eq__(self, other):
        return isinstance(other, _LinearScale) and other.coeff == self.coeff

    def __hash__(self):
        return hash(("_LinearScale", self.coeff))


def _build_summand(table: dict) -> SummandLaw:
    kind = table.get("kind")
    if kind not in _SUMMAND_BUILDERS:
        raise ValueError(f"unknown summand kind {kind!r}")
    params = {k: v for k, v in table.items() if k != "kind"}
    try:
        return _SUMMAND_BUILDERS[kind](**params)
    except TypeError as exc:
        raise ValueError(f"bad parameters for summand {kind!r}: {exc}") from None


def _build_mixing(table: dict) -> MixingModel:
    kind = table.get("kind")
    if kind not in _MIXING_BUILDERS:
        raise ValueError(f"unknown mixing kind {kind!r}")
    law_cls, names = _MIXING_BUILDERS[kind]
    missing = [name for name in names if name not in table]
    if missing:
        raise ValueError(f"mixing {kind!r} needs parameters {missing}")
    extra = set(table) - set(names) - {"kind", "m_coeff"}
    if extra:
        raise ValueError(f"mixing {kind!r} got unknown parameters {sorted(extra)}")
    law = law_cls(*(float(table[name]) for name in names))
    coeff = float(table.get("m_coeff", 1.0))
    if not (coeff > 0.0 and math.isfinite(coeff)):
        raise ValueError(f"m_coeff must be positive, got {coeff}")
    return MixingModel.scale_family(law, m_sequence=_LinearScale(coeff))


def parse_config(text: str) -> ExperimentConfig:
    """Build a config from TOML text.

    Top level: s, n_grid, samples_per_point, replications, seed, bound.
    Tables: [summand] kind plus its parameters, [mixing] kind plus its
    parameters and optional m_coeff, optional [output] path and format.
    """
    data = _toml.loads(text)
    if "summand" not in data or "mixing" not in data:
        raise ValueError("config needs [summand] and [mixing] tables")
    if "n_grid" not in data:
        raise ValueError("config needs an n_grid list")
    output = data.get("output", {})
    return ExperimentConfig(
        summand=_build_summand(data["summand"]),
        mixing=_build_mixing(data["mixing"]),
        order=ZetaOrder.from_s(float(data.get("s", 2.0))),
        n_grid=tuple(float(n) for n in data["n_grid"]),
        samples_per_point=int(data.get("samples_per_point", 100_000)),
        replications=int(data.get("replications", 8)),
        seed=int(data.get("seed", 0)),
        bound_kind=str(data.get("bound", "auto")),
        output_path=output.get("path"),
        output_format=str(output.get("format", "csv")),
    )


def load_config(path: str) -> ExperimentConfig:
    with open(path, "rb") as handle:
        text = handle.read().decode("utf-8")
    return parse_config(text)


DEFAULT_VERIFY_SEED = 20240817
PRESET_NAMES = ("lemma5", "example1", "example2", "example3")
_SCALE_SAMPLES = {"small": 100_000, "large": 1_000_000}


def preset_config(
    name: str, scale: str = "small", seed: int = DEFAULT_VERIFY_SEED
) -> ExperimentConfig:
    """Canned sweeps covering each bound family at s = 2.

    lemma5: plain Poisson counts.  example1: exponential mixing, so the
    counts are geometric.  example2: gamma(2, 2) mixing with m_n = 2n,
    negative binomial counts.  example3: square-root-of-exponential
    mixing, a generalized gamma scale family.
    """
    if name not in PRESET_NAMES:
        raise ValueError(f"unknown preset {name!r}")
    if scale not in _SCALE_SAMPLES:
        raise ValueError(f"unknown scale {scale!r}")
    summand = SummandLaw.exponential(1.0)
    order = ZetaOrder.from_s(2.0)
    if name == "lemma5":
        mixing = MixingModel.scale_family(PointMassLaw(1.0))
        grid = (10.0, 50.0, 200.0)
    elif name == "example1":
        mixing = MixingModel.scale_family(ExponentialLaw(1.0))
        grid = (9.0, 49.0, 199.0)
    elif name == "example2":
        mixing = MixingModel.scale_family(GammaLaw(2.0, 2.0), m_sequence=_LinearScale(2.0))
        grid = (10.0, 30.0, 100.0, 300.0)
    else:
        mixing = MixingModel.scale_family(GeneralizedGammaLaw(1.0, 2.0, 1.0))
        grid = (30.0, 100.0, 300.0)
    return ExperimentConfig(
        summand=summand,
        mixing=mixing,
        order=order,
        n_grid=grid,
        samples_per_point=_SCALE_SAMPLES[scale],
        replications=8,
        seed=seed,
    )


def run_preset(
    name: str,
    scale: str = "small",
    seed: int = DEFAULT_VERIFY_SEED,
    workers: int = 1,
) -> tuple[ExperimentConfig, list[ExperimentRow]]:
    config = preset_config(name, scale=scale, seed=seed)
    return config, run_experiment(config, workers=workers)


def verify_presets(
    names: Sequence[str],
    scale: str = "small",
    seed: int = DEFAULT_VERIFY_SEED,
    out_dir: str = "verify_output",
    workers: int = 1,
) -> tuple[list[tuple[str, ExperimentConfig, list[ExperimentRow]]], bool]:
    """Run the named presets, write one CSV each, report overall status."""
    os.makedirs(out_dir, exist_ok=True)
    results = []
    all_ok = True
    for name in names:
        config, rows = run_preset(name, scale=scale, seed=seed, workers=workers)
        emit(rows, "csv", os.path.join(out_dir, f"{name}.csv"))
        results.append((name, config, rows))
        all_ok = all_ok and all(row.bound_satisfied for row in rows)
    return results, all_ok
