"""Command line interface.

Subcommands: sample (draw normalized sums), zeta (distance between a
sample file and a reference law), bound (evaluate one bound formula),
experiment (run a config file sweep), verify (run the built-in presets
and check every bound).  Exit codes: 0 success, 1 bound violation,
2 usage error.  Anything stochastic requires a seed; nothing seeds
from the clock.

Flag names follow the usual symbols for these models (r, mu, p, s, n).
The generalized gamma exponent is called --power here because alpha is
reserved for the Holder exponent of the metric order.
"""

from __future__ import annotations

import argparse
import math
import sys

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
from .harness import (
    DEFAULT_VERIFY_SEED,
    emit,
    load_config,
    run_experiment,
    verify_presets,
)
from .random_sums import MixingModel, RandomSumModel, SummandLaw, draw_batch
from .zeta_metrics import (
    EmpiricalDistribution,
    ZetaOrder,
    lemma4_upper_bound,
    zeta1,
    zeta2,
    zeta_s_lower_bound,
)

_SAMPLE_PRESETS = ("lemma5", "example1", "example2", "example3")
_VERIFY_PRESETS = ("example1", "example2", "example3", "all")
_BOUND_FORMULAS = ("lemma5", "theorem1", "corollary2", "negbin", "gg", "example1")


def _fmt(value: float) -> str:
    return f"{value:.17g}"


def _parse_summand(kind: str, params_text: str) -> SummandLaw:
    try:
        params = tuple(float(p) for p in params_text.split(",") if p.strip())
    except ValueError:
        raise ValueError(f"--summand-params must be comma-separated numbers, got {params_text!r}")
    builders = {
        "exponential": (SummandLaw.exponential, 1, 1),
        "uniform": (SummandLaw.uniform, 2, 2),
        "shifted_bernoulli": (SummandLaw.shifted_bernoulli, 1, 2),
        "lognormal": (SummandLaw.lognormal, 2, 2),
        "normal": (SummandLaw.normal, 2, 2),
        "constant": (SummandLaw.constant, 1, 1),
    }
    builder, lo, hi = builders[kind]
    if not (lo <= len(params) <= hi):
        raise ValueError(f"--summand-params: {kind} takes {lo}-{hi} values, got {len(params)}")
    return builder(*params)


def _require(args, formula: str, names: list[str]) -> None:
    for name in names:
        if getattr(args, name) is None:
            flag = "--lambda" if name == "lam" else "--" + name.replace("_", "-")
            raise ValueError(f"bound {formula} requires {flag}")


def _sample_model(args) -> RandomSumModel:
    summand = _parse_summand(args.summand, args.summand_params)
    if args.preset == "lemma5":
        if args.lam is None:
            raise ValueError("--preset lemma5 requires --lambda")
        if not (args.lam > 0.0):
            raise ValueError(f"--lambda must be positive, got {args.lam}")
        return RandomSumModel(summand, MixingModel.scale_family(PointMassLaw(1.0)), args.lam)
    if args.preset == "example1":
        if args.p is None:
            raise ValueError("--preset example1 requires --p")
        if not (0.0 < args.p < 1.0):
            raise ValueError(f"--p must lie in (0, 1), got {args.p}")
        n = (1.0 - args.p) / args.p
        return RandomSumModel(summand, MixingModel.scale_family(ExponentialLaw(1.0)), n)
    if args.preset == "example2":
        if args.n is None:
            raise ValueError("--preset example2 requires --n")
        r, mu = args.r, args.mu
        base = GammaLaw(r, r)

        def scale(n, _coeff=r / mu):
            return _coeff * n

        return RandomSumModel(summand, MixingModel.scale_family(base, scale), args.n)
    if args.n is None:
        raise ValueError("--preset example3 requires --n")
    base = GeneralizedGammaLaw(args.shape, args.power, args.rate)
    return RandomSumModel(summand, MixingModel.scale_family(base), args.n)


def _cmd_sample(args) -> int:
    if args.count < 1:
        raise ValueError(f"--count must be positive, got {args.count}")
    model = _sample_model(args)
    draws = draw_batch(model, args.count, seed=args.seed)
    lines = "\n".join(_fmt(x) for x in draws) + "\n"
    if args.out is None:
        sys.stdout.write(lines)
    else:
        with open(args.out, "w", newline="\n") as handle:
            handle.write(lines)
    return 0


def _zeta_law(args):
    if args.law == "point":
        return PointMassLaw(args.value)
    if args.law == "exponential":
        return ExponentialLaw(args.rate)
    if args.law == "gamma":
        return GammaLaw(args.shape, args.rate)
    return GeneralizedGammaLaw(args.shape, args.power, args.rate)


def _cmd_zeta(args) -> int:
    with open(args.file) as handle:
        values = [float(line) for line in handle if line.strip()]
    if not values:
        raise ValueError(f"no sample values in {args.file}")
    emp = EmpiricalDistribution(values)
    limit = _zeta_law(args).to_distribution()
    order = ZetaOrder.from_s(args.s)
    if order.s == 1.0:
        est = zeta1(emp, limit)
        body = f'"s": 1, "value": {_fmt(est.value)}, "kind": "{est.kind}"'
    elif order.s == 2.0:
        est = zeta2(emp, limit, mean_tolerance=args.mean_tol)
        body = f'"s": 2, "value": {_fmt(est.value)}, "kind": "{est.kind}"'
    else:
        lower = zeta_s_lower_bound(order, emp, limit)
        upper = lemma4_upper_bound(
            order, emp.abs_moment(order.s), limit.abs_moment(order.s)
        )
        body = (
            f'"s": {_fmt(order.s)}, "lower": {_fmt(lower.value)}, '
            f'"upper": {_fmt(upper.value)}, "kind": "bracket"'
        )
    sys.stdout.write("{" + body + "}\n")
    return 0


def _report_json(report: BoundReport) -> str:
    inputs = ", ".join(f'"{k}": {_fmt(v)}' for k, v in report.inputs.items())
    return (
        f'{{"total": {_fmt(report.total)}, '
        f'"poissonization_term": {_fmt(report.poissonization_term)}, '
        f'"mixing_term": {_fmt(report.mixing_term)}, '
        f'"source": "{report.source}", '
        f'"inputs": {{{inputs}}}}}\n'
    )


def _cmd_bound(args) -> int:
    order = ZetaOrder.from_s(args.s)
    formula = args.formula
    a, v = args.a, args.sigma2
    if formula == "lemma5":
        _require(args, formula, ["lam"])
        report = lemma5_bound(order, args.lam, a, v)
    elif formula == "theorem1":
        _require(args, formula, ["mixing_moment", "m_n"])
        report = theorem1_bound(
            order, args.mixing_moment, args.m_n, a, v, mixing_zeta=args.mixing_zeta
        )
    elif formula == "corollary2":
        _require(args, formula, ["limit_moment", "m_n"])
        report = corollary2_bound(order, args.limit_moment, args.m_n, a, v)
    elif formula == "negbin":
        _require(args, formula, ["r", "p"])
        report = negative_binomial_bound(order, args.r, args.p, a, v)
    elif formula == "gg":
        _require(args, formula, ["shape", "power", "rate", "n"])
        law = GeneralizedGammaLaw(args.shape, args.power, args.rate)
        report = gg_bound(order, law, args.n, a, v)
    else:
        _require(args, formula, ["p"])
        report = example1_bound(order, args.p, a, v)
    sys.stdout.write(_report_json(report))
    return 0


def _cmd_experiment(args) -> int:
    config = load_config(args.config)
    rows = run_experiment(config, workers=args.workers)
    text = emit(rows, config.output_format, config.output_path)
    if config.output_path is None:
        sys.stdout.write(text)
    else:
        print(f"wrote {len(rows)} rows to {config.output_path}", file=sys.stderr)
    return 0 if all(row.bound_satisfied for row in rows) else 1


_TABLE_HEADER = (
    f"{'preset':<10} {'n':>8} {'m_n':>10} {'zeta_empirical':>16} "
    f"{'bound_total':>14} {'margin':>12} {'ok':>5}"
)


def _cmd_verify(args) -> int:
    names = ("example1", "example2", "example3") if args.preset == "all" else (args.preset,)
    print(
        f"running presets {', '.join(names)} at scale {args.scale} with seed {args.seed}",
        file=sys.stderr,
    )
    results, all_ok = verify_presets(
        names,
        scale=args.scale,
        seed=args.seed,
        out_dir=args.out_dir,
        workers=args.workers,
    )
    lines = [_TABLE_HEADER]
    for name, _config, rows in results:
        for row in rows:
            value = row.zeta_empirical
            if not math.isfinite(value):
                value = row.zeta_lower
            margin = row.bound.total - value
            lines.append(
                f"{name:<10} {row.n:>8g} {row.m_n:>10g} {value:>16.6g} "
                f"{row.bound.total:>14.6g} {margin:>12.3g} "
                f"{'yes' if row.bound_satisfied else 'NO':>5}"
            )
    sys.stdout.write("\n".join(lines) + "\n")
    print(
        "all bounds satisfied" if all_ok else "bound violation detected",
        file=sys.stderr,
    )
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="zetasums",
        description="Mixed Poisson random sums and metric distances to their limits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sample = sub.add_parser("sample", help="draw normalized random sums, one per line")
    p_sample.add_argument("--preset", choices=_SAMPLE_PRESETS, required=True)
    p_sample.add_argument("--count", type=int, required=True)
    p_sample.add_argument("--seed", type=int, required=True)
    p_sample.add_argument("--lambda", dest="lam", type=float, help="intensity for lemma5")
    p_sample.add_argument("--p", type=float, help="geometric parameter for example1")
    p_sample.add_argument("--r", type=float, default=2.0, help="gamma shape for example2")
    p_sample.add_argument("--mu", type=float, default=1.0, help="gamma rate for example2")
    p_sample.add_argument("--n", type=float, help="grid index for example2/example3")
    p_sample.add_argument("--shape", type=float, default=1.0, help="example3 mixing shape")
    p_sample.add_argument(
        "--power", type=float, default=2.0,
        help="example3 mixing exponent (the metric's Holder exponent is separate)",
    )
    p_sample.add_argument("--rate", type=float, default=1.0, help="example3 mixing rate")
    p_sample.add_argument(
        "--summand",
        choices=("exponential", "uniform", "shifted_bernoulli", "lognormal", "normal", "constant"),
        default="exponential",
    )
    p_sample.add_argument("--summand-params", default="1.0", help="comma-separated law parameters")
    p_sample.add_argument("--out", help="write to file instead of stdout")
    p_sample.set_defaults(handler=_cmd_sample)

    p_zeta = sub.add_parser("zeta", help="distance between a sample file and a reference law")
    p_zeta.add_argument("--file", required=True, help="one sample value per line")
    p_zeta.add_argument("--s", type=float, default=2.0)
    p_zeta.add_argument("--law", choices=("point", "exponential", "gamma", "gg"), required=True)
    p_zeta.add_argument("--value", type=float, default=1.0, help="point mass location")
    p_zeta.add_argument("--rate", type=float, default=1.0)
    p_zeta.add_argument("--shape", type=float, default=1.0)
    p_zeta.add_argument("--power", type=float, default=1.0)
    p_zeta.add_argument("--mean-tol", type=float, default=None, help="override the mean check for s=2")
    p_zeta.set_defaults(handler=_cmd_zeta)

    p_bound = sub.add_parser("bound", help="evaluate one bound formula, JSON to stdout")
    p_bound.add_argument("formula", choices=_BOUND_FORMULAS)
    p_bound.add_argument("--s", type=float, required=True)
    p_bound.add_argument("--a", type=float, required=True, help="summand mean")
    p_bound.add_argument("--sigma2", type=float, required=True, help="summand variance")
    p_bound.add_argument("--lambda", dest="lam", type=float, help="lemma5 intensity")
    p_bound.add_argument("--mixing-moment", type=float, help="theorem1: E intensity^(s/2)")
    p_bound.add_argument("--m-n", type=float, help="intensity scale")
    p_bound.add_argument("--mixing-zeta", type=float, default=0.0, help="theorem1 mixing distance")
    p_bound.add_argument("--limit-moment", type=float, help="corollary2: E limit^(s/2)")
    p_bound.add_argument("--r", type=float, help="negbin shape")
    p_bound.add_argument("--p", type=float, help="negbin/example1 success probability")
    p_bound.add_argument("--shape", type=float, help="gg mixing shape")
    p_bound.add_argument("--power", type=float, help="gg mixing exponent")
    p_bound.add_argument("--rate", type=float, help="gg mixing rate")
    p_bound.add_argument("--n", type=float, help="gg intensity scale")
    p_bound.set_defaults(handler=_cmd_bound)

    p_exp = sub.add_parser("experiment", help="run a sweep from a TOML config")
    p_exp.add_argument("--config", required=True)
    p_exp.add_argument("--workers", type=int, default=1)
    p_exp.set_defaults(handler=_cmd_experiment)

    p_verify = sub.add_parser("verify", help="run built-in presets and check every bound")
    p_verify.add_argument("--preset", choices=_VERIFY_PRESETS, required=True)
    p_verify.add_argument("--scale", choices=("small", "large"), default="small")
    p_verify.add_argument("--seed", type=int, default=DEFAULT_VERIFY_SEED)
    p_verify.add_argument("--out-dir", default="verify_output")
    p_verify.add_argument("--workers", type=int, default=1)
    p_verify.set_defaults(handler=_cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code
        return code if isinstance(code, int) else 0 if code is None else 2
    try:
        return args.handler(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
