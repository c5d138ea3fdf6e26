"""Command-line front end.

    robustmean estimate   --input data.txt --estimator winsorized --beta 2
    robustmean breakdown  --n 20 --format csv
    robustmean deviation  --estimator winsorized --n 1000 --trials 2000 --format json
    robustmean bounds     --n 100000 --delta 0.05 --eps 0.02 --dist gaussian
    robustmean efficiency --n 1000 --trials 5000 --estimator median --estimator winsorized
    robustmean report     --input deviation.json --format svg

Every command also accepts ``--config run.json``; explicit flags override the
file. Exit status is 0 on success, 1 on error and 2 when the result was
produced but a validity precondition (``delta > 24 delta*``) failed.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import report as rep
from .bounds import BoundParams, check_validity, default_eps_star, theorem41_bound
from .contamination import DEFAULT_SCHEDULE, ContaminationSpec, DistributionSpec
from .estimators import ESTIMATOR_KINDS, EstimatorSpec, Sample, winsorized_fit
from .experiments import (
    deviation_experiment,
    efficiency_comparison,
    empirical_rbp,
)

__all__ = ["RunConfig", "load_config", "main", "read_data"]

EXIT_OK, EXIT_ERROR, EXIT_INVALID = 0, 1, 2

COMMANDS = ("estimate", "breakdown", "deviation", "bounds", "efficiency", "report")
FORMATS = ("csv", "json", "svg")
SEED_ENV = "ROBUSTMEAN_SEED"

# breakdown compares these when no estimator is named
BREAKDOWN_DEFAULTS = (
    EstimatorSpec("mean"),
    EstimatorSpec("catoni"),
    EstimatorSpec.make("mom", k=10),
    EstimatorSpec.make("lm_trimmed", epsilon=0.2),
    EstimatorSpec("winsorized"),
)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    seed: int = 0
    estimators: list[EstimatorSpec] = field(default_factory=list)
    dist: DistributionSpec | None = None
    contamination: ContaminationSpec | None = None
    bound_params: dict = field(default_factory=dict)
    experiment: dict = field(default_factory=dict)
    io: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "schema": 1,
            "command": self.command,
            "seed": self.seed,
            "estimators": [e.to_dict() for e in self.estimators],
            "dist": None if self.dist is None else self.dist.to_dict(),
            "contamination": None if self.contamination is None else self.contamination.to_dict(),
            "bound_params": dict(self.bound_params),
            "experiment": dict(self.experiment),
            "io": dict(self.io),
        }


_TOP_FIELDS = {
    "schema", "command", "seed", "estimator", "estimators", "dist",
    "contamination", "bound_params", "experiment", "io",
}
_EXPERIMENT_FIELDS = {"n", "trials", "eps", "eps_star", "delta", "schedule", "workers", "target"}
_BOUND_FIELDS = {"n", "delta", "eps", "eps_star", "beta", "mu", "sigma", "sigma_x", "c1", "c2"}
_IO_FIELDS = {"input", "output", "format"}


def _reject_unknown(where: str, got: dict, allowed: set) -> None:
    unknown = set(got) - allowed
    if unknown:
        raise ConfigError(f"unknown field(s) in {where}: {', '.join(sorted(unknown))}")


def load_config(path: str | Path) -> RunConfig:
    """Parse and validate a JSON run configuration.

    Unknown fields anywhere are rejected so misspelled tuning parameters
    cannot pass silently.
    """
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    _reject_unknown("config", raw, _TOP_FIELDS)
    if raw.get("schema") != 1:
        raise ConfigError(f"config field 'schema' must be 1, got {raw.get('schema')!r}")
    command = raw.get("command")
    if command not in COMMANDS:
        raise ConfigError(f"config field 'command' must be one of {', '.join(COMMANDS)}")
    if "seed" not in raw:
        raise ConfigError("config field 'seed' is required")
    try:
        ests = [EstimatorSpec.from_dict(e) for e in raw.get("estimators", [])]
        if "estimator" in raw:
            ests.insert(0, EstimatorSpec.from_dict(raw["estimator"]))
        dist = DistributionSpec.from_dict(raw["dist"]) if raw.get("dist") else None
        cont = ContaminationSpec.from_dict(raw["contamination"]) if raw.get("contamination") else None
    except (TypeError, ValueError, KeyError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc
    exp = raw.get("experiment", {})
    _reject_unknown("experiment", exp, _EXPERIMENT_FIELDS)
    bp = raw.get("bound_params", {})
    _reject_unknown("bound_params", bp, _BOUND_FIELDS)
    iod = raw.get("io", {})
    _reject_unknown("io", iod, _IO_FIELDS)
    if "format" in iod and iod["format"] not in FORMATS:
        raise ConfigError(f"io.format must be one of {', '.join(FORMATS)}")
    return RunConfig(command, int(raw["seed"]), ests, dist, cont, dict(bp), dict(exp), dict(iod))


def read_data(path: str | Path) -> Sample:
    """One decimal per line; blank lines and ``#`` comments are skipped.

    Raises
    ------
    ConfigError
        Naming the offending line if a value does not parse or is not finite.
    """
    values = []
    text = sys.stdin.read() if str(path) == "-" else Path(path).read_text()
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        try:
            v = float(body)
        except ValueError:
            raise ConfigError(f"{path}: line {lineno}: cannot parse {body!r} as a number") from None
        if not math.isfinite(v):
            raise ConfigError(f"{path}: line {lineno}: value {body!r} is not finite")
        values.append(v)
    if not values:
        raise ConfigError(f"{path}: no data values")
    return Sample(values)


# --------------------------------------------------------------------------
# argument handling


def _build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--seed", type=int, help=f"random seed (default: ${SEED_ENV} or 0)")
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=FORMATS)
    common.add_argument("--input", help="data file (estimate) or JSON report (report)")
    common.add_argument("--estimator", action="append", choices=ESTIMATOR_KINDS)
    common.add_argument("--beta", type=float)
    common.add_argument("--alpha", type=float)
    common.add_argument("--k", type=int)
    common.add_argument("--partition", choices=("contiguous", "seeded_shuffle"))
    common.add_argument("--epsilon", type=float, help="trim fraction of lm_trimmed")
    common.add_argument("--n", type=int)
    common.add_argument("--trials", type=int)
    common.add_argument("--eps", type=float, help="contamination rate")
    common.add_argument("--eps-star", type=float, dest="eps_star")
    common.add_argument("--delta", type=float)
    common.add_argument("--dist", help="distribution family")
    common.add_argument("--dist-param", action="append", default=[], metavar="NAME=VALUE")
    common.add_argument("--strategy", choices=("point_mass", "escalating", "mom_aware", "lm_aware"))
    common.add_argument("--magnitude", type=float)
    common.add_argument("--sign", choices=("positive", "negative"))
    common.add_argument("--workers", type=int)
    for name in ("mu", "sigma", "sigma-x", "c1", "c2"):
        common.add_argument(f"--{name}", type=float, dest=name.replace("-", "_"))

    parser = argparse.ArgumentParser(prog="robustmean", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "estimate": "apply an estimator to a data file",
        "breakdown": "empirical replacement breakdown points",
        "deviation": "Monte Carlo deviation tails",
        "bounds": "evaluate the winsorized-mean deviation bound",
        "efficiency": "standard errors relative to the mean",
        "report": "re-emit a saved JSON report as CSV, JSON or SVG",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _tuning_from_args(kind: str, args) -> dict:
    t = {}
    if kind == "winsorized" and args.beta is not None:
        t["beta"] = args.beta
    if kind == "catoni" and args.alpha is not None:
        t["alpha"] = args.alpha
    if kind == "mom":
        if args.k is not None:
            t["k"] = args.k
        if args.partition is not None:
            t["partition_rule"] = args.partition
    if kind == "lm_trimmed" and args.epsilon is not None:
        t["epsilon"] = args.epsilon
    return t


def _merge(args) -> RunConfig:
    cfg = load_config(args.config) if args.config else RunConfig(args.command)
    if cfg.command != args.command:
        raise ConfigError(f"config is for command {cfg.command!r}, not {args.command!r}")
    if args.seed is not None:
        cfg.seed = args.seed
    elif not args.config:
        env = os.environ.get(SEED_ENV)
        if env is not None:
            try:
                cfg.seed = int(env)
            except ValueError:
                raise ConfigError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    if args.estimator:
        cfg.estimators = [EstimatorSpec.make(k, **_tuning_from_args(k, args)) for k in args.estimator]
    if args.dist or args.dist_param:
        params = dict(cfg.dist.parameters) if cfg.dist and not args.dist else {}
        for item in args.dist_param:
            name, _, value = item.partition("=")
            if not value:
                raise ConfigError(f"--dist-param expects NAME=VALUE, got {item!r}")
            params[name] = float(value)
        family = args.dist or (cfg.dist.family if cfg.dist else "gaussian")
        cfg.dist = DistributionSpec(family, params)
    for name in ("n", "trials", "eps", "eps_star", "delta", "workers"):
        v = getattr(args, name)
        if v is not None:
            cfg.experiment[name] = v
    for name in ("beta", "mu", "sigma", "sigma_x", "c1", "c2"):
        v = getattr(args, name)
        if v is not None:
            cfg.bound_params[name] = v
    if args.strategy or args.magnitude is not None or args.sign:
        base = cfg.contamination or ContaminationSpec(0)
        cfg.contamination = ContaminationSpec(
            base.m,
            args.strategy or base.strategy,
            args.magnitude if args.magnitude is not None else base.magnitude,
            args.sign or base.sign,
        )
    for name in ("input", "out", "format"):
        v = getattr(args, name)
        if v is not None:
            cfg.io["output" if name == "out" else name] = v
    return cfg


def _need(cfg: RunConfig, key: str):
    if key not in cfg.experiment:
        raise ConfigError(f"{cfg.command}: missing required field '{key}' (flag --{key.replace('_', '-')})")
    return cfg.experiment[key]


def _emit(cfg: RunConfig, text: str) -> None:
    out = cfg.io.get("output")
    if out and out != "-":
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------
# commands


def cmd_estimate(cfg: RunConfig) -> int:
    if "input" not in cfg.io:
        raise ConfigError("estimate: --input is required")
    sample = read_data(cfg.io["input"])
    spec = cfg.estimators[0] if cfg.estimators else EstimatorSpec("winsorized")
    if spec.two_sample:
        raise ConfigError("estimate: lm_trimmed needs two samples and is not available here")
    info = {
        "estimator": spec.kind,
        "tuning": spec.tuning_dict(),
        "n": len(sample),
        "estimate": spec.estimate(sample, seed=cfg.seed),
    }
    if spec.kind == "winsorized":
        fit = winsorized_fit(sample, spec.tuning.beta)
        info.update(
            median=fit.median,
            mad=fit.mad,
            lower=fit.lower,
            upper=fit.upper,
            clipped_low=fit.clipped_low,
            clipped_high=fit.clipped_high,
        )
    fmt = cfg.io.get("format")
    if fmt == "json":
        _emit(cfg, rep._dumps(info))
    elif fmt == "csv":
        cols = list(info)
        vals = [json.dumps(v, sort_keys=True) if isinstance(v, dict) else v for v in info.values()]
        _emit(cfg, rep._table("estimate", cfg.seed, cols, [vals]))
    else:
        _emit(cfg, "".join(f"{k}: {v}\n" for k, v in info.items()))
    return EXIT_OK


def cmd_breakdown(cfg: RunConfig) -> int:
    n = int(cfg.experiment.get("n", 20))
    schedule = tuple(cfg.experiment.get("schedule", DEFAULT_SCHEDULE))
    specs = cfg.estimators or list(BREAKDOWN_DEFAULTS)
    reports = [empirical_rbp(s, n, cfg.seed, schedule) for s in specs]
    if cfg.io.get("format", "csv") == "json":
        _emit(cfg, rep.to_json(reports))
    else:
        _emit(cfg, rep.breakdown_csv(reports, cfg.seed))
    return EXIT_OK


def _bound_params(cfg: RunConfig, n: int, delta: float, eps: float, beta: float) -> BoundParams:
    bp = dict(cfg.bound_params)
    if cfg.dist is not None and not cfg.dist.is_mixture:
        c1, c2 = cfg.dist.quantile_constants()
        preset = {
            "mu": cfg.dist.true_median,
            "sigma": cfg.dist.true_mad,
            "c1": c1,
            "c2": c2,
        }
        if cfg.dist.true_sd is not None:
            preset["sigma_x"] = cfg.dist.true_sd
        for k, v in preset.items():
            bp.setdefault(k, v)
    eps_star = cfg.experiment.get("eps_star", bp.pop("eps_star", None))
    if eps_star is None:
        eps_star = default_eps_star(n, delta, eps)
    for k in ("n", "delta", "eps"):
        bp.pop(k, None)
    bp.setdefault("beta", beta)
    return BoundParams(n=n, delta=delta, eps=eps, eps_star=eps_star, **bp)


def cmd_bounds(cfg: RunConfig) -> int:
    n = int(cfg.experiment.get("n", cfg.bound_params.get("n", 0)) or _need(cfg, "n"))
    delta = float(cfg.experiment.get("delta", cfg.bound_params.get("delta", 0.05)))
    eps = float(cfg.experiment.get("eps", cfg.bound_params.get("eps", 0.0)))
    params = _bound_params(cfg, n, delta, eps, float(cfg.bound_params.get("beta", 3.0)))
    result = theorem41_bound(params)
    validity = check_validity(params)
    fmt = cfg.io.get("format")
    if fmt == "csv":
        _emit(cfg, rep.bounds_csv(params, result, validity, cfg.seed))
    elif fmt == "json":
        _emit(cfg, rep._dumps({"schema": 1, "report": "bounds", "data": rep.bounds_dict(params, result, validity)}))
    else:
        _emit(cfg, f"bound: {result.value!r}\nvalidity: {'true' if validity.valid else 'false'}\n"
              f"delta_star: {validity.delta_star!r}\nmin_n: {validity.min_n}\n")
    if not validity.valid:
        print(
            f"warning: delta={delta} <= 24*delta*={validity.threshold:.4g}; "
            f"the bound is not guaranteed (needs n >= {validity.min_n})",
            file=sys.stderr,
        )
        return EXIT_INVALID
    return EXIT_OK


def cmd_deviation(cfg: RunConfig) -> int:
    spec = cfg.estimators[0] if cfg.estimators else EstimatorSpec("winsorized")
    dist = cfg.dist or DistributionSpec.gaussian()
    n = int(_need(cfg, "n"))
    trials = int(cfg.experiment.get("trials", 1000))
    eps = float(cfg.experiment.get("eps", 0.0))
    delta = float(cfg.experiment.get("delta", 0.05))
    cont = cfg.contamination or ContaminationSpec(0)
    report = deviation_experiment(
        spec, dist, n, trials, eps, cont.strategy, cont.magnitude, delta, cfg.seed,
        target=cfg.experiment.get("target"),
        sign=cont.sign,
        workers=int(cfg.experiment.get("workers", 1)),
    )
    status = EXIT_OK
    extra = None
    if spec.kind == "winsorized" and not dist.is_mixture and dist.true_sd is not None and spec.tuning.beta >= 1:
        params = _bound_params(cfg, n, delta, eps, spec.tuning.beta)
        result = theorem41_bound(params)
        extra = {"bound": result.value, "valid": result.valid, "eps_star": params.eps_star,
                 "slack": result.value / report.quantile_at_delta if report.quantile_at_delta > 0 else None}
        if not result.valid:
            print("warning: deviation bound precondition fails at these settings", file=sys.stderr)
            status = EXIT_INVALID
    fmt = cfg.io.get("format", "json")
    if fmt == "csv":
        _emit(cfg, rep.deviation_csv(report))
    elif fmt == "svg":
        _emit(cfg, rep.tail_svg(report))
    else:
        _emit(cfg, rep.to_json(report, extra))
    return status


def cmd_efficiency(cfg: RunConfig) -> int:
    dist = cfg.dist or DistributionSpec.gaussian()
    specs = cfg.estimators or [EstimatorSpec("median"), EstimatorSpec("winsorized")]
    report = efficiency_comparison(
        dist,
        int(_need(cfg, "n")),
        int(cfg.experiment.get("trials", 1000)),
        specs,
        cfg.seed,
        workers=int(cfg.experiment.get("workers", 1)),
    )
    if cfg.io.get("format", "csv") == "json":
        _emit(cfg, rep.to_json(report))
    else:
        _emit(cfg, rep.efficiency_csv(report))
    return EXIT_OK


def cmd_report(cfg: RunConfig) -> int:
    if "input" not in cfg.io:
        raise ConfigError("report: --input is required")
    obj = rep.from_json(Path(cfg.io["input"]).read_text())
    fmt = cfg.io.get("format", "csv")
    if fmt == "json":
        _emit(cfg, rep.to_json(obj))
    elif isinstance(obj, list):
        if fmt == "svg":
            raise ConfigError("report: SVG output is only available for deviation reports")
        _emit(cfg, rep.breakdown_csv(obj, obj[0].seed if obj else cfg.seed))
    elif fmt == "svg":
        if not hasattr(obj, "tail_curve"):
            raise ConfigError("report: SVG output is only available for deviation reports")
        _emit(cfg, rep.tail_svg(obj))
    elif hasattr(obj, "tail_curve"):
        _emit(cfg, rep.deviation_csv(obj))
    elif hasattr(obj, "rows"):
        _emit(cfg, rep.efficiency_csv(obj))
    else:
        _emit(cfg, rep.breakdown_csv([obj], obj.seed))
    return EXIT_OK


_DISPATCH = {
    "estimate": cmd_estimate,
    "breakdown": cmd_breakdown,
    "deviation": cmd_deviation,
    "bounds": cmd_bounds,
    "efficiency": cmd_efficiency,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _merge(args)
        return _DISPATCH[cfg.command](cfg)
    except (ValueError, TypeError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
