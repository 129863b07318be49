"""Command-line entry point: ``sparse-classify {simulate,sweep,exact,bounds,counterexample}``.

Exit codes: 0 success, 2 configuration error, 3 statistical degeneracy
(degenerate grid or every point censored).
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import json
import math
import os
import sys
from dataclasses import dataclass, field

from . import __version__
from .alphabet_model import ModelClassParams, read_distribution
from .exact_analysis import (
    achievability_exponent,
    chernoff_lambda_bound,
    lemma_A_rate,
    prob_all_distinct,
    prob_all_distinct_uniform,
    prob_C_n,
    prob_event_B_given_xy,
)
from .experiments import (
    CLASSIFIERS,
    THREADS_ENV,
    DegenerateFitError,
    FitUndefinedError,
    SweepConfig,
    canonical_pair,
    conditional_false_alarm_experiment,
    estimate_error,
    fit_exponent,
    point_seed,
    run_grid,
)
from .sampling import SeedSpec, StreamLabel, sample_histogram

EXIT_CONFIG = 2
EXIT_DEGENERATE = 3

SIMULATE_COLUMNS = ["m", "N", "n", "classifier", "r", "trials", "errors_h0", "errors_h1",
                    "p_hat", "ci_low", "ci_high", "censored"]
LN10 = math.log(10.0)


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    grid: list = field(default_factory=list)
    epsilon: float = 0.5
    c_bar: float | None = None
    classifiers: list = field(default_factory=lambda: ["T"])
    trials: int = 10_000
    confidence: float = 0.95
    seed: int = 0
    require_sparse: bool = False
    require_consistency: bool = False
    allow_outside_class: bool = False

    def effective_c_bar(self) -> float:
        return self.c_bar if self.c_bar is not None else 1.0 + self.epsilon

    def sweep_config(self, classifier: str) -> SweepConfig:
        return SweepConfig(
            [tuple(g) for g in self.grid], self.epsilon, self.effective_c_bar(), classifier,
            self.trials, self.confidence, self.seed, self.require_sparse, self.require_consistency,
        )


_BOOL = {"1": True, "true": True, "yes": True, "on": True, "0": False, "false": False, "no": False, "off": False}


def parse_config(text: str, source: str = "<config>") -> RunConfig:
    """Parse flat ``key = value`` lines; ``grid = m N n`` may repeat."""
    cfg = RunConfig()
    seen = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{source}:{lineno}"
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value', got {raw.strip()!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key != "grid" and key in seen:
            raise ConfigError(f"{where}: duplicate key {key!r}")
        seen.add(key)
        try:
            if key == "grid":
                parts = [int(v) for v in value.replace(",", " ").split()]
                if len(parts) != 3 or min(parts) < 1:
                    raise ValueError("grid needs three positive integers 'm N n'")
                cfg.grid.append(tuple(parts))
            elif key == "epsilon":
                cfg.epsilon = float(value)
            elif key == "c_bar":
                cfg.c_bar = float(value)
            elif key in ("classifier", "classifiers"):
                names = [v.upper() for v in value.replace(",", " ").split()]
                bad = [v for v in names if v not in CLASSIFIERS]
                if bad or not names:
                    raise ValueError(f"unknown classifier(s) {bad}; choose from {sorted(CLASSIFIERS)}")
                cfg.classifiers = names
            elif key == "trials":
                cfg.trials = int(value)
                if cfg.trials < 1:
                    raise ValueError("trials must be positive")
            elif key == "confidence":
                cfg.confidence = float(value)
                if not 0 < cfg.confidence < 1:
                    raise ValueError("confidence must lie in (0, 1)")
            elif key == "seed":
                cfg.seed = int(value, 0)
                if not 0 <= cfg.seed < 2**64:
                    raise ValueError("seed must be an unsigned 64-bit integer")
            elif key in ("require_sparse", "require_consistency", "allow_outside_class"):
                if value.lower() not in _BOOL:
                    raise ValueError(f"expected a boolean, got {value!r}")
                setattr(cfg, key, _BOOL[value.lower()])
            else:
                raise ConfigError(f"{where}: unknown key {key!r}")
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"{where}: field {key!r}: {exc}") from None
    if not cfg.grid:
        raise ConfigError(f"{source}: no 'grid = m N n' lines")
    if not 0 < cfg.epsilon < 1:
        raise ConfigError(f"{source}: field 'epsilon': bi-uniform pair needs epsilon in (0, 1)")
    for m, N, n in cfg.grid:
        if m % 2:
            raise ConfigError(f"{source}: grid point {(m, N, n)}: bi-uniform pair needs an even alphabet size m (parity)")
    try:
        for name in cfg.classifiers:
            cfg.sweep_config(name).validate()
        ModelClassParams(cfg.epsilon, cfg.effective_c_bar(), 2)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return cfg


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return f"{v:.12g}"
    return str(v)


def _now() -> str:
    return _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")


def _manifest(args, config_echo: dict, seed: int, started: str, outputs: dict) -> dict:
    return {
        "tool_version": __version__,
        "subcommand": args.command,
        "config_echo": config_echo,
        "master_seed": seed,
        "start": started,
        "end": _now(),
        "outputs": outputs,
    }


def _write_manifest(out_dir, manifest) -> None:
    with open(os.path.join(out_dir, "manifest.json"), "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")


def _load_config(args) -> RunConfig:
    if not args.config:
        raise ConfigError("--config PATH is required for this subcommand")
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    cfg = parse_config(text, args.config)
    if args.seed is not None:
        cfg.seed = args.seed
    if args.confidence is not None:
        cfg.confidence = args.confidence
    return cfg


def _config_echo(cfg: RunConfig) -> dict:
    d = dict(cfg.__dict__)
    d["grid"] = [list(g) for g in cfg.grid]
    d["c_bar"] = cfg.effective_c_bar()
    return d


def _csv_header(seed: int) -> str:
    return f"# manifest=manifest.json master_seed={seed} tool_version={__version__}\n"


def cmd_simulate(args) -> int:
    started = _now()
    cfg = _load_config(args)
    os.makedirs(args.out, exist_ok=True)
    rows = []
    for i, (m, N, n) in enumerate(cfg.grid):
        pi, mu = canonical_pair(m, cfg.epsilon)
        params = ModelClassParams(cfg.epsilon, cfg.effective_c_bar(), m)
        for name in cfg.classifiers:
            est = estimate_error(
                pi, mu, N, n, name, cfg.trials, point_seed(cfg.seed, i), cfg.confidence,
                params=params, allow_outside_class=cfg.allow_outside_class, threads=args.threads,
            )
            rows.append([m, N, n, name, est.r, est.trials, est.errors_h0, est.errors_h1,
                         est.p_hat, float(est.ci_low), float(est.ci_high), est.censored])
    csv_path = os.path.join(args.out, "simulate.csv")
    with open(csv_path, "w", newline="") as fh:
        fh.write(_csv_header(cfg.seed))
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SIMULATE_COLUMNS)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    summary = {"manifest": "manifest.json", "master_seed": cfg.seed,
               "rows": [dict(zip(SIMULATE_COLUMNS, r)) for r in rows]}
    with open(os.path.join(args.out, "simulate.json"), "w") as fh:
        json.dump(summary, fh, indent=2, default=_fmt)
        fh.write("\n")
    _write_manifest(args.out, _manifest(args, _config_echo(cfg), cfg.seed, started,
                                        {"csv": "simulate.csv", "summary": "simulate.json"}))
    for row in rows:
        print(",".join(_fmt(v) for v in row))
    return 0


def cmd_sweep(args) -> int:
    started = _now()
    cfg = _load_config(args)
    if len(cfg.classifiers) != 1:
        raise ConfigError("sweep fits one classifier; give a single 'classifier = ...'")
    os.makedirs(args.out, exist_ok=True)
    scfg = cfg.sweep_config(cfg.classifiers[0])
    points = run_grid(scfg, threads=args.threads)
    with open(os.path.join(args.out, "sweep_points.csv"), "w", newline="") as fh:
        fh.write(_csv_header(cfg.seed))
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SIMULATE_COLUMNS)
        for p in points:
            e = p.estimate
            w.writerow([_fmt(v) for v in (p.m, p.N, p.n, scfg.classifier_id, p.r, e.trials, e.errors_h0,
                                          e.errors_h1, p.p_hat, float(p.ci_low), float(p.ci_high), p.censored)])
    scale = LN10 if args.log10 else 1.0
    with open(os.path.join(args.out, "sweep_plot.dat"), "w") as fh:
        fh.write(_csv_header(cfg.seed))
        fh.write(f"# r  -log{'10' if args.log10 else ''}(p_hat); censored points omitted\n")
        for p in points:
            if not p.censored:
                fh.write(f"{_fmt(p.r)} {_fmt(p.minus_log_p / scale)}\n")
    outputs = {"points": "sweep_points.csv", "plot": "sweep_plot.dat", "fit": "sweep_fit.json"}
    report = {"manifest": "manifest.json", "master_seed": cfg.seed, "classifier": scfg.classifier_id}
    try:
        fit = fit_exponent(points)
    except (DegenerateFitError, FitUndefinedError) as exc:
        report["error"] = str(exc)
        report["censored"] = [[p.m, p.N, p.n, p.r, p.estimate.rule_of_three] for p in points if p.censored]
        _dump_json(os.path.join(args.out, "sweep_fit.json"), report)
        _write_manifest(args.out, _manifest(args, _config_echo(cfg), cfg.seed, started, outputs))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    report.update(slope=fit.slope, intercept=fit.intercept, r_squared=fit.r_squared,
                  censored=[[p.m, p.N, p.n, p.r, p.estimate.rule_of_three] for p in fit.censored_points])
    _dump_json(os.path.join(args.out, "sweep_fit.json"), report)
    _write_manifest(args.out, _manifest(args, _config_echo(cfg), cfg.seed, started, outputs))
    _emit({"slope": fit.slope, "intercept": fit.intercept, "r_squared": fit.r_squared,
           "censored": len(fit.censored_points)})
    return 0


def _dump_json(path, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, default=_fmt)
        fh.write("\n")


def _emit(report: dict) -> None:
    for k, v in report.items():
        print(f"{k}={_fmt(v)}")


def _finish_report(args, report: dict, log_keys) -> int:
    started = report.pop("_started", None)
    if args.log10:
        for k in log_keys:
            if k in report and isinstance(report[k], float):
                report[k] = report[k] / LN10
        report["log_base"] = 10
    else:
        report["log_base"] = "e"
    _emit(report)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        _dump_json(os.path.join(args.out, f"{args.command}.json"), report)
        echo = {k: v for k, v in vars(args).items() if k != "func"}
        _write_manifest(args.out, _manifest(args, echo, args.seed or 0, started or _now(),
                                            {"report": f"{args.command}.json"}))
    return 0


def _pair_from_args(args):
    if not (args.pi and args.mu) and args.m % 2:
        raise ConfigError(f"m={args.m} is odd: the bi-uniform pair needs an even alphabet size m (parity); "
                          "supply --pi and --mu files")
    if args.pi and args.mu:
        pi, mu = read_distribution(args.pi), read_distribution(args.mu)
    else:
        pi, mu = canonical_pair(args.m, args.epsilon)
        pi = read_distribution(args.pi) if args.pi else pi
        mu = read_distribution(args.mu) if args.mu else mu
    if pi.m != args.m or mu.m != args.m:
        raise ConfigError("distribution files must have alphabet size --m")
    return pi, mu


def cmd_exact(args) -> int:
    started = _now()
    report = {"_started": started, "which": args.which, "m": args.m, "N": args.N, "n": args.n}
    if args.which == "distinct":
        if args.pi:
            report["log_p"] = prob_all_distinct(read_distribution(args.pi), args.N)
        else:
            report["log_p"] = prob_all_distinct_uniform(args.m, args.N)
        log_keys = ["log_p"]
    elif args.which == "Cn":
        cn = prob_C_n(args.m, args.N, args.n)
        report.update(k=cn.k, log_p=cn.log_prob, asymptote=cn.asymptote)
        log_keys = ["log_p", "asymptote"]
    elif args.which == "A":
        pi, mu = _pair_from_args(args)
        report.update(log_p_x=prob_all_distinct(pi, args.N), log_p_y=prob_all_distinct(mu, args.N))
        report["log_p"] = report["log_p_x"] + report["log_p_y"]
        report["main_term"] = lemma_A_rate(args.epsilon, args.N, args.m)
        log_keys = ["log_p_x", "log_p_y", "log_p", "main_term"]
    else:
        pi, mu = _pair_from_args(args)
        seed = args.seed or 0
        ax = sample_histogram(pi, args.N, SeedSpec(seed, 0, StreamLabel.X))
        ay = sample_histogram(mu, args.N, SeedSpec(seed, 0, StreamLabel.Y))
        report["support_size"] = int(((ax.counts > 0) | (ay.counts > 0)).sum())
        report["log_p_z_pi"] = prob_event_B_given_xy(ax, ay, pi, args.n)
        report["log_p_z_mu"] = prob_event_B_given_xy(ax, ay, mu, args.n)
        log_keys = ["log_p_z_pi", "log_p_z_mu"]
    return _finish_report(args, report, log_keys)


def cmd_bounds(args) -> int:
    started = _now()
    pi, mu = _pair_from_args(args)
    nu = read_distribution(args.nu) if args.nu else pi
    gamma = args.gamma if args.gamma == "optimize" else float(args.gamma)
    b = chernoff_lambda_bound(pi, mu, nu, gamma, args.N, args.n)
    c_bar = args.c_bar if args.c_bar is not None else 1.0 + args.epsilon
    report = {
        "_started": started, "m": args.m, "N": args.N, "n": args.n,
        "gamma": b.gamma, "theta": b.theta,
        "linear_term": b.linear_term, "quadratic_term": b.quadratic_term, "main_term": b.main_term,
        "linear_coef": b.linear_coef, "quadratic_coef": b.quadratic_coef,
        "J_lower": achievability_exponent(args.epsilon, c_bar), "c_bar": c_bar,
        "converse_J2_literal": b.converse_j2, "note": b.dropped_remainder_note,
    }
    return _finish_report(args, report, [])


def cmd_counterexample(args) -> int:
    started = _now()
    res = conditional_false_alarm_experiment(
        args.m, args.N, args.n, args.epsilon, args.trials, args.seed or 0,
        args.confidence or 0.95, threads=args.threads,
    )
    report = {
        "_started": started, "m": res.m, "N": res.N, "n": res.n, "k": res.k, "trials": res.trials,
        "errors": res.errors, "p_cond": res.p_cond, "ci_low": float(res.ci_low), "ci_high": float(res.ci_high),
        "p_false_alarm": res.p_false_alarm, "log_prob_cn": res.log_prob_cn,
        "log_pe_bound": res.log_pe_bound, "asymptote": res.asymptote,
    }
    return _finish_report(args, report, ["log_prob_cn", "log_pe_bound", "asymptote"])


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH")
    common.add_argument("--seed", type=_u64, metavar="U64")
    common.add_argument("--threads", type=int, metavar="N",
                        help=f"worker threads (default: ${THREADS_ENV} or the CPU count)")
    common.add_argument("--out", metavar="DIR")
    common.add_argument("--confidence", type=float, metavar="LEVEL")
    common.add_argument("--log10", action="store_true", help="report log-probabilities in base 10")

    parser = argparse.ArgumentParser(prog="sparse-classify", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo error estimates per grid point")
    p.set_defaults(func=cmd_simulate, out_default="simulate_out")
    p = sub.add_parser("sweep", parents=[common], help="fit the exponent of -log p_hat against r")
    p.set_defaults(func=cmd_sweep, out_default="sweep_out")

    def sizes(p, need_n=True):
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--N", type=int, required=True)
        p.add_argument("--n", type=int, required=need_n, default=0)
        p.add_argument("--epsilon", type=float, default=0.5)
        p.add_argument("--pi", metavar="FILE")
        p.add_argument("--mu", metavar="FILE")

    p = sub.add_parser("exact", parents=[common], help="exact event probabilities")
    sizes(p, need_n=False)
    p.add_argument("--which", choices=["A", "B", "Cn", "distinct"], required=True)
    p.set_defaults(func=cmd_exact, out_default=None)

    p = sub.add_parser("bounds", parents=[common], help="log-MGF main terms and the exponent guarantee")
    sizes(p)
    p.add_argument("--c-bar", dest="c_bar", type=float)
    p.add_argument("--nu", metavar="FILE", help="test-sample distribution (default: pi)")
    p.add_argument("--gamma", default="optimize", help="number or 'optimize' (quadratic vertex)")
    p.set_defaults(func=cmd_bounds, out_default=None)

    p = sub.add_parser("counterexample", parents=[common], help="spiked-training-sample experiment for the F rule")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--epsilon", type=float, default=0.5)
    p.add_argument("--trials", type=int, default=10_000)
    p.set_defaults(func=cmd_counterexample, out_default=None)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.out is None:
        args.out = args.out_default
    if args.threads is not None and args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DegenerateFitError, FitUndefinedError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ValueError as exc:
        print(f"invalid argument: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
