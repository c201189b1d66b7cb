"""Command-line entry point: ``extreme-bandits {run,storage-bench,concentration,expected-max}``."""
from __future__ import annotations

import argparse
import csv
import math
import sys
from dataclasses import replace

from .distributions import expected_max_approx, expected_max_exact, expected_max_numeric, parse_spec, per_quantile
from .errors import ConfigError, ExtremeBanditsError, UnknownPreset
from .harness import load_config, preset, run_experiment, storage_benchmark
from .oracle import mc_comparison_prob, mc_max_samples
from .policies import PolicySpec


def _int_list(text: str) -> list[int]:
    try:
        return [int(float(v)) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="extreme-bandits", description="Extreme bandit experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment and write summary.csv")
    source = run.add_mutually_exclusive_group(required=True)
    source.add_argument("--preset", type=int, help="built-in experiment 1..8")
    source.add_argument("--config", help="JSON or TOML experiment file")
    run.add_argument("--algo", action="append", help="algorithm, e.g. qomax-sda:q=0.5,gamma=0.667 (repeatable)")
    run.add_argument("--horizon", action="append", type=_int_list, help="horizon(s), comma-separated or repeated")
    run.add_argument("--trajectories", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--workers", type=int, default=None, help="worker processes (capped by EB_THREADS)")
    run.add_argument("-o", "--output", required=True, help="output directory")
    run.add_argument("--raw", action="store_true", help="also write trajectories.jsonl")
    run.add_argument("--quiet", action="store_true")

    bench = sub.add_parser("storage-bench", help="mean stored maxima versus the harmonic number")
    bench.add_argument("--n", type=int, default=10_000)
    bench.add_argument("--reps", type=int, default=1000)
    bench.add_argument("--seed", type=int, default=0)

    conc = sub.add_parser("concentration", help="Monte Carlo P(QoMax_1 <= QoMax_2) per batch count")
    conc.add_argument("--pair", nargs=2, metavar=("DIST1", "DIST2"), required=True,
                      help="distributions as kind:params, e.g. pareto:1,1.5 pareto:1,2")
    conc.add_argument("--n", type=int, default=30)
    conc.add_argument("--batches", type=_int_list, default=[10, 40, 160])
    conc.add_argument("--q", type=float, default=0.5)
    conc.add_argument("--reps", type=int, default=10_000)
    conc.add_argument("--seed", type=int, default=0)
    conc.add_argument("--method", choices=("auto", "brute", "maxlaw"), default="auto")

    em = sub.add_parser("expected-max", help="expected maximum of T draws and the PER quantile")
    em.add_argument("--dist", required=True, help="distribution as kind:params")
    em.add_argument("--horizon", type=_int_list, required=True)
    em.add_argument("--reps", type=int, default=0, help="Monte Carlo replications (0 to skip)")
    em.add_argument("--seed", type=int, default=0)
    return parser


def _cmd_run(args) -> int:
    config = preset(args.preset) if args.preset is not None else load_config(args.config)
    overrides = {}
    if args.algo:
        overrides["algorithms"] = [PolicySpec.parse(a) for a in args.algo]
    if args.horizon:
        overrides["horizons"] = [h for group in args.horizon for h in group]
    if args.trajectories is not None:
        overrides["trajectories"] = args.trajectories
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if overrides:
        config = replace(config, **overrides)
    log = None if args.quiet else (lambda msg: print(msg, file=sys.stderr))
    path = run_experiment(config, args.output, raw=args.raw, workers=args.workers, log=log)
    print(path)
    return 0


def _cmd_storage(args) -> int:
    stats = storage_benchmark(args.n, args.reps, args.seed)
    print(f"n={stats.n} reps={stats.reps}")
    print(f"mean_cells={stats.mean_cells:.4f}")
    print(f"max_cells={stats.max_cells}")
    print(f"harmonic={stats.harmonic:.4f}")
    print(f"relative_gap={(stats.mean_cells - stats.harmonic) / stats.harmonic:+.4f}")
    return 0


def _cmd_concentration(args) -> int:
    d1, d2 = (parse_spec(p) for p in args.pair)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    writer.writerow(["n", "b", "q", "reps", "p_fail", "se"])
    for i, b in enumerate(args.batches):
        p, se = mc_comparison_prob(d1, d2, args.n, b, args.q, args.reps, args.seed + i, args.method)
        writer.writerow([args.n, b, args.q, args.reps, repr(p), repr(se)])
    return 0


def _cmd_expected_max(args) -> int:
    dist = parse_spec(args.dist)
    writer = csv.writer(sys.stdout, lineterminator="\n")
    header = ["horizon", "approx", "exact", "numeric", "per_quantile"]
    if args.reps:
        header += ["mc_mean", "mc_se"]
    writer.writerow(header)
    for i, horizon in enumerate(args.horizon):
        row = [horizon, expected_max_approx(dist, horizon), expected_max_exact(dist, horizon),
               expected_max_numeric(dist, horizon), per_quantile(dist, horizon)]
        if args.reps:
            maxima = mc_max_samples(dist, horizon, args.reps, args.seed + i, method="auto")
            row += [float(maxima.mean()), float(maxima.std(ddof=1) / math.sqrt(args.reps))]
        writer.writerow([row[0]] + [repr(float(v)) for v in row[1:]])
    return 0


COMMANDS = {
    "run": _cmd_run,
    "storage-bench": _cmd_storage,
    "concentration": _cmd_concentration,
    "expected-max": _cmd_expected_max,
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except (ConfigError, UnknownPreset) as exc:
        print(f"extreme-bandits: error: {exc}", file=sys.stderr)
        return 2
    except ExtremeBanditsError as exc:
        print(f"extreme-bandits: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"extreme-bandits: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
