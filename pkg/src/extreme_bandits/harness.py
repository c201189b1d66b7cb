"""
Experiment presets, config files and the parallel Monte Carlo runner.

A run sweeps every (algorithm, horizon) pair of an :class:`ExperimentConfig`,
plays ``trajectories`` independent trajectories for each and writes one
``summary.csv`` row per pair, plus ``trajectories.jsonl`` on request.
"""
from __future__ import annotations

import csv
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .distributions import (
    ArmDistribution,
    DiracParetoMixture,
    Exponential,
    Gaussian,
    GeneralizedGaussian,
    LogNormal,
    Pareto,
    from_dict,
)
from .errors import ConfigError, UnknownPreset
from .maxima_store import MaxRecord
from .policies import PolicySpec
from .simulator import QUANTILE_LEVELS, TrajectoryResult, run_trajectory, summarize

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

DEFAULT_HORIZONS = (1_000, 5_000, 10_000, 20_000)
DEFAULT_TRAJECTORIES = 500
DEFAULT_ALGORITHMS = ("qomax-etc:q=0.5", "qomax-sda:q=0.5,gamma=0.667", "threshold-ascent", "max-median", "uniform")

CSV_COLUMNS = (
    ["experiment", "algorithm", "q", "horizon", "mean_best_arm_frac", "per"]
    + [f"pulls_q{round(100 * q):02d}" for q in QUANTILE_LEVELS]
    + [f"max_q{round(100 * q):02d}" for q in QUANTILE_LEVELS]
)


@dataclass
class ExperimentConfig:
    """Arms, algorithms and Monte Carlo sizes of one experiment.

    ``dominant_arm`` is 1-based, as in config files; ``report_per`` switches off
    the proxy regret for laws whose expected maximum is not worth trusting.
    """

    arms: list[ArmDistribution]
    algorithms: list[PolicySpec] = field(default_factory=lambda: [PolicySpec.parse(a) for a in DEFAULT_ALGORITHMS])
    horizons: list[int] = field(default_factory=lambda: list(DEFAULT_HORIZONS))
    trajectories: int = DEFAULT_TRAJECTORIES
    master_seed: int = 0
    dominant_arm: int = 1
    name: str = "custom"
    report_per: bool = True

    def __post_init__(self):
        if not self.arms:
            raise ConfigError("at least one arm is required", field="arms")
        self.algorithms = [a if isinstance(a, PolicySpec) else PolicySpec.parse(a) for a in self.algorithms]
        if not self.algorithms:
            raise ConfigError("at least one algorithm is required", field="algorithms")
        if not self.horizons or any(int(h) < len(self.arms) for h in self.horizons):
            raise ConfigError(f"horizons must be >= the number of arms ({len(self.arms)})", field="horizons")
        self.horizons = sorted(set(int(h) for h in self.horizons))
        if self.trajectories < 1:
            raise ConfigError("trajectories must be >= 1", field="trajectories")
        if not 1 <= self.dominant_arm <= len(self.arms):
            raise ConfigError(f"dominant_arm must lie in [1, {len(self.arms)}]", field="dominant_arm")

    @property
    def dominant(self) -> ArmDistribution:
        return self.arms[self.dominant_arm - 1]


# standard deviations of the 20 Gaussian arms (mean 1) of preset 4
GAUSSIAN_STDS = (
    1.64, 2.29, 1.79, 2.67, 1.70, 1.36, 1.90, 2.19, 0.80, 0.12,
    1.65, 1.19, 1.88, 0.89, 3.35, 1.5, 2.22, 3.03, 1.08, 0.48,
)


def preset(experiment: int) -> ExperimentConfig:
    """Built-in experiments 1 to 8 with the desk-scale defaults."""
    if experiment == 1:
        arms = [Pareto(1.0, lam) for lam in (2.1, 2.3, 1.3, 1.1, 1.9)]
        dominant = 4
    elif experiment == 2:
        lams = (2.5, 2.8, 4.0, 3.0, 1.4, 1.4, 1.9)
        arms = [Pareto(1.1 if k == 4 else 1.0, lam) for k, lam in enumerate(lams)]
        dominant = 5
    elif experiment == 3:
        rates = (2.1, 2.4, 1.9, 1.3, 1.1, 2.9, 1.5, 2.2, 2.6, 1.4)
        arms = [Exponential(r) for r in rates]
        dominant = 5
    elif experiment == 4:
        arms = [Gaussian(1.0, s) for s in GAUSSIAN_STDS]
        dominant = GAUSSIAN_STDS.index(max(GAUSSIAN_STDS)) + 1
    elif experiment == 5:
        arms = [Pareto(1.0, lam) for lam in (5.0, 1.1, 2.0)]
        dominant = 2
    elif experiment == 6:
        arms = [Pareto(1.0, 1.5), Pareto(1.0, 3.0), DiracParetoMixture(0.8, 1.1)]
        dominant = 3
    elif experiment == 7:
        arms = [LogNormal(mu, s) for mu, s in zip((1.0, 1.5, 2.0, 3.0, 3.5), (4.0, 3.0, 2.0, 1.0, 0.5))]
        dominant = 1
    elif experiment == 8:
        arms = [GeneralizedGaussian(round(0.2 * i, 10)) for i in range(1, 9)]
        dominant = 1
    else:
        raise UnknownPreset(f"no preset {experiment!r}; presets are 1..8")
    return ExperimentConfig(
        arms=arms,
        dominant_arm=dominant,
        name=f"exp{experiment}",
        report_per=experiment not in (7, 8),
    )


# -- config files ------------------------------------------------------------

_CONFIG_KEYS = {"name", "preset", "arms", "algorithms", "horizons", "trajectories", "seed", "dominant_arm", "report_per"}


def _key_pattern(key: str) -> re.Pattern:
    return re.compile(r"""["']?\b%s\b["']?\s*[:=]""" % re.escape(key))


def _locate(text: str, path: str) -> int | None:
    """Best-effort 1-based line of a config field such as ``arms[2].lambda``."""
    parts = re.findall(r"[A-Za-z_]+|\[\d+\]", path)
    if not parts:
        return None
    match = _key_pattern(parts[0]).search(text) or re.search(r"\[\[\s*%s\s*\]\]" % re.escape(parts[0]), text)
    if match is None:
        return None
    pos = match.start()
    if len(parts) > 1 and parts[1].startswith("["):
        index = int(parts[1][1:-1])
        kinds = list(_key_pattern("kind").finditer(text, pos))
        if index < len(kinds):
            pos = kinds[index].start()
            end = kinds[index + 1].start() if index + 1 < len(kinds) else len(text)
            if len(parts) > 2:
                leaf = _key_pattern(parts[2]).search(text, pos, end)
                if leaf is not None:
                    pos = leaf.start()
    return text.count("\n", 0, pos) + 1


def _parse_text(text: str, fmt: str) -> dict:
    if fmt == "json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(exc.msg, line=exc.lineno) from None
    else:
        try:
            data = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            found = re.search(r"line (\d+)", str(exc))
            if found:
                line = int(found.group(1))
            elif "end of document" in str(exc):
                line = max(1, len(text.splitlines()))
            else:
                line = None
            raise ConfigError(str(exc), line=line) from None
    if not isinstance(data, dict):
        raise ConfigError("top level must be a table/object", line=1)
    return data


def _algorithm(item, index: int) -> PolicySpec:
    where = f"algorithms[{index}]"
    if isinstance(item, str):
        return PolicySpec.parse(item)
    if isinstance(item, dict) and "name" in item:
        params = {k: v for k, v in item.items() if k != "name"}
        return PolicySpec(str(item["name"]), params)
    raise ConfigError("expected 'name:key=value' or a table with a 'name' key", field=where)


def config_from_dict(data: dict) -> ExperimentConfig:
    """Build a config from parsed JSON/TOML; keys not given fall back to the preset, if any."""
    unknown = sorted(set(data) - _CONFIG_KEYS)
    if unknown:
        raise ConfigError(f"unknown key {unknown[0]!r}", field=unknown[0])
    base = preset(int(data["preset"])) if "preset" in data else None
    kwargs: dict = {}
    if "arms" in data:
        if not isinstance(data["arms"], list):
            raise ConfigError("arms must be a list", field="arms")
        kwargs["arms"] = [from_dict(arm, field=f"arms[{i}]") for i, arm in enumerate(data["arms"])]
    elif base is None:
        raise ConfigError("missing 'arms' (or a 'preset' to start from)", field="arms")
    if "algorithms" in data:
        items = data["algorithms"]
        if not isinstance(items, list):
            raise ConfigError("algorithms must be a list", field="algorithms")
        kwargs["algorithms"] = []
        for i, item in enumerate(items):
            try:
                kwargs["algorithms"].append(_algorithm(item, i))
            except ConfigError as exc:
                raise ConfigError(exc.message, field=f"algorithms[{i}]") from None
    for key, target, cast in (
        ("horizons", "horizons", lambda v: [int(h) for h in v]),
        ("trajectories", "trajectories", int),
        ("seed", "master_seed", int),
        ("dominant_arm", "dominant_arm", int),
        ("name", "name", str),
        ("report_per", "report_per", bool),
    ):
        if key in data:
            try:
                kwargs[target] = cast(data[key])
            except (TypeError, ValueError):
                raise ConfigError(f"bad value {data[key]!r}", field=key) from None
    if base is None:
        return ExperimentConfig(**kwargs)
    if "arms" in kwargs and "dominant_arm" not in kwargs:
        raise ConfigError("dominant_arm is required when overriding the preset arms", field="dominant_arm")
    return replace(base, **kwargs)


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    """Read a ``.json`` or ``.toml`` experiment file.

    Errors carry the offending field and, when it can be found, its line.
    """
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    fmt = "toml" if path.suffix.lower() == ".toml" else "json"
    data = _parse_text(text, fmt)
    try:
        return config_from_dict(data)
    except ConfigError as exc:
        if exc.line is None and exc.field:
            raise ConfigError(exc.message, field=exc.field, line=_locate(text, exc.field)) from None
        raise


# -- running -----------------------------------------------------------------

def trajectory_seed(master_seed: int, horizon: int, index: int) -> int:
    """Seed of trajectory ``index`` at ``horizon``; shared by all algorithms."""
    seq = np.random.SeedSequence(master_seed, spawn_key=(horizon, index))
    return int(seq.generate_state(1)[0])


def worker_count(requested: int | None = None) -> int:
    """Pool size: ``requested`` or the CPU count, capped by ``EB_THREADS``."""
    n = requested or os.cpu_count() or 1
    cap = os.environ.get("EB_THREADS")
    if cap:
        try:
            n = min(n, max(1, int(cap)))
        except ValueError:
            raise ConfigError(f"EB_THREADS must be an integer, got {cap!r}") from None
    return max(1, n)


def _run_chunk(arms, spec, horizon, seeds, dominant) -> list[TrajectoryResult]:
    return [run_trajectory(arms, spec, horizon, s, dominant) for s in seeds]


def run_trajectories(
    arms: Sequence[ArmDistribution],
    spec: PolicySpec,
    horizon: int,
    seeds: Sequence[int],
    dominant: int,
    workers: int = 1,
) -> list[TrajectoryResult]:
    """Results in the order of ``seeds``; ``dominant`` is 0-based."""
    if workers <= 1 or len(seeds) < 2:
        return _run_chunk(arms, spec, horizon, seeds, dominant)
    size = math.ceil(len(seeds) / (4 * workers))
    chunks = [list(seeds[i:i + size]) for i in range(0, len(seeds), size)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        parts = pool.map(_run_chunk, *zip(*[(arms, spec, horizon, c, dominant) for c in chunks]))
        return [r for part in parts for r in part]


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def summary_row(config: ExperimentConfig, spec: PolicySpec, horizon: int, results: list[TrajectoryResult]) -> list[str]:
    dominant = config.dominant if config.report_per else None
    s = summarize(results, dominant, horizon)
    row = [config.name, spec.label(), spec.q, horizon, s.mean_best_arm_fraction, s.per]
    return [_fmt(v) for v in row + list(s.pull_quantiles) + list(s.max_quantiles)]


def run_experiment(
    config: ExperimentConfig,
    output: str | os.PathLike,
    raw: bool = False,
    workers: int | None = None,
    log=None,
) -> Path:
    """Run every (algorithm, horizon) pair and write ``summary.csv`` (and ``trajectories.jsonl``)."""
    out = Path(output)
    out.mkdir(parents=True, exist_ok=True)
    workers = worker_count(workers)
    summary_path = out / "summary.csv"
    raw_file = open(out / "trajectories.jsonl", "w", encoding="utf-8", newline="\n") if raw else None
    try:
        with open(summary_path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(CSV_COLUMNS)
            for spec in config.algorithms:
                for horizon in config.horizons:
                    seeds = [trajectory_seed(config.master_seed, horizon, i) for i in range(config.trajectories)]
                    results = run_trajectories(
                        config.arms, spec, horizon, seeds, config.dominant_arm - 1, workers
                    )
                    writer.writerow(summary_row(config, spec, horizon, results))
                    fh.flush()
                    if log is not None:
                        log(f"{config.name} {spec.label()} T={horizon}: done ({len(results)} trajectories)")
                    if raw_file is not None:
                        for i, r in enumerate(results):
                            record = {"experiment": config.name, "algorithm": spec.label(), "horizon": horizon,
                                      "trajectory": i, **r.to_dict()}
                            raw_file.write(json.dumps(record) + "\n")
    finally:
        if raw_file is not None:
            raw_file.close()
    return summary_path


# -- storage benchmark -------------------------------------------------------

@dataclass(frozen=True)
class StorageStats:
    n: int
    reps: int
    mean_cells: float
    max_cells: int
    harmonic: float


def storage_benchmark(n: int, reps: int, seed: int) -> StorageStats:
    """Stream ``reps`` i.i.d. uniform sequences of length ``n`` through a MaxRecord."""
    rng = np.random.default_rng(seed)
    cells = np.empty(reps, dtype=np.int64)
    for r in range(reps):
        record = MaxRecord()
        update = record.efficient_update
        for i, x in enumerate(rng.random(n).tolist(), 1):
            update(i, x)
        cells[r] = len(record)
    h = math.fsum(1.0 / k for k in range(1, n + 1))
    return StorageStats(n=n, reps=reps, mean_cells=float(cells.mean()), max_cells=int(cells.max()), harmonic=h)
