"""Policy registry and the ``name:key=value,...`` selection syntax."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import ConfigError
from .baselines import (
    MaxMedian,
    ThresholdAscent,
    Uniform,
    chernoff_index,
    max_median_index,
    threshold_ascent_select,
    uniform_select,
)
from .etc import QoMaxETC, etc_commit, etc_exploration_lengths, fit_exploration_lengths
from .sda import QoMaxSDA, batch_target, forced_exploration

POLICIES = {
    "qomax-etc": QoMaxETC,
    "qomax-sda": QoMaxSDA,
    "threshold-ascent": ThresholdAscent,
    "max-median": MaxMedian,
    "uniform": Uniform,
}

# accepted parameters and their types
PARAMS = {
    "qomax-etc": {"q": float, "n_batch": int, "n_batches": int},
    "qomax-sda": {"q": float, "gamma": float},
    "threshold-ascent": {"s": int, "delta": float},
    "max-median": {},
    "uniform": {},
}


@dataclass(frozen=True)
class PolicySpec:
    """A policy name plus keyword parameters, e.g. ``qomax-sda:q=0.5,gamma=0.667``."""

    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in POLICIES:
            raise ConfigError(f"unknown algorithm {self.name!r}; choose from {sorted(POLICIES)}", field="algorithm")
        allowed = PARAMS[self.name]
        clean = {}
        for key, value in self.params.items():
            if key not in allowed:
                raise ConfigError(f"{self.name} has no parameter {key!r}", field=f"{self.name}.{key}")
            try:
                clean[key] = allowed[key](value)
            except (TypeError, ValueError):
                raise ConfigError(f"bad value {value!r}", field=f"{self.name}.{key}") from None
        object.__setattr__(self, "params", clean)

    @classmethod
    def parse(cls, text: str) -> "PolicySpec":
        name, _, rest = text.strip().partition(":")
        params = {}
        for item in filter(None, (p.strip() for p in rest.split(","))):
            key, sep, value = item.partition("=")
            if not sep:
                raise ConfigError(f"expected key=value, got {item!r}", field=name)
            params[key.strip()] = value.strip()
        return cls(name.strip(), params)

    @property
    def q(self) -> float | None:
        if self.name.startswith("qomax"):
            return self.params.get("q", 0.5)
        return None

    def build(self, n_arms: int):
        return POLICIES[self.name](n_arms, **self.params)

    def label(self) -> str:
        if not self.params:
            return self.name
        return self.name + ":" + ",".join(f"{k}={v}" for k, v in self.params.items())


__all__ = [
    "POLICIES",
    "PolicySpec",
    "QoMaxETC",
    "QoMaxSDA",
    "ThresholdAscent",
    "MaxMedian",
    "Uniform",
    "batch_target",
    "chernoff_index",
    "etc_commit",
    "etc_exploration_lengths",
    "fit_exploration_lengths",
    "forced_exploration",
    "max_median_index",
    "threshold_ascent_select",
    "uniform_select",
]
