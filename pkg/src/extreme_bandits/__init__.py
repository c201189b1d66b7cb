"""Extreme bandits: QoMax estimators, QoMax-ETC / QoMax-SDA, baselines and a Monte Carlo harness."""
from .distributions import (
    ArmDistribution,
    DiracParetoMixture,
    Exponential,
    Gaussian,
    GeneralizedGaussian,
    LogNormal,
    Pareto,
    expected_max_approx,
    per_quantile,
    sample,
    survival,
)
from .errors import ExtremeBanditsError
from .maxima_store import MaxRecord
from .policies import PolicySpec, QoMaxETC, QoMaxSDA
from .qomax import ArmHistory, qomax_full, qomax_of_maxima, qomax_subsample
from .simulator import TrajectoryResult, run_trajectory, summarize

__version__ = "0.1.0"

__all__ = [
    "ArmDistribution",
    "ArmHistory",
    "DiracParetoMixture",
    "Exponential",
    "ExtremeBanditsError",
    "Gaussian",
    "GeneralizedGaussian",
    "LogNormal",
    "MaxRecord",
    "Pareto",
    "PolicySpec",
    "QoMaxETC",
    "QoMaxSDA",
    "TrajectoryResult",
    "expected_max_approx",
    "per_quantile",
    "qomax_full",
    "qomax_of_maxima",
    "qomax_subsample",
    "run_trajectory",
    "sample",
    "summarize",
    "survival",
]
