"""
Reward laws for extreme bandit experiments.

Every law is a frozen dataclass exposing its survival function ``G(x) = P(X > x)``,
the CDF, and the inverse survival function used for inverse-transform sampling.
On top of that this module computes the growth of the expected maximum
``E[max(X_1, ..., X_T)]`` and the quantile level ``q~`` at which the distribution
of that maximum reaches its expectation (used by the proxy empirical regret).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import ClassVar

import numpy as np
from scipy import integrate, special

from .errors import ConfigError, UnsupportedTail

# Numeric E[max] truncates the integration range where the integrand drops below this.
INTEGRAND_CUTOFF = 1e-12


class ArmDistribution:
    """Common interface of the reward laws.

    Subclasses implement ``survival``, ``cdf`` and ``isf`` (inverse survival) on
    scalars or numpy arrays. Sampling is inverse transform: ``isf(U)`` with
    ``U`` uniform on (0, 1].
    """

    kind: ClassVar[str]
    # JSON key -> dataclass field
    _keys: ClassVar[dict[str, str]]
    # lower end of the support, -inf if unbounded
    floor: ClassVar[float] = -math.inf

    def survival(self, x):
        raise NotImplementedError

    def cdf(self, x):
        raise NotImplementedError

    def isf(self, u):
        raise NotImplementedError

    def support_floor(self) -> float:
        return self.floor

    def breakpoints(self) -> tuple[float, ...]:
        """Points where the survival function is not smooth (jumps, kinks)."""
        return ()

    def tail_integral(self, x: float) -> float:
        """``int_x^inf G(t) dt`` for ``x`` above the support floor."""
        raise NotImplementedError

    def from_uniform(self, u):
        """Map survival-level uniforms ``u`` in (0, 1] to samples."""
        return self.isf(u)

    def sample(self, rng: np.random.Generator, size=None):
        """Draw i.i.d. samples; returns a float when ``size`` is None."""
        u = 1.0 - rng.random(size)
        x = self.isf(u)
        return float(x) if size is None else np.asarray(x, dtype=float)

    def sample_max(self, rng: np.random.Generator, n: int, size=None):
        """Draw the maximum of ``n`` i.i.d. samples directly from its law ``F^n``."""
        v = 1.0 - rng.random(size)
        # P(max > x) = 1 - F(x)^n, so max = isf(1 - V^(1/n))
        g = -np.expm1(np.log(v) / n)
        x = self.isf(g)
        return float(x) if size is None else np.asarray(x, dtype=float)

    def to_dict(self) -> dict:
        fields = asdict(self)
        return {"kind": self.kind, **{key: fields[attr] for key, attr in self._keys.items()}}


@dataclass(frozen=True)
class Pareto(ArmDistribution):
    """Exact power law ``G(x) = C x^-lambda`` above the floor ``C^(1/lambda)``."""

    scale_c: float = 1.0
    lam: float = 2.0

    kind: ClassVar[str] = "pareto"
    _keys: ClassVar[dict[str, str]] = {"c": "scale_c", "lambda": "lam"}

    def __post_init__(self):
        if not self.scale_c > 0:
            raise ValueError(f"pareto scale must be positive, got {self.scale_c}")
        if not self.lam > 0:
            raise ValueError(f"pareto tail parameter must be positive, got {self.lam}")

    def support_floor(self) -> float:
        return self.scale_c ** (1.0 / self.lam)

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", over="ignore"):
            g = np.where(x > self.support_floor(), self.scale_c * np.abs(x) ** -self.lam, 1.0)
        return np.minimum(g, 1.0)[()]

    def cdf(self, x):
        return (1.0 - np.asarray(self.survival(x)))[()]

    def isf(self, u):
        u = np.asarray(u, dtype=float)
        return ((self.scale_c / u) ** (1.0 / self.lam))[()]

    def tail_integral(self, x: float) -> float:
        return self.scale_c * x ** (1.0 - self.lam) / (self.lam - 1.0)


@dataclass(frozen=True)
class Exponential(ArmDistribution):
    rate: float = 1.0

    kind: ClassVar[str] = "exponential"
    _keys: ClassVar[dict[str, str]] = {"rate": "rate"}
    floor: ClassVar[float] = 0.0

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError(f"exponential rate must be positive, got {self.rate}")

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, np.exp(-self.rate * np.maximum(x, 0.0)), 1.0)[()]

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, -np.expm1(-self.rate * np.maximum(x, 0.0)), 0.0)[()]

    def isf(self, u):
        return (-np.log(np.asarray(u, dtype=float)) / self.rate)[()]

    def tail_integral(self, x: float) -> float:
        return math.exp(-self.rate * x) / self.rate


@dataclass(frozen=True)
class Gaussian(ArmDistribution):
    mean: float = 0.0
    std: float = 1.0

    kind: ClassVar[str] = "gaussian"
    _keys: ClassVar[dict[str, str]] = {"mean": "mean", "std": "std"}

    def __post_init__(self):
        if not self.std > 0:
            raise ValueError(f"gaussian std must be positive, got {self.std}")

    def survival(self, x):
        z = (np.asarray(x, dtype=float) - self.mean) / self.std
        return special.ndtr(-z)[()]

    def cdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mean) / self.std
        return special.ndtr(z)[()]

    def isf(self, u):
        return (self.mean - self.std * special.ndtri(np.asarray(u, dtype=float)))[()]

    def tail_integral(self, x: float) -> float:
        z = (x - self.mean) / self.std
        pdf = math.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi)
        return self.std * (pdf - z * float(special.ndtr(-z)))


@dataclass(frozen=True)
class LogNormal(ArmDistribution):
    """``log X ~ N(mu, sigma^2)``."""

    mu: float = 0.0
    sigma: float = 1.0

    kind: ClassVar[str] = "lognormal"
    _keys: ClassVar[dict[str, str]] = {"mu": "mu", "sigma": "sigma"}
    floor: ClassVar[float] = 0.0

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError(f"log-normal sigma must be positive, got {self.sigma}")

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (np.log(np.where(x > 0, x, 1.0)) - self.mu) / self.sigma
        return np.where(x > 0, special.ndtr(-z), 1.0)[()]

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            z = (np.log(np.where(x > 0, x, 1.0)) - self.mu) / self.sigma
        return np.where(x > 0, special.ndtr(z), 0.0)[()]

    def isf(self, u):
        return np.exp(self.mu - self.sigma * special.ndtri(np.asarray(u, dtype=float)))[()]

    def tail_integral(self, x: float) -> float:
        # E[(X - x)^+]
        z = (math.log(x) - self.mu) / self.sigma
        mean = math.exp(self.mu + 0.5 * self.sigma**2)
        return mean * float(special.ndtr(self.sigma - z)) - x * float(special.ndtr(-z))


@dataclass(frozen=True)
class GeneralizedGaussian(ArmDistribution):
    """Symmetric law with density proportional to ``exp(-|x|^beta)``."""

    beta: float = 2.0

    kind: ClassVar[str] = "generalized_gaussian"
    _keys: ClassVar[dict[str, str]] = {"beta": "beta"}

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError(f"generalized gaussian beta must be positive, got {self.beta}")

    def _half_tail(self, x):
        # P(X > |x|) = Q(1/beta, |x|^beta) / 2, |X|^beta ~ Gamma(1/beta)
        with np.errstate(over="ignore"):
            return 0.5 * special.gammaincc(1.0 / self.beta, np.abs(x) ** self.beta)

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        tail = self._half_tail(x)
        return np.where(x >= 0, tail, 1.0 - tail)[()]

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        tail = self._half_tail(x)
        return np.where(x >= 0, 1.0 - tail, tail)[()]

    def isf(self, u):
        u = np.asarray(u, dtype=float)
        a = 1.0 / self.beta
        upper = special.gammainccinv(a, np.clip(2.0 * u, 0.0, 1.0)) ** a
        lower = -special.gammainccinv(a, np.clip(2.0 * (1.0 - u), 0.0, 1.0)) ** a
        return np.where(u <= 0.5, upper, lower)[()]

    def tail_integral(self, x: float) -> float:
        # E[(X - x)^+] for x >= 0
        a = 1.0 / self.beta
        first_moment = 0.5 * math.exp(math.lgamma(2 * a) - math.lgamma(a))
        upper = first_moment * float(special.gammaincc(2 * a, x**self.beta))
        return upper - x * float(self.survival(x))


@dataclass(frozen=True)
class DiracParetoMixture(ArmDistribution):
    """Reward 0 with probability ``zero_prob``, otherwise Pareto(1, lambda)."""

    zero_prob: float = 0.8
    lam: float = 1.1

    kind: ClassVar[str] = "dirac_pareto"
    _keys: ClassVar[dict[str, str]] = {"zero_prob": "zero_prob", "lambda": "lam"}
    floor: ClassVar[float] = 0.0

    def __post_init__(self):
        if not 0.0 <= self.zero_prob < 1.0:
            raise ValueError(f"zero_prob must lie in [0, 1), got {self.zero_prob}")
        if not self.lam > 0:
            raise ValueError(f"pareto tail parameter must be positive, got {self.lam}")

    def breakpoints(self) -> tuple[float, ...]:
        return (1.0,)

    def survival(self, x):
        x = np.asarray(x, dtype=float)
        w = 1.0 - self.zero_prob
        with np.errstate(divide="ignore"):
            tail = w * np.maximum(np.abs(x), 1.0) ** -self.lam
        return np.where(x < 0, 1.0, tail)[()]

    def cdf(self, x):
        return (1.0 - np.asarray(self.survival(x)))[()]

    def isf(self, u):
        # u >= 1 - p is the Bernoulli "zero" branch; below it, u / (1 - p) is a
        # fresh uniform for the Pareto part.
        u = np.asarray(u, dtype=float)
        w = 1.0 - self.zero_prob
        with np.errstate(divide="ignore"):
            pareto = (w / u) ** (1.0 / self.lam)
        return np.where(u >= w, 0.0, pareto)[()]

    def tail_integral(self, x: float) -> float:
        w = 1.0 - self.zero_prob
        return w * x ** (1.0 - self.lam) / (self.lam - 1.0)


KINDS: dict[str, type[ArmDistribution]] = {
    cls.kind: cls
    for cls in (Pareto, Exponential, Gaussian, LogNormal, GeneralizedGaussian, DiracParetoMixture)
}
_ALIASES = {
    "exp": "exponential",
    "normal": "gaussian",
    "gauss": "gaussian",
    "log-normal": "lognormal",
    "gengauss": "generalized_gaussian",
    "generalized-gaussian": "generalized_gaussian",
    "mixture": "dirac_pareto",
    "dirac-pareto": "dirac_pareto",
}
# positional parameter order for the compact "kind:a,b" syntax
_POSITIONAL = {
    "pareto": ("c", "lambda"),
    "exponential": ("rate",),
    "gaussian": ("mean", "std"),
    "lognormal": ("mu", "sigma"),
    "generalized_gaussian": ("beta",),
    "dirac_pareto": ("zero_prob", "lambda"),
}


def _canonical_kind(kind: str, field: str = "kind") -> str:
    kind = str(kind).strip().lower()
    kind = _ALIASES.get(kind, kind)
    if kind not in KINDS:
        raise ConfigError(f"unknown distribution kind {kind!r} (expected one of {sorted(KINDS)})", field)
    return kind


def from_dict(data: dict, field: str = "arm") -> ArmDistribution:
    """Build a distribution from its config form, e.g. ``{"kind": "pareto", "c": 1.0, "lambda": 1.1}``."""
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigError("expected an object with a 'kind' key", field)
    kind = _canonical_kind(data["kind"], f"{field}.kind")
    cls = KINDS[kind]
    unknown = set(data) - {"kind"} - set(cls._keys)
    if unknown:
        raise ConfigError(f"unexpected keys {sorted(unknown)} for kind {kind!r}", field)
    kwargs = {}
    for key, attr in cls._keys.items():
        if key in data:
            value = data[key]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(f"expected a number, got {value!r}", f"{field}.{key}")
            kwargs[attr] = float(value)
    try:
        return cls(**kwargs)
    except ValueError as exc:
        raise ConfigError(str(exc), field) from exc


def parse_spec(text: str) -> ArmDistribution:
    """Parse the compact CLI form ``kind:p1,p2`` (e.g. ``pareto:1,1.5``)."""
    kind, _, params = text.partition(":")
    kind = _canonical_kind(kind)
    values = [float(v) for v in params.split(",") if v.strip()] if params else []
    names = _POSITIONAL[kind]
    if len(values) > len(names):
        raise ConfigError(f"too many parameters for {kind!r}: expected {', '.join(names)}", text)
    return from_dict({"kind": kind, **dict(zip(names, values))}, text)


def sample(dist: ArmDistribution, rng: np.random.Generator) -> float:
    return dist.sample(rng)


def survival(dist: ArmDistribution, x):
    return dist.survival(x)


def _exceed(dist: ArmDistribution, x: float, horizon: int) -> float:
    """P(max of `horizon` draws > x), computed without cancellation."""
    g = float(dist.survival(x))
    if g >= 1.0:
        return 1.0
    return -math.expm1(horizon * math.log1p(-g))


def _below(dist: ArmDistribution, x: float, horizon: int) -> float:
    """P(max of `horizon` draws <= x)."""
    f = float(dist.cdf(x))
    if f <= 0.0:
        return 0.0
    return math.exp(horizon * math.log(f))


def _integrate(func, points) -> float:
    total = 0.0
    for a, b in zip(points[:-1], points[1:]):
        if b <= a:
            continue
        value, _ = integrate.quad(func, a, b, epsabs=1e-13 * max(1.0, abs(b)), epsrel=1e-11, limit=200)
        total += value
    return total


def expected_max_numeric(dist: ArmDistribution, horizon: int) -> float:
    """``E[max(X_1..X_T)]`` by adaptive quadrature of ``P(max > x)``.

    Uses ``E[M] = a + int_a^inf P(M > x) dx - int_-inf^a P(M <= x) dx`` with ``a``
    the support floor (or 0 for laws supported on the whole line). Quadrature
    stops where ``P(M > x) ~ T G(x)`` falls below ``INTEGRAND_CUTOFF``; the
    remainder beyond that point is added as ``T * int G``, which is not
    negligible for polynomial tails close to lambda = 1. Intermediate
    breakpoints sit on quantiles of ``G`` spaced by decades so that heavy tails
    spanning many orders of magnitude stay well resolved.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    _check_finite_mean(dist)
    floor = dist.support_floor()
    anchor = floor if math.isfinite(floor) else 0.0
    upper = float(dist.isf(INTEGRAND_CUTOFF / horizon))
    probs = [10.0**j / horizon for j in range(3, -13, -1)]
    points = {anchor, upper}
    points.update(float(dist.isf(p)) for p in probs if p < 1.0)
    points.update(dist.breakpoints())
    grid = sorted(p for p in points if anchor <= p <= upper)
    total = anchor + _integrate(lambda x: _exceed(dist, x, horizon), grid)
    total += horizon * dist.tail_integral(upper)
    if not math.isfinite(floor):
        # left part: P(M <= x) < cutoff below this point
        lower = float(dist.isf(1.0 - INTEGRAND_CUTOFF ** (1.0 / horizon)))
        if lower < anchor:
            left = {lower, anchor}
            left.update(float(dist.isf(1.0 - p)) for p in (0.5, 0.9, 0.99, 0.999))
            grid = sorted(p for p in left if lower <= p <= anchor)
            total -= _integrate(lambda x: _below(dist, x, horizon), grid)
    return total


def _check_finite_mean(dist: ArmDistribution) -> None:
    if isinstance(dist, (Pareto, DiracParetoMixture)) and dist.lam <= 1.0:
        raise UnsupportedTail(f"expected maximum is infinite for tail parameter lambda={dist.lam} <= 1")


def expected_max_approx(dist: ArmDistribution, horizon: int) -> float:
    """Growth-rate approximation of the expected maximum of ``horizon`` draws.

    Exponential: ``log(T) / rate``; Pareto: ``(C T)^(1/lambda) Gamma(1 - 1/lambda)``.
    Other laws fall back to :func:`expected_max_numeric`.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    _check_finite_mean(dist)
    if isinstance(dist, Exponential):
        return math.log(horizon) / dist.rate
    if isinstance(dist, Pareto):
        return (dist.scale_c * horizon) ** (1.0 / dist.lam) * math.gamma(1.0 - 1.0 / dist.lam)
    return expected_max_numeric(dist, horizon)


def expected_max_exact(dist: ArmDistribution, horizon: int) -> float:
    """Finite-horizon expected maximum where a closed form exists (Pareto, exponential)."""
    _check_finite_mean(dist)
    if isinstance(dist, Exponential):
        return math.fsum(1.0 / k for k in range(1, horizon + 1)) / dist.rate
    if isinstance(dist, Pareto):
        a = 1.0 / dist.lam
        # C^(1/lam) * T * B(1 - 1/lam, T)
        log_beta = math.lgamma(horizon + 1) - math.lgamma(horizon + 1 - a)
        return dist.scale_c**a * math.gamma(1.0 - a) * math.exp(log_beta)
    return expected_max_numeric(dist, horizon)


def per_quantile(dist: ArmDistribution, horizon: int) -> float:
    """Level ``q~`` with ``P(M_T <= E[M_T]) = q~`` for the maximum ``M_T`` of ``horizon`` draws."""
    if isinstance(dist, Exponential):
        _check_finite_mean(dist)
        return math.exp(-1.0)
    if isinstance(dist, Pareto):
        _check_finite_mean(dist)
        return math.exp(-1.0 / math.gamma(1.0 - 1.0 / dist.lam) ** dist.lam)
    target = expected_max_approx(dist, horizon)
    return math.exp(-horizon * float(dist.survival(target)))
