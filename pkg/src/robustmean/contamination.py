"""Samplers and replacement-contamination adversaries.

Draws are inverse-CDF transforms of the counter-based uniforms in
:mod:`robustmean.rng`. Adversaries replace exactly ``m`` points of a clean
sample with large finite values; the estimator-specific constructions
(:func:`mom_adversary`, :func:`lm_adversary`) reproduce the breakdown
arguments for median-of-means and the two-sample trimmed mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Literal

import numpy as np
from scipy import integrate, optimize, stats

from . import rng
from .estimators import (
    Sample,
    SampleLike,
    _trim_count,
    as_sample,
    mom_partition,
)

__all__ = [
    "DEFAULT_SCHEDULE",
    "FAMILIES",
    "STRATEGIES",
    "DistributionSpec",
    "ContaminationSpec",
    "draw",
    "contaminate",
    "escalate",
    "mom_adversary",
    "lm_adversary",
]

DEFAULT_SCHEDULE = (1e3, 1e6, 1e9, 1e12)

FAMILIES = ("gaussian", "student_t", "pareto", "lognormal", "point_mass_mixture")
STRATEGIES = ("point_mass", "escalating", "mom_aware", "lm_aware")

_FAMILY_DEFAULTS = {
    "gaussian": {"loc": 0.0, "scale": 1.0},
    "student_t": {"df": 3.0, "loc": 0.0, "scale": 1.0},
    "pareto": {"alpha": 1.5, "xm": 1.0},
    "lognormal": {"mu": 0.0, "s": 1.0},
    "point_mass_mixture": {"value": 0.0, "weight": 1.0, "loc": 0.0, "scale": 1.0},
}


def _smallest_crossing(g, p: float, lo: float, hi: float, iters: int = 200) -> float:
    """Smallest ``x`` in ``[lo, hi]`` with nondecreasing ``g(x) >= p``."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) >= p:
            hi = mid
        else:
            lo = mid
    return hi


@dataclass(frozen=True)
class DistributionSpec:
    """A named distribution with its population location and scale.

    ``true_median`` and ``true_mad`` are always available; ``true_mean`` and
    ``true_sd`` are ``None`` when the moment does not exist (e.g. Pareto
    with ``alpha <= 2`` has no variance).

    Families and parameters:

    - ``gaussian(loc, scale)``
    - ``student_t(df, loc, scale)``
    - ``pareto(alpha, xm)``: density ``alpha xm^alpha / x^(alpha+1)`` on ``x >= xm``
    - ``lognormal(mu, s)``: ``exp(mu + s Z)``
    - ``point_mass_mixture(value, weight, loc, scale)``: ``value`` with
      probability ``weight``, else ``gaussian(loc, scale)``
    """

    family: str
    parameters: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        unknown = set(self.parameters) - set(_FAMILY_DEFAULTS[self.family])
        if unknown:
            raise ValueError(f"unknown {self.family} parameters: {sorted(unknown)}")
        full = {**_FAMILY_DEFAULTS[self.family], **self.parameters}
        full = {k: float(v) for k, v in full.items()}
        object.__setattr__(self, "parameters", full)
        self._validate()

    # convenience constructors
    @classmethod
    def gaussian(cls, loc: float = 0.0, scale: float = 1.0) -> "DistributionSpec":
        return cls("gaussian", {"loc": loc, "scale": scale})

    @classmethod
    def student_t(cls, df: float, loc: float = 0.0, scale: float = 1.0) -> "DistributionSpec":
        return cls("student_t", {"df": df, "loc": loc, "scale": scale})

    @classmethod
    def pareto(cls, alpha: float, xm: float = 1.0) -> "DistributionSpec":
        return cls("pareto", {"alpha": alpha, "xm": xm})

    @classmethod
    def lognormal(cls, mu: float = 0.0, s: float = 1.0) -> "DistributionSpec":
        return cls("lognormal", {"mu": mu, "s": s})

    @classmethod
    def point_mass(cls, value: float) -> "DistributionSpec":
        return cls("point_mass_mixture", {"value": value, "weight": 1.0})

    @classmethod
    def point_mass_mixture(
        cls, value: float, weight: float, loc: float = 0.0, scale: float = 1.0
    ) -> "DistributionSpec":
        return cls(
            "point_mass_mixture",
            {"value": value, "weight": weight, "loc": loc, "scale": scale},
        )

    def _validate(self) -> None:
        p = self.parameters
        if any(not math.isfinite(v) for v in p.values()):
            raise ValueError("distribution parameters must be finite")
        positive = {
            "gaussian": ("scale",),
            "student_t": ("df", "scale"),
            "pareto": ("alpha", "xm"),
            "lognormal": ("s",),
            "point_mass_mixture": ("scale",),
        }[self.family]
        for name in positive:
            if not p[name] > 0:
                raise ValueError(f"{self.family} parameter {name} must be positive")
        if self.family == "point_mass_mixture" and not 0 <= p["weight"] <= 1:
            raise ValueError("mixture weight must lie in [0, 1]")

    def to_dict(self) -> dict:
        return {"family": self.family, "parameters": dict(self.parameters)}

    @classmethod
    def from_dict(cls, d: dict) -> "DistributionSpec":
        unknown = set(d) - {"family", "parameters"}
        if unknown:
            raise ValueError(f"unknown distribution fields: {sorted(unknown)}")
        return cls(d["family"], dict(d.get("parameters", {})))

    # ------------------------------------------------------------------
    # population quantities

    @cached_property
    def _frozen(self):
        p = self.parameters
        if self.family == "gaussian":
            return stats.norm(loc=p["loc"], scale=p["scale"])
        if self.family == "student_t":
            return stats.t(p["df"], loc=p["loc"], scale=p["scale"])
        if self.family == "pareto":
            return stats.pareto(p["alpha"], scale=p["xm"])
        if self.family == "lognormal":
            return stats.lognorm(p["s"], scale=math.exp(p["mu"]))
        return stats.norm(loc=p["loc"], scale=p["scale"])

    @property
    def is_mixture(self) -> bool:
        return self.family == "point_mass_mixture"

    @property
    def symmetric_center(self) -> float | None:
        """Center of symmetry, or ``None`` for skewed families."""
        if self.family in ("gaussian", "student_t"):
            return self.parameters["loc"]
        if self.is_mixture:
            p = self.parameters
            if p["weight"] in (0.0, 1.0) or p["value"] == p["loc"]:
                return p["value"] if p["weight"] == 1.0 else p["loc"]
        return None

    def cdf(self, x):
        if not self.is_mixture:
            return self._frozen.cdf(x)
        p = self.parameters
        atom = np.where(np.asarray(x) >= p["value"], p["weight"], 0.0)
        return atom + (1.0 - p["weight"]) * self._frozen.cdf(x)

    def _cdf_left(self, x):
        # P(X < x)
        if not self.is_mixture:
            return self._frozen.cdf(x)
        p = self.parameters
        atom = np.where(np.asarray(x) > p["value"], p["weight"], 0.0)
        return atom + (1.0 - p["weight"]) * self._frozen.cdf(x)

    def pdf(self, x):
        """Density of the continuous part (the atom of a mixture is excluded)."""
        if not self.is_mixture:
            return self._frozen.pdf(x)
        return (1.0 - self.parameters["weight"]) * self._frozen.pdf(x)

    def quantile(self, q: float) -> float:
        """Generalized inverse ``inf{x : F(x) >= q}``."""
        if not 0 < q < 1:
            raise ValueError("q must lie in (0, 1)")
        if not self.is_mixture:
            return float(self._frozen.ppf(q))
        p = self.parameters
        if p["weight"] == 1.0:
            return p["value"]
        span = 40.0 * p["scale"] + abs(p["value"] - p["loc"])
        lo, hi = min(p["value"], p["loc"]) - span, max(p["value"], p["loc"]) + span
        return float(_smallest_crossing(lambda x: float(self.cdf(x)), q, lo, hi))

    def ppf(self, u: np.ndarray) -> np.ndarray:
        """Vectorized inverse CDF for the continuous families."""
        if self.is_mixture:
            raise ValueError("mixtures are sampled component-wise, not by ppf")
        return self._frozen.ppf(u)

    @cached_property
    def true_median(self) -> float:
        c = self.symmetric_center
        if c is not None:
            return float(c)
        return self.quantile(0.5)

    @cached_property
    def true_mad(self) -> float:
        med = self.true_median
        if self.family in ("gaussian", "student_t"):
            return float(self._frozen.ppf(0.75) - med)
        if self.is_mixture and self.parameters["weight"] == 1.0:
            return 0.0

        def g(d):
            return float(self.cdf(med + d) - self._cdf_left(med - d))

        hi = 1.0
        while g(hi) < 0.5:
            hi *= 2.0
        if self.is_mixture:
            return float(_smallest_crossing(g, 0.5, 0.0, hi))
        return float(optimize.brentq(lambda d: g(d) - 0.5, 0.0, hi, xtol=1e-14, rtol=1e-15))

    @cached_property
    def true_mean(self) -> float | None:
        if self.is_mixture:
            p = self.parameters
            return p["weight"] * p["value"] + (1.0 - p["weight"]) * p["loc"]
        m = float(self._frozen.mean())
        return m if math.isfinite(m) else None

    @cached_property
    def true_sd(self) -> float | None:
        if self.is_mixture:
            p = self.parameters
            w, mu = p["weight"], self.true_mean
            second = w * p["value"] ** 2 + (1 - w) * (p["scale"] ** 2 + p["loc"] ** 2)
            return math.sqrt(max(second - mu * mu, 0.0))
        s = float(self._frozen.std())
        return s if math.isfinite(s) else None

    def iqr(self) -> float:
        return self.quantile(0.75) - self.quantile(0.25)

    def winsorized_target(self, beta: float = 3.0) -> float:
        """Population winsorized mean ``E clip(X, L, U)``.

        ``L, U = median -/+ beta * MAD``. Exact for symmetric families,
        adaptive quadrature otherwise.
        """
        c = self.symmetric_center
        if c is not None:
            return float(c)
        med, scale = self.true_median, self.true_mad
        lo, hi = med - beta * scale, med + beta * scale
        if hi <= lo:
            return med
        if self.is_mixture:
            p = self.parameters
            atom = p["weight"] * min(max(p["value"], lo), hi)
            cont = stats.norm(loc=p["loc"], scale=p["scale"])
            body = _clipped_expectation(cont.cdf, cont.pdf, lo, hi)
            return atom + (1.0 - p["weight"]) * body
        return _clipped_expectation(self._frozen.cdf, self._frozen.pdf, lo, hi)

    def catoni_target(self, alpha: float = 1.0) -> float:
        """Root of ``E psi(alpha (X - mu)) = 0`` (what Catoni's estimator tracks)."""
        from .estimators import catoni_psi

        c = self.symmetric_center
        if c is not None:
            return float(c)
        if self.is_mixture:
            p = self.parameters
            cont = stats.norm(loc=p["loc"], scale=p["scale"])

            def score(mu):
                body, _ = integrate.quad(
                    lambda x: catoni_psi(alpha * (x - mu)) * cont.pdf(x), -np.inf, np.inf
                )
                return p["weight"] * catoni_psi(alpha * (p["value"] - mu)) + (1 - p["weight"]) * body
        else:
            lo_x, hi_x = self._frozen.support()

            def score(mu):
                val, _ = integrate.quad(
                    lambda x: catoni_psi(alpha * (x - mu)) * self._frozen.pdf(x),
                    lo_x, hi_x, limit=200,
                )
                return val

        a, b = self.quantile(0.01), self.quantile(0.99)
        return float(optimize.brentq(score, a, b, xtol=1e-12))

    def lm_target(self, epsilon: float) -> float:
        """``E clip(X, F^-1(eps), F^-1(1 - eps))``, the two-sample trimmed mean's limit."""
        c = self.symmetric_center
        if c is not None:
            return float(c)
        if epsilon == 0:
            if self.true_mean is None:
                raise ValueError("untrimmed mean does not exist for this distribution")
            return self.true_mean
        lo, hi = self.quantile(epsilon), self.quantile(1.0 - epsilon)
        if self.is_mixture:
            p = self.parameters
            cont = stats.norm(loc=p["loc"], scale=p["scale"])
            atom = p["weight"] * min(max(p["value"], lo), hi)
            return atom + (1.0 - p["weight"]) * _clipped_expectation(cont.cdf, cont.pdf, lo, hi)
        return _clipped_expectation(self._frozen.cdf, self._frozen.pdf, lo, hi)

    def target_for(self, estimator) -> float:
        """Population value the given :class:`EstimatorSpec` estimates."""
        kind, t = estimator.kind, estimator.tuning
        if kind == "winsorized":
            return self.winsorized_target(t.beta)
        if kind == "median":
            return self.true_median
        if kind == "catoni":
            return self.catoni_target(t.alpha)
        if kind == "lm_trimmed":
            return self.lm_target(t.epsilon)
        if self.true_mean is None:
            raise ValueError(f"{self.family} has no mean; supply an explicit target")
        return self.true_mean

    def quantile_constants(self) -> tuple[float, float]:
        """``(C1, C2)``: reciprocal densities of ``X`` at its median and of
        ``|X - median|`` at the MAD.

        These are the local Lipschitz constants of the two quantile
        functions at 1/2. For N(0, 1), ``C1 = sqrt(2 pi)``.
        """
        if self.is_mixture and self.parameters["weight"] > 0:
            raise ValueError("quantile constants need a continuous distribution")
        med, scale = self.true_median, self.true_mad
        f_med = float(self.pdf(med))
        f_z = float(self.pdf(med + scale) + self.pdf(med - scale))
        if not (f_med > 0 and f_z > 0):
            raise ValueError("density vanishes at the median or MAD point")
        return 1.0 / f_med, 1.0 / f_z


def _clipped_expectation(cdf, pdf, lo: float, hi: float) -> float:
    body, _ = integrate.quad(lambda x: x * pdf(x), lo, hi, epsabs=1e-13, epsrel=1e-12, limit=200)
    return float(lo * cdf(lo) + body + hi * (1.0 - cdf(hi)))


def draw(dist: DistributionSpec, n: int, seed: int) -> Sample:
    """``n`` i.i.d. draws from ``dist``; a pure function of ``(dist, n, seed)``."""
    if int(n) != n or n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    u = rng.uniforms(seed, n, rng.STREAM_DRAW)
    if not dist.is_mixture:
        return Sample(dist.ppf(u))
    p = dist.parameters
    if p["weight"] == 1.0:
        return Sample(np.full(n, p["value"]))
    pick = rng.uniforms(seed, n, rng.STREAM_DRAW_AUX) < p["weight"]
    x = stats.norm.ppf(u, loc=p["loc"], scale=p["scale"])
    x[pick] = p["value"]
    return Sample(x)


# --------------------------------------------------------------------------
# adversaries


@dataclass(frozen=True)
class ContaminationSpec:
    """Replace ``m`` points with ``sign * magnitude``."""

    m: int
    strategy: Literal["point_mass", "escalating", "mom_aware", "lm_aware"] = "point_mass"
    magnitude: float = 1e6
    sign: Literal["positive", "negative"] = "positive"

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 0:
            raise ValueError(f"m must be a nonnegative integer, got {self.m}")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if not (self.magnitude > 0 and math.isfinite(self.magnitude)):
            raise ValueError("magnitude must be positive and finite")
        if self.sign not in ("positive", "negative"):
            raise ValueError(f"sign must be 'positive' or 'negative', got {self.sign!r}")

    @property
    def value(self) -> float:
        return self.magnitude if self.sign == "positive" else -self.magnitude

    def to_dict(self) -> dict:
        return {"m": self.m, "strategy": self.strategy, "magnitude": self.magnitude, "sign": self.sign}

    @classmethod
    def from_dict(cls, d: dict) -> "ContaminationSpec":
        unknown = set(d) - {"m", "strategy", "magnitude", "sign"}
        if unknown:
            raise ValueError(f"unknown contamination fields: {sorted(unknown)}")
        return cls(**d)


def contaminate(
    sample: SampleLike,
    spec: ContaminationSpec,
    seed: int,
    *,
    k: int | None = None,
    partition_rule: str = "contiguous",
    partition_seed: int = 0,
) -> Sample:
    """Copy of ``sample`` with exactly ``spec.m`` entries replaced.

    ``point_mass`` and ``escalating`` replace seed-chosen indices with
    ``spec.value``. ``lm_aware`` replaces the ``m`` most extreme entries on
    the side of ``spec.sign``. ``mom_aware`` needs ``k`` and hits ``m``
    distinct groups of the partition :func:`mom` would use.

    Raises
    ------
    ValueError
        If ``spec.m`` exceeds the sample size.
    """
    s = as_sample(sample)
    n = len(s)
    if spec.m > n:
        raise ValueError(f"cannot replace {spec.m} points of a sample of size {n}")
    if spec.m == 0:
        return s
    if spec.strategy == "mom_aware":
        if k is None:
            raise ValueError("mom_aware contamination needs the group count k")
        return mom_adversary(s, k, partition_rule, spec.value, partition_seed, count=spec.m)
    x = s.values.copy()
    if spec.strategy == "lm_aware":
        order = np.argsort(x, kind="stable")
        idx = order[: spec.m] if spec.sign == "negative" else order[n - spec.m :]
    else:
        idx = rng.generator(seed, rng.STREAM_CONTAMINATE, n).choice(n, size=spec.m, replace=False)
    x[idx] = spec.value
    return Sample(x)


def escalate(sample: SampleLike, spec: ContaminationSpec, seed: int, schedule=DEFAULT_SCHEDULE, **kw):
    """Yield ``(magnitude, contaminated sample)`` along ``schedule``.

    The replaced indices stay fixed; only the magnitude grows.
    """
    for mag in schedule:
        step = ContaminationSpec(spec.m, spec.strategy, float(mag), spec.sign)
        yield float(mag), contaminate(sample, step, seed, **kw)


def mom_adversary(
    sample: SampleLike,
    k: int,
    partition_rule: str = "contiguous",
    magnitude: float = 1e6,
    seed: int = 0,
    count: int | None = None,
) -> Sample:
    """Corrupt a majority of the group means of :func:`mom`.

    One point in each of ``count`` distinct groups (default
    ``floor((k+1)/2)``) is set to ``magnitude``. The groups come from
    :func:`~robustmean.estimators.mom_partition` with the same ``k``, rule
    and seed, so the attack lines up with the estimator's partition.
    """
    s = as_sample(sample)
    groups = mom_partition(len(s), k, partition_rule, seed)
    if count is None:
        count = (k + 1) // 2
    if count > len(s):
        raise ValueError(f"cannot replace {count} points of a sample of size {len(s)}")
    x = s.values.copy()
    # one point per group while groups last, then further points inside them
    hit = [g[j] for j in range(max(len(g) for g in groups)) for g in groups if j < len(g)]
    x[np.asarray(hit[:count], dtype=np.intp)] = magnitude
    return Sample(x)


def lm_adversary(
    x_sample: SampleLike, y_sample: SampleLike, epsilon: float, magnitude: float = 1e6
) -> tuple[Sample, Sample]:
    """Break the two-sample trimmed mean with ``floor(eps n) + 1`` points.

    The ``floor(eps n)`` smallest entries of ``y`` become ``-magnitude``,
    dragging the lower clip level there, and the smallest entry of ``x``
    becomes ``-magnitude - 1``, which then clips to ``-magnitude``.

    Raises
    ------
    ValueError
        If ``floor(eps n) == 0`` or the samples differ in length.
    """
    x = as_sample(x_sample)
    y = as_sample(y_sample)
    n = len(y)
    if len(x) != n:
        raise ValueError("samples differ in length")
    t = _trim_count(epsilon, n)
    if t < 1:
        raise ValueError(f"floor(epsilon * n) = 0 for epsilon={epsilon}, n={n}")
    yv = y.values.copy()
    yv[np.argsort(yv, kind="stable")[:t]] = -magnitude
    xv = x.values.copy()
    xv[int(np.argmin(xv))] = -magnitude - 1.0
    return Sample(xv), Sample(yv)
