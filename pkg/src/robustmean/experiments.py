"""Monte Carlo and adversarial harnesses.

Each experiment is a pure function of its arguments, seed included. Trials
get independent seeds from :func:`robustmean.rng.trial_seed` and results are
stored by trial index, so a thread pool of any width gives identical
reports.
"""

from __future__ import annotations

import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import stats

from . import rng
from .bounds import rbp_theoretical
from .contamination import (
    DEFAULT_SCHEDULE,
    ContaminationSpec,
    DistributionSpec,
    contaminate,
    draw,
    lm_adversary,
    mom_adversary,
)
from .estimators import (
    EstimatorSpec,
    Sample,
    _trim_count,
    mad,
    median,
)

__all__ = [
    "EstimatorSpec",
    "ProbeTrace",
    "BreakdownRow",
    "BreakdownReport",
    "DeviationReport",
    "TailFit",
    "InsufficientTailError",
    "Lemma41Report",
    "EfficiencyRow",
    "EfficiencyReport",
    "breakdown_probe",
    "empirical_rbp",
    "deviation_experiment",
    "tail_curve",
    "tail_fit",
    "lemma41_check",
    "efficiency_comparison",
]

TAIL_GRID_POINTS = 50


def _run_trials(fn: Callable[[int], object], trials: int, workers: int) -> list:
    if workers <= 1:
        return [fn(i) for i in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(trials), chunksize=max(1, trials // (4 * workers))))


def _frac(x: Fraction | None) -> str | None:
    return None if x is None else f"{x.numerator}/{x.denominator}"


def _unfrac(s: str | None) -> Fraction | None:
    return None if s is None else Fraction(s)


# --------------------------------------------------------------------------
# breakdown


@dataclass(frozen=True)
class ProbeTrace:
    magnitudes: tuple[float, ...]
    estimates: tuple[float, ...]
    clean_estimate: float
    corrupted: int

    @property
    def deviations(self) -> tuple[float, ...]:
        return tuple(abs(e - self.clean_estimate) for e in self.estimates)


def _diverges(d: Sequence[float], rtol: float = 1e-9) -> bool:
    """Whether deviations along an increasing magnitude schedule are unbounded.

    A bounded estimator saturates: its increments shrink towards zero (for
    the clipping estimators here they become exactly zero once the
    adversary's points are clipped). A broken one keeps climbing. The test
    asks for strictly positive increments at every step after the first,
    each at least half the previous one.
    """
    inc = np.diff(np.asarray(d, dtype=float))
    if inc.size == 0:
        return False
    floor = rtol * (1.0 + np.abs(np.asarray(d[:-1], dtype=float)))
    if np.any(inc <= floor):
        return False
    return bool(np.all(inc[1:] >= 0.5 * inc[:-1]))


def _clean_pair(estimator: EstimatorSpec, n: int, seed: int):
    g = DistributionSpec.gaussian()
    x = draw(g, n, seed)
    y = draw(g, n, rng.trial_seed(seed, 1)) if estimator.two_sample else None
    return x, y


def _lm_partial(x: Sample, y: Sample, epsilon: float, magnitude: float, m: int):
    # best effort with fewer than floor(eps n) + 1 points: m - 1 into y, one into x
    n = len(y)
    t = _trim_count(epsilon, n)
    if m >= t + 1:
        return lm_adversary(x, y, epsilon, magnitude)
    yv = y.values.copy()
    if m > 1:
        yv[np.argsort(yv, kind="stable")[: m - 1]] = -magnitude
    xv = x.values.copy()
    if m >= 1:
        xv[int(np.argmin(xv))] = -magnitude - 1.0
    return Sample(xv), Sample(yv)


def _attack(estimator: EstimatorSpec, x: Sample, y, m: int, magnitude: float, seed: int):
    kind, t = estimator.kind, estimator.tuning
    if kind == "lm_trimmed":
        return _lm_partial(x, y, t.epsilon, magnitude, m)
    if m == 0:
        return x, y
    if kind == "mom":
        return mom_adversary(x, t.k, t.partition_rule, magnitude, seed, count=m), y
    return _spread_point_mass(x, m, magnitude, seed), y


def _spread_point_mass(x: Sample, m: int, magnitude: float, seed: int) -> Sample:
    # M, M+1, ..., M+m-1 on the indices contaminate() picks; distinct values
    # keep the MAD positive once the adversary holds a majority
    n = len(x)
    idx = rng.generator(seed, rng.STREAM_CONTAMINATE, n).choice(n, size=m, replace=False)
    v = x.values.copy()
    v[np.sort(idx)] = magnitude + np.arange(m, dtype=float)
    return Sample(v)


def breakdown_probe(
    estimator: EstimatorSpec,
    n: int,
    m: int,
    schedule: Sequence[float] = DEFAULT_SCHEDULE,
    seed: int = 0,
) -> tuple[bool, ProbeTrace]:
    """Try to break ``estimator`` by replacing ``m`` points of a clean N(0,1) sample.

    The estimator-specific adversary (point mass, group-majority attack for
    median-of-means, clip-level attack for the two-sample trimmed mean) is
    applied at every magnitude of ``schedule``. For ``lm_trimmed``, ``m``
    counts corrupted points among the ``2n`` pooled observations.
    """
    sched = [float(s) for s in schedule]
    if len(sched) < 2 or any(b <= a for a, b in zip(sched, sched[1:])):
        raise ValueError("schedule must hold at least two strictly increasing magnitudes")
    limit = 2 * n if estimator.two_sample else n
    if not 0 <= m <= limit:
        raise ValueError(f"m={m} outside [0, {limit}]")
    x, y = _clean_pair(estimator, n, seed)
    clean = estimator.estimate(x, y, seed=seed)
    estimates = []
    for mag in sched:
        xc, yc = _attack(estimator, x, y, m, mag, seed)
        estimates.append(estimator.estimate(xc, yc, seed=seed))
    trace = ProbeTrace(tuple(sched), tuple(estimates), clean, m)
    return _diverges(trace.deviations), trace


@dataclass(frozen=True)
class BreakdownRow:
    m: int
    diverged: bool
    max_abs_estimate: float


@dataclass(frozen=True)
class BreakdownReport:
    """Divergence verdict for every tried ``m`` plus the resulting RBP.

    ``points`` is the number of observations ``m`` is counted against:
    ``n``, or ``2n`` for the two-sample trimmed mean.
    """

    estimator: EstimatorSpec
    n: int
    points: int
    seed: int
    schedule: tuple[float, ...]
    per_m: tuple[BreakdownRow, ...]
    empirical_rbp: Fraction | None
    theoretical_rbp: Fraction
    monotone: bool

    def to_dict(self) -> dict:
        return {
            "estimator": self.estimator.to_dict(),
            "n": self.n,
            "points": self.points,
            "seed": self.seed,
            "schedule": list(self.schedule),
            "per_m": [
                {"m": r.m, "diverged": r.diverged, "max_abs_estimate": r.max_abs_estimate}
                for r in self.per_m
            ],
            "empirical_rbp": _frac(self.empirical_rbp),
            "theoretical_rbp": _frac(self.theoretical_rbp),
            "monotone": self.monotone,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "BreakdownReport":
        return cls(
            estimator=EstimatorSpec.from_dict(d["estimator"]),
            n=d["n"],
            points=d["points"],
            seed=d["seed"],
            schedule=tuple(d["schedule"]),
            per_m=tuple(BreakdownRow(**r) for r in d["per_m"]),
            empirical_rbp=_unfrac(d["empirical_rbp"]),
            theoretical_rbp=_unfrac(d["theoretical_rbp"]),
            monotone=d["monotone"],
        )


def empirical_rbp(
    estimator: EstimatorSpec,
    n: int,
    seed: int = 0,
    schedule: Sequence[float] = DEFAULT_SCHEDULE,
) -> BreakdownReport:
    """Smallest breaking fraction over ``m = 1 .. ceil(n/2) + 1``.

    Every ``m`` in the range is probed so that monotonicity of the verdicts
    can be checked; a non-monotone pattern is reported and warned about.
    """
    if n < 4:
        raise ValueError("n must be at least 4")
    rows = []
    for m in range(1, -(-n // 2) + 2):
        diverged, trace = breakdown_probe(estimator, n, m, schedule, seed)
        rows.append(BreakdownRow(m, diverged, float(max(abs(e) for e in trace.estimates))))
    flags = [r.diverged for r in rows]
    first = next((r.m for r in rows if r.diverged), None)
    monotone = first is None or all(flags[first - 1 :])
    if not monotone:
        warnings.warn(f"non-monotone breakdown verdicts for {estimator.label} at n={n}")
    points = 2 * n if estimator.two_sample else n
    return BreakdownReport(
        estimator=estimator,
        n=n,
        points=points,
        seed=seed,
        schedule=tuple(float(s) for s in schedule),
        per_m=tuple(rows),
        empirical_rbp=None if first is None else Fraction(first, points),
        theoretical_rbp=rbp_theoretical(estimator, n),
        monotone=monotone,
    )


# --------------------------------------------------------------------------
# deviations and tails


def tail_curve(sorted_dev: np.ndarray, points: int = TAIL_GRID_POINTS) -> list[tuple[float, float]]:
    """Empirical survival ``P(dev > r)`` on a log grid.

    The grid runs from the 50th to the 99.9th percentile of the deviations
    (from the smallest positive deviation if the median is zero).
    """
    d = np.asarray(sorted_dev, dtype=float)
    if d.size == 0:
        return []
    hi = float(np.quantile(d, 0.999))
    lo = float(np.quantile(d, 0.5))
    if lo <= 0:
        pos = d[d > 0]
        if pos.size == 0:
            return []
        lo = float(pos[0])
    if hi <= lo:
        return []
    grid = np.geomspace(lo, hi, points)
    surv = (d.size - np.searchsorted(d, grid, side="right")) / d.size
    return [(float(r), float(p)) for r, p in zip(grid, surv)]


@dataclass(frozen=True)
class DeviationReport:
    estimator: EstimatorSpec
    dist: DistributionSpec
    n: int
    trials: int
    eps: float
    m: int
    strategy: str
    magnitude: float
    delta: float
    seed: int
    target: float
    deviations: tuple[float, ...]
    tail_curve: tuple[tuple[float, float], ...]
    quantile_at_delta: float

    def to_dict(self) -> dict:
        return {
            "estimator": self.estimator.to_dict(),
            "dist": self.dist.to_dict(),
            "n": self.n,
            "trials": self.trials,
            "eps": self.eps,
            "m": self.m,
            "strategy": self.strategy,
            "magnitude": self.magnitude,
            "delta": self.delta,
            "seed": self.seed,
            "target": self.target,
            "deviations": list(self.deviations),
            "tail_curve": [list(p) for p in self.tail_curve],
            "quantile_at_delta": self.quantile_at_delta,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DeviationReport":
        return cls(
            estimator=EstimatorSpec.from_dict(d["estimator"]),
            dist=DistributionSpec.from_dict(d["dist"]),
            n=d["n"],
            trials=d["trials"],
            eps=d["eps"],
            m=d["m"],
            strategy=d["strategy"],
            magnitude=d["magnitude"],
            delta=d["delta"],
            seed=d["seed"],
            target=d["target"],
            deviations=tuple(d["deviations"]),
            tail_curve=tuple(tuple(p) for p in d["tail_curve"]),
            quantile_at_delta=d["quantile_at_delta"],
        )


def deviation_experiment(
    estimator: EstimatorSpec,
    dist: DistributionSpec,
    n: int,
    trials: int,
    eps: float = 0.0,
    strategy: str = "point_mass",
    magnitude: float = 1e6,
    delta: float = 0.05,
    seed: int = 0,
    *,
    target: float | None = None,
    sign: str = "positive",
    workers: int = 1,
) -> DeviationReport:
    """Distribution of ``|T(contaminated sample) - target|`` over ``trials`` runs.

    Each trial draws a clean sample of size ``n``, replaces
    ``floor(eps * n)`` points according to ``strategy`` and records the
    deviation of the estimate from the clean population ``target``. When
    ``target`` is omitted it is computed from ``dist`` for the estimator
    (see :meth:`DistributionSpec.target_for`).
    """
    if trials < 100:
        raise ValueError("trials must be at least 100")
    if not 0 <= eps < 0.5:
        raise ValueError("eps must lie in [0, 0.5)")
    m = _trim_count(eps, n)
    if abs(eps * n - m) > 1e-9:
        warnings.warn(f"eps * n = {eps * n} is not an integer; contaminating {m} points")
    if target is None:
        target = dist.target_for(estimator)
    cspec = ContaminationSpec(m, strategy, magnitude, sign)
    k = estimator.tuning.k if estimator.kind == "mom" else None
    rule = estimator.tuning.partition_rule if estimator.kind == "mom" else "contiguous"

    def one(i: int) -> float:
        ts = rng.trial_seed(seed, i)
        x = contaminate(draw(dist, n, ts), cspec, ts, k=k, partition_rule=rule, partition_seed=ts)
        y = None
        if estimator.two_sample:
            ys = rng.trial_seed(ts, 1)
            y = contaminate(draw(dist, n, ys), cspec, ys)
        return abs(estimator.estimate(x, y, seed=ts) - target)

    dev = np.sort(np.asarray(_run_trials(one, trials, workers), dtype=float))
    q = float(np.quantile(dev, 1.0 - delta, method="inverted_cdf"))
    return DeviationReport(
        estimator=estimator,
        dist=dist,
        n=n,
        trials=trials,
        eps=eps,
        m=m,
        strategy=strategy,
        magnitude=float(magnitude),
        delta=delta,
        seed=seed,
        target=float(target),
        deviations=tuple(dev.tolist()),
        tail_curve=tuple(tail_curve(dev)),
        quantile_at_delta=q,
    )


class InsufficientTailError(ValueError):
    """Too few tail points to fit a sub-Gaussian decay rate."""


@dataclass(frozen=True)
class TailFit:
    slope: float
    intercept: float
    r_squared: float
    points: int


def tail_fit(report: DeviationReport | Sequence[tuple[float, float]]) -> TailFit:
    """Least-squares fit of ``log P(dev > r)`` against ``r**2``.

    Uses the tail-curve points with probability in ``(0.001, 0.5)``; at
    least five are required. A sub-Gaussian tail gives a straight line with
    negative slope.
    """
    curve = report.tail_curve if isinstance(report, DeviationReport) else report
    pts = [(r, p) for r, p in curve if 0.001 < p < 0.5]
    if len(pts) < 5:
        raise InsufficientTailError(f"need at least 5 tail points in (0.001, 0.5), got {len(pts)}")
    r = np.array([p[0] for p in pts])
    logp = np.log([p[1] for p in pts])
    fit = stats.linregress(r * r, logp)
    return TailFit(float(fit.slope), float(fit.intercept), float(fit.rvalue**2), len(pts))


# --------------------------------------------------------------------------
# quantile stability and efficiency


@dataclass(frozen=True)
class Lemma41Report:
    """How often contaminated median and MAD stay near their population values."""

    n: int
    trials: int
    eps: float
    eps_star: float
    beta: float
    c1: float
    c2: float
    median_radius: float
    mad_radius: float
    median_frequency: float
    mad_frequency: float
    required: float
    valid: bool
    seed: int

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def lemma41_check(
    dist: DistributionSpec,
    n: int,
    trials: int,
    eps: float,
    eps_star: float,
    seed: int = 0,
    *,
    beta: float = 3.0,
    delta: float = 0.05,
    c1: float | None = None,
    c2: float | None = None,
    strategy: str = "point_mass",
    magnitude: float = 1e6,
    workers: int = 1,
) -> Lemma41Report:
    """Fraction of trials with ``|median - mu| <= c1 eps*`` and
    ``|MAD - sigma| <= c2 eps* / beta`` after ``floor(eps n)`` replacements.

    ``required`` is ``1 - delta/6``; ``valid`` says whether
    ``delta > 24 delta*(n, eps*)``. Quantile constants default to
    :meth:`DistributionSpec.quantile_constants`.

    Raises
    ------
    ValueError
        If the constants are missing and cannot be derived, or
        ``eps_star`` is outside ``[2 eps, 0.5)``.
    """
    from .bounds import delta_star

    if not 2 * eps <= eps_star < 0.5:
        raise ValueError("eps_star must lie in [2*eps, 0.5)")
    if c1 is None or c2 is None:
        d1, d2 = dist.quantile_constants()
        c1 = d1 if c1 is None else c1
        c2 = d2 if c2 is None else c2
    mu, sigma = dist.true_median, dist.true_mad
    m = _trim_count(eps, n)
    cspec = ContaminationSpec(m, strategy, magnitude)
    r_med, r_mad = c1 * eps_star, c2 * eps_star / beta

    def one(i: int) -> tuple[bool, bool]:
        ts = rng.trial_seed(seed, i)
        x = contaminate(draw(dist, n, ts), cspec, ts)
        return abs(median(x) - mu) <= r_med, abs(mad(x) - sigma) <= r_mad

    hits = np.array(_run_trials(one, trials, workers), dtype=bool)
    valid = eps_star > 0 and delta > 24.0 * delta_star(n, eps_star)
    return Lemma41Report(
        n=n,
        trials=trials,
        eps=eps,
        eps_star=eps_star,
        beta=beta,
        c1=float(c1),
        c2=float(c2),
        median_radius=r_med,
        mad_radius=r_mad,
        median_frequency=float(hits[:, 0].mean()),
        mad_frequency=float(hits[:, 1].mean()),
        required=1.0 - delta / 6.0,
        valid=bool(valid),
        seed=seed,
    )


@dataclass(frozen=True)
class EfficiencyRow:
    estimator: EstimatorSpec
    mean_estimate: float
    se: float
    se_ratio: float
    relative_efficiency: float


@dataclass(frozen=True)
class EfficiencyReport:
    dist: DistributionSpec
    n: int
    trials: int
    seed: int
    rows: tuple[EfficiencyRow, ...] = field(default_factory=tuple)

    def row(self, kind: str) -> EfficiencyRow:
        return next(r for r in self.rows if r.estimator.kind == kind)

    def to_dict(self) -> dict:
        return {
            "dist": self.dist.to_dict(),
            "n": self.n,
            "trials": self.trials,
            "seed": self.seed,
            "rows": [
                {
                    "estimator": r.estimator.to_dict(),
                    "mean_estimate": r.mean_estimate,
                    "se": r.se,
                    "se_ratio": r.se_ratio,
                    "relative_efficiency": r.relative_efficiency,
                }
                for r in self.rows
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "EfficiencyReport":
        rows = tuple(
            EfficiencyRow(
                EstimatorSpec.from_dict(r["estimator"]),
                r["mean_estimate"],
                r["se"],
                r["se_ratio"],
                r["relative_efficiency"],
            )
            for r in d["rows"]
        )
        return cls(DistributionSpec.from_dict(d["dist"]), d["n"], d["trials"], d["seed"], rows)


def efficiency_comparison(
    dist: DistributionSpec,
    n: int,
    trials: int,
    estimators: Sequence[EstimatorSpec],
    seed: int = 0,
    *,
    workers: int = 1,
) -> EfficiencyReport:
    """Empirical standard errors on clean data, relative to the sample mean.

    All estimators see the same samples in each trial. ``se_ratio`` is
    ``se / se(mean)`` and ``relative_efficiency`` its inverse square.
    """
    if trials < 1000:
        raise ValueError("trials must be at least 1000")
    specs = list(estimators)
    if not any(e.kind == "mean" for e in specs):
        specs.insert(0, EstimatorSpec("mean"))

    def one(i: int) -> list[float]:
        ts = rng.trial_seed(seed, i)
        x = draw(dist, n, ts)
        y = draw(dist, n, rng.trial_seed(ts, 1)) if any(e.two_sample for e in specs) else None
        return [e.estimate(x, y, seed=ts) for e in specs]

    est = np.asarray(_run_trials(one, trials, workers), dtype=float)
    se = est.std(axis=0, ddof=1)
    base = se[[e.kind for e in specs].index("mean")]
    rows = tuple(
        EfficiencyRow(e, float(est[:, j].mean()), float(se[j]), float(se[j] / base), float((base / se[j]) ** 2))
        for j, e in enumerate(specs)
    )
    return EfficiencyReport(dist, n, trials, seed, rows)
