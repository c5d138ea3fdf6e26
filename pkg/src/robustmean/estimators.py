"""Univariate location estimators.

All estimators are pure functions of their inputs. Order statistics are
1-based in the formulas quoted in docstrings and converted to 0-based
indices right where arrays are indexed.

- ``median`` / ``mad``: mid-average sample median and raw (unscaled) MAD
- ``winsorized_mean``: outlyingness-induced winsorized mean, clip to
  ``median +/- beta * MAD`` then average
- ``catoni_mean``: root of ``sum psi(alpha * (y_i - mu)) = 0``
- ``mom``: median of group means
- ``lm_trimmed_mean``: two-sample winsorized mean with clip levels taken
  from order statistics of an independent sample
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import Literal, Sequence, Union

import numpy as np

from . import rng

__all__ = [
    "DEFAULT_BETA",
    "DegenerateScaleError",
    "IterationLimitError",
    "Sample",
    "as_sample",
    "WinsorizeParams",
    "CatoniParams",
    "MomParams",
    "TrimParams",
    "WinsorizedFit",
    "median",
    "mad",
    "mean",
    "outlyingness",
    "winsorize_bounds",
    "phi",
    "winsorized_mean",
    "winsorized_fit",
    "catoni_psi",
    "catoni_mean",
    "mom_partition",
    "mom",
    "lm_clip_levels",
    "lm_trimmed_mean",
    "ESTIMATOR_KINDS",
    "EstimatorSpec",
]

DEFAULT_BETA = 3.0

PartitionRule = Literal["contiguous", "seeded_shuffle"]
PARTITION_RULES = ("contiguous", "seeded_shuffle")


class DegenerateScaleError(ValueError):
    """Raised when a scale estimate is zero but a positive one is required."""


class IterationLimitError(RuntimeError):
    """Root finding stopped before the bracket shrank below tolerance."""

    def __init__(self, message: str, bracket: tuple[float, float]):
        super().__init__(message)
        self.bracket = bracket


class Sample:
    """An immutable batch of finite real observations.

    Parameters
    ----------
    values : array_like
        One-dimensional observations. Copied, flattened and frozen.

    Raises
    ------
    ValueError
        If ``values`` is empty or holds NaN or infinite entries.
    """

    def __init__(self, values):
        arr = np.array(values, dtype=np.float64).ravel()
        if arr.size == 0:
            raise ValueError("sample must contain at least one observation")
        if not np.all(np.isfinite(arr)):
            raise ValueError("sample contains NaN or infinite values")
        arr.flags.writeable = False
        self._values = arr

    @property
    def values(self) -> np.ndarray:
        return self._values

    @cached_property
    def sorted_view(self) -> np.ndarray:
        """Nondecreasing copy of ``values`` (computed once)."""
        out = np.sort(self._values)
        out.flags.writeable = False
        return out

    def __len__(self) -> int:
        return self._values.size

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._values
        return self._values.astype(dtype)

    def __repr__(self) -> str:
        return f"Sample(n={len(self)})"


SampleLike = Union[Sample, Sequence[float], np.ndarray]


def as_sample(x: SampleLike) -> Sample:
    """Return ``x`` unchanged if it is a :class:`Sample`, else wrap it."""
    return x if isinstance(x, Sample) else Sample(x)


# --------------------------------------------------------------------------
# tuning records


@dataclass(frozen=True)
class WinsorizeParams:
    beta: float = DEFAULT_BETA

    def __post_init__(self):
        if not math.isfinite(self.beta) or self.beta < 0:
            raise ValueError(f"beta must be finite and >= 0, got {self.beta}")


@dataclass(frozen=True)
class CatoniParams:
    alpha: float = 1.0
    tolerance: float = 1e-10
    max_iterations: int = 200

    def __post_init__(self):
        if not (self.alpha > 0 and math.isfinite(self.alpha)):
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not self.tolerance > 0:
            raise ValueError(f"tolerance must be positive, got {self.tolerance}")
        if int(self.max_iterations) < 1:
            raise ValueError("max_iterations must be a positive integer")


@dataclass(frozen=True)
class MomParams:
    k: int
    partition_rule: PartitionRule = "contiguous"

    def __post_init__(self):
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"k must be a positive integer, got {self.k}")
        if self.partition_rule not in PARTITION_RULES:
            raise ValueError(f"unknown partition rule {self.partition_rule!r}")

    def check(self, n: int) -> None:
        """Validate ``k`` against a sample of size ``n``."""
        if self.k > n:
            raise ValueError(f"k={self.k} exceeds sample size n={n}")
        # groups need at least two points unless k is 1 (mean) or n (median)
        if 1 < self.k < n and n // self.k < 2:
            raise ValueError(f"k={self.k} leaves groups smaller than 2 for n={n}")


@dataclass(frozen=True)
class TrimParams:
    epsilon: float

    def __post_init__(self):
        if not 0 <= self.epsilon < 0.5:
            raise ValueError(f"epsilon must lie in [0, 0.5), got {self.epsilon}")


# --------------------------------------------------------------------------
# building blocks


def _mid_order_stat(a: np.ndarray) -> float:
    # (z_(floor((n+1)/2)) + z_(floor((n+2)/2))) / 2, 1-based order statistics
    n = a.size
    lo = (n + 1) // 2 - 1
    hi = (n + 2) // 2 - 1
    if lo == hi:
        return float(np.partition(a, lo)[lo])
    part = np.partition(a, [lo, hi])
    return float(0.5 * (part[lo] + part[hi]))


def median(sample: SampleLike) -> float:
    """Sample median, averaging the two middle order statistics for even n.

    >>> median([1, 2, 3, 4])
    2.5
    """
    return _mid_order_stat(as_sample(sample).values)


def mad(sample: SampleLike) -> float:
    """Median of absolute deviations from the median, without rescaling."""
    x = as_sample(sample).values
    return _mid_order_stat(np.abs(x - _mid_order_stat(x)))


def mean(sample: SampleLike) -> float:
    return float(np.mean(as_sample(sample).values))


def outlyingness(x, mu: float, sigma: float):
    """Standardized distance ``|x - mu| / sigma``.

    Raises
    ------
    DegenerateScaleError
        If ``sigma <= 0``.
    """
    if not sigma > 0:
        raise DegenerateScaleError(f"scale must be positive, got {sigma}")
    out = np.abs(np.asarray(x, dtype=np.float64) - mu) / sigma
    return float(out) if out.ndim == 0 else out


def winsorize_bounds(mu: float, sigma: float, beta: float) -> tuple[float, float]:
    if sigma < 0 or beta < 0:
        raise ValueError("sigma and beta must be nonnegative")
    half = beta * sigma
    return mu - half, mu + half


def phi(x, lower: float, upper: float):
    """Clip ``x`` into ``[lower, upper]``."""
    if lower > upper:
        raise ValueError(f"lower bound {lower} exceeds upper bound {upper}")
    out = np.clip(np.asarray(x, dtype=np.float64), lower, upper)
    return float(out) if out.ndim == 0 else out


# --------------------------------------------------------------------------
# outlyingness-induced winsorized mean


@dataclass(frozen=True)
class WinsorizedFit:
    """Estimate plus the quantities that produced it."""

    estimate: float
    median: float
    mad: float
    lower: float
    upper: float
    clipped_low: int
    clipped_high: int
    n: int


def winsorized_fit(sample: SampleLike, beta: float = DEFAULT_BETA) -> WinsorizedFit:
    """Winsorized mean together with its median, MAD and clip counts.

    Points below ``median - beta * MAD`` are raised to that level, points
    above ``median + beta * MAD`` lowered to it, and the result averaged.
    ``beta = 0`` returns the median; for ``beta`` larger than every point's
    outlyingness nothing is clipped and the plain mean comes back.

    Raises
    ------
    DegenerateScaleError
        If the MAD is zero and ``beta > 0``.
    """
    WinsorizeParams(beta)
    x = as_sample(sample).values
    med = _mid_order_stat(x)
    scale = _mid_order_stat(np.abs(x - med))
    if beta == 0:
        n_low = int(np.count_nonzero(x < med))
        n_high = int(np.count_nonzero(x > med))
        return WinsorizedFit(med, med, scale, med, med, n_low, n_high, x.size)
    if scale <= 0:
        raise DegenerateScaleError(
            "MAD is zero; the winsorized mean needs a nondegenerate sample when beta > 0"
        )
    lower, upper = winsorize_bounds(med, scale, beta)
    est = float(np.mean(np.clip(x, lower, upper)))
    # guard the documented ordering against last-bit rounding in the average
    est = min(max(est, lower), upper)
    return WinsorizedFit(
        estimate=est,
        median=med,
        mad=scale,
        lower=lower,
        upper=upper,
        clipped_low=int(np.count_nonzero(x < lower)),
        clipped_high=int(np.count_nonzero(x > upper)),
        n=x.size,
    )


def winsorized_mean(sample: SampleLike, beta: float = DEFAULT_BETA) -> float:
    """Outlyingness-induced winsorized mean. See :func:`winsorized_fit`."""
    return winsorized_fit(sample, beta).estimate


# --------------------------------------------------------------------------
# Catoni


_LOG2 = math.log(2.0)


def catoni_psi(x):
    """Catoni's influence function.

    ``log(1 + x + x**2/2)`` for ``x >= 0`` and ``-log(1 - x + x**2/2)`` for
    ``x <= 0``. Evaluated without overflow for arguments up to the float
    range.
    """
    x = np.asarray(x, dtype=np.float64)
    ax = np.abs(x)
    with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
        small = np.log1p(ax + 0.5 * ax * ax)
        large = 2.0 * np.log(ax) - _LOG2 + np.log1p(2.0 / ax + 2.0 / (ax * ax))
    out = np.copysign(np.where(ax < 1e100, small, large), x)
    return float(out) if out.ndim == 0 else out


def catoni_mean(
    sample: SampleLike,
    alpha: float = 1.0,
    tolerance: float = 1e-10,
    max_iterations: int = 200,
) -> float:
    """Catoni's M-estimator of the mean.

    Solves ``sum_i psi(alpha * (y_i - mu)) = 0`` by bisection on
    ``[min(y) - 1, max(y) + 1]``. The left side is strictly decreasing in
    ``mu``, so the root is unique. Iteration stops once the bracket is
    narrower than ``tolerance`` or can no longer be split in floating point.

    Raises
    ------
    IterationLimitError
        If ``max_iterations`` bisection steps do not reach ``tolerance``.
    """
    CatoniParams(alpha, tolerance, max_iterations)
    y = as_sample(sample).values

    def score(mu: float) -> float:
        return float(np.sum(catoni_psi(alpha * (y - mu))))

    lo = float(y.min()) - 1.0
    hi = float(y.max()) + 1.0
    for _ in range(int(max_iterations)):
        if hi - lo <= tolerance:
            return 0.5 * (lo + hi)
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            # adjacent floats: bracket is at machine resolution
            return mid
        s = score(mid)
        if s == 0.0:
            return mid
        if s > 0:
            lo = mid
        else:
            hi = mid
    if hi - lo <= tolerance:
        return 0.5 * (lo + hi)
    raise IterationLimitError(
        f"bisection did not converge in {max_iterations} iterations", (lo, hi)
    )


# --------------------------------------------------------------------------
# median of means


def mom_partition(
    n: int, k: int, partition_rule: PartitionRule = "contiguous", seed: int = 0
) -> list[np.ndarray]:
    """Index groups used by :func:`mom`.

    The first ``n % k`` groups hold ``ceil(n/k)`` points, the rest
    ``floor(n/k)``. With ``seeded_shuffle`` the indices are permuted first;
    the permutation depends on ``(seed, n)`` only.
    """
    MomParams(k, partition_rule).check(n)
    if partition_rule == "seeded_shuffle":
        order = rng.generator(seed, rng.STREAM_PARTITION, n).permutation(n)
    else:
        order = np.arange(n)
    base, extra = divmod(n, k)
    sizes = np.full(k, base)
    sizes[:extra] += 1
    return np.split(order, np.cumsum(sizes)[:-1])


def mom(
    sample: SampleLike,
    k: int,
    partition_rule: PartitionRule = "contiguous",
    seed: int = 0,
) -> float:
    """Median of means over ``k`` groups.

    Examples
    --------
    >>> mom([1, 2, 3, 4, 5, 6], k=3)
    3.5
    """
    x = as_sample(sample).values
    groups = mom_partition(x.size, k, partition_rule, seed)
    means = np.array([x[g].mean() for g in groups])
    return _mid_order_stat(means)


# --------------------------------------------------------------------------
# two-sample trimmed (winsorized) mean


def _trim_count(epsilon: float, n: int) -> int:
    # floor(eps * n), tolerant of representation error such as 0.29 * 100
    return int(math.floor(epsilon * n + 1e-9))


def lm_clip_levels(y_sample: SampleLike, epsilon: float) -> tuple[float, float] | None:
    """Clip levels ``(Y*_(t), Y*_(n-t+1))`` with ``t = floor(eps * n)``.

    Returns ``None`` when ``t == 0`` (no clipping).
    """
    TrimParams(epsilon)
    y = as_sample(y_sample)
    n = len(y)
    t = _trim_count(epsilon, n)
    if t == 0:
        return None
    ys = y.sorted_view
    return float(ys[t - 1]), float(ys[n - t])


def lm_trimmed_mean(x_sample: SampleLike, y_sample: SampleLike, epsilon: float) -> float:
    """Average of ``x`` clipped to order statistics of the independent ``y``.

    Raises
    ------
    ValueError
        If the samples differ in length.
    """
    x = as_sample(x_sample)
    y = as_sample(y_sample)
    if len(x) != len(y):
        raise ValueError(f"samples differ in length: {len(x)} vs {len(y)}")
    levels = lm_clip_levels(y, epsilon)
    if levels is None:
        return float(np.mean(x.values))
    return float(np.mean(np.clip(x.values, *levels)))


# --------------------------------------------------------------------------
# uniform handle


ESTIMATOR_KINDS = ("mean", "median", "winsorized", "catoni", "mom", "lm_trimmed")

_TUNING_TYPES = {
    "mean": type(None),
    "median": type(None),
    "winsorized": WinsorizeParams,
    "catoni": CatoniParams,
    "mom": MomParams,
    "lm_trimmed": TrimParams,
}

_DEFAULT_TUNING = {
    "winsorized": WinsorizeParams(),
    "catoni": CatoniParams(),
    "mom": MomParams(k=5),
    "lm_trimmed": TrimParams(epsilon=0.1),
}


@dataclass(frozen=True)
class EstimatorSpec:
    """An estimator kind together with its tuning record.

    ``lm_trimmed`` consumes two samples; every other kind uses one. When
    ``tuning`` is omitted the kind's default is used (``beta=3``,
    ``alpha=1``, ``k=5`` contiguous, ``epsilon=0.1``).
    """

    kind: str
    tuning: object = None

    def __post_init__(self):
        if self.kind not in ESTIMATOR_KINDS:
            raise ValueError(f"unknown estimator kind {self.kind!r}")
        if self.tuning is None and self.kind in _DEFAULT_TUNING:
            object.__setattr__(self, "tuning", _DEFAULT_TUNING[self.kind])
        if not isinstance(self.tuning, _TUNING_TYPES[self.kind]):
            raise TypeError(
                f"{self.kind} expects {_TUNING_TYPES[self.kind].__name__}, "
                f"got {type(self.tuning).__name__}"
            )

    @classmethod
    def make(cls, kind: str, **tuning) -> "EstimatorSpec":
        """Build from keyword tuning, e.g. ``EstimatorSpec.make("mom", k=10)``."""
        tt = _TUNING_TYPES.get(kind)
        if tt is None:
            raise ValueError(f"unknown estimator kind {kind!r}")
        if tt is type(None):
            if tuning:
                raise ValueError(f"{kind} takes no tuning, got {sorted(tuning)}")
            return cls(kind)
        if not tuning:
            return cls(kind)
        return cls(kind, tt(**tuning))

    @property
    def two_sample(self) -> bool:
        return self.kind == "lm_trimmed"

    @property
    def label(self) -> str:
        if self.tuning is None:
            return self.kind
        args = ",".join(f"{k}={v}" for k, v in self.tuning_dict().items())
        return f"{self.kind}({args})"

    def tuning_dict(self) -> dict:
        if self.tuning is None:
            return {}
        d = dict(vars(self.tuning))
        if self.kind == "catoni":
            # root-finding plumbing is not part of the estimator's identity
            d = {"alpha": d["alpha"]}
        return d

    def to_dict(self) -> dict:
        return {"kind": self.kind, "tuning": dict(vars(self.tuning)) if self.tuning else {}}

    @classmethod
    def from_dict(cls, d: dict) -> "EstimatorSpec":
        unknown = set(d) - {"kind", "tuning"}
        if unknown:
            raise ValueError(f"unknown estimator fields: {sorted(unknown)}")
        return cls.make(d["kind"], **d.get("tuning", {}))

    def estimate(self, x: SampleLike, y: SampleLike | None = None, seed: int = 0) -> float:
        """Apply the estimator. ``y`` is required for ``lm_trimmed`` only."""
        t = self.tuning
        if self.kind == "lm_trimmed":
            if y is None:
                raise ValueError("lm_trimmed needs a second sample")
            return lm_trimmed_mean(x, y, t.epsilon)
        if self.kind == "mean":
            return mean(x)
        if self.kind == "median":
            return median(x)
        if self.kind == "winsorized":
            return winsorized_mean(x, t.beta)
        if self.kind == "catoni":
            return catoni_mean(x, t.alpha, t.tolerance, t.max_iterations)
        return mom(x, t.k, t.partition_rule, seed)
