"""Closed-form deviation bounds and breakdown values.

Everything here is scalar arithmetic. The central result is
:func:`winsorized_deviation_bound`: with probability at least ``1 - delta``
the winsorized mean of an ``eps``-contaminated sample lies within

    sqrt(2) * (U*/sd * sqrt(2 log(6/delta) / n) + 1) * sd * sqrt(log(6/delta) / n)
        + C eps* + eps (2 beta sigma + 2 C eps*)

of its population value, where ``U* = |mu| + beta sigma`` and
``C = c1 + c2``, provided ``delta > 24 delta*(n, eps*)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .estimators import EstimatorSpec

__all__ = [
    "BoundParams",
    "BoundResult",
    "Validity",
    "bernstein_tail",
    "delta_star",
    "check_validity",
    "minimal_eps_star",
    "default_eps_star",
    "theorem41_bound",
    "winsorized_deviation_bound",
    "subgaussian_radius",
    "rbp_theoretical",
]

SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class BoundParams:
    """Inputs of the winsorized-mean deviation bound.

    Attributes
    ----------
    n : int
        Sample size.
    delta : float
        Failure probability, in (0, 1).
    eps : float
        Contamination rate, in [0, 0.25).
    eps_star : float
        Slack in [2 * eps, 0.5).
    beta : float
        Winsorizing cutoff, at least 1.
    mu, sigma : float
        Population median and (raw) MAD.
    sigma_x : float
        Population standard deviation.
    c1, c2 : float
        Local Lipschitz constants of the quantile functions of ``X`` and of
        ``|X - median|`` around 1/2.
    """

    n: int
    delta: float
    eps: float
    eps_star: float
    beta: float = 3.0
    mu: float = 0.0
    sigma: float = 0.6744897501960817
    sigma_x: float = 1.0
    c1: float = SQRT_2PI
    c2: float = SQRT_2PI

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if not 0 <= self.eps < 0.25:
            raise ValueError(f"eps must lie in [0, 0.25), got {self.eps}")
        if not 2 * self.eps <= self.eps_star < 0.5:
            raise ValueError(f"eps_star must lie in [2*eps, 0.5), got {self.eps_star}")
        if not self.beta >= 1:
            raise ValueError(f"beta must be >= 1, got {self.beta}")
        for name in ("sigma", "sigma_x", "c1", "c2"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def C(self) -> float:
        return self.c1 + self.c2

    @property
    def u_star(self) -> float:
        return abs(self.mu) + self.beta * self.sigma

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def bernstein_tail(n: int, t: float, nu: float, b: float) -> float:
    """Bernstein bound on ``P(mean of n centered variables >= t)``.

    ``exp(-n t^2 / (2 (nu + b t / 3)))`` for variables bounded above by
    ``b`` with average variance ``nu``.
    """
    if not t > 0 or not b > 0:
        raise ValueError("t and b must be positive")
    if nu < 0:
        raise ValueError("nu must be nonnegative")
    return min(1.0, math.exp(-n * t * t / (2.0 * (nu + b * t / 3.0))))


def delta_star(n: int, eps_star: float) -> float:
    """``exp(-n eps*^2 / (8 (1/4 - eps*^2 + eps*/6)))``."""
    if not 0 < eps_star < 0.5:
        raise ValueError(f"eps_star must lie in (0, 0.5), got {eps_star}")
    e = eps_star
    return math.exp(-n * e * e / (8.0 * (0.25 - e * e + e / 6.0)))


@dataclass(frozen=True)
class Validity:
    """Outcome of the ``delta > 24 delta*`` precondition."""

    valid: bool
    delta_star: float
    threshold: float
    min_n: int

    def __bool__(self) -> bool:
        return self.valid


def _min_n(delta: float, eps_star: float) -> int:
    e = eps_star
    if e * e == 0.0:
        # underflow: no representable sample size suffices
        return 0
    # n > 8 (1/4 - e^2 + e/6) log(24/delta) / e^2
    need = 8.0 * (0.25 - e * e + e / 6.0) * math.log(24.0 / delta) / (e * e)
    if need > 2.0**53:
        return math.floor(need) + 1
    n = max(1, math.floor(need) + 1)
    while not delta > 24.0 * delta_star(n, e):
        n += 1
    while n > 1 and delta > 24.0 * delta_star(n - 1, e):
        n -= 1
    return n


def check_validity(params: BoundParams) -> Validity:
    """Whether the deviation guarantee applies at ``params``.

    ``min_n`` is the smallest sample size for which it would hold at the
    same ``delta`` and ``eps_star``, or 0 when no representable size
    suffices. ``eps_star = 0`` is never valid.
    """
    if params.eps_star == 0:
        return Validity(False, 1.0, 24.0, 0)
    ds = delta_star(params.n, params.eps_star)
    return Validity(
        valid=params.delta > 24.0 * ds,
        delta_star=ds,
        threshold=24.0 * ds,
        min_n=_min_n(params.delta, params.eps_star),
    )


def minimal_eps_star(n: int, delta: float) -> float:
    """Smallest ``eps*`` with ``delta > 24 delta*(n, eps*)``.

    Raises ``ValueError`` if no ``eps* < 1/2`` qualifies.
    """
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    k = math.log(24.0 / delta)
    # root of (n + 8k) e^2 - (4k/3) e - 2k = 0
    a = n + 8.0 * k
    e = ((4.0 * k / 3.0) + math.sqrt((4.0 * k / 3.0) ** 2 + 8.0 * k * a)) / (2.0 * a)
    while not delta > 24.0 * delta_star(n, e):
        e = math.nextafter(e, 1.0)
        if e >= 0.5:
            raise ValueError(f"no valid eps_star below 1/2 for n={n}, delta={delta}")
    return e


def default_eps_star(n: int, delta: float, eps: float) -> float:
    """``max(2 eps, minimal valid eps*)``; the bound increases in ``eps*``."""
    try:
        lo = minimal_eps_star(n, delta)
    except ValueError:
        lo = 0.0
    return max(2.0 * eps, lo)


@dataclass(frozen=True)
class BoundResult:
    """Value of the deviation bound split into its three terms.

    ``valid`` is False when the probability guarantee does not apply; the
    number is still returned so bounds can be mapped across regimes.
    """

    value: float
    valid: bool
    statistical: float
    quantile_shift: float
    contamination: float
    delta_star: float = field(default=1.0)

    def __float__(self) -> float:
        return self.value


def theorem41_bound(params: BoundParams) -> BoundResult:
    p = params
    log6 = math.log(6.0 / p.delta)
    statistical = (
        math.sqrt(2.0)
        * (p.u_star / p.sigma_x * math.sqrt(2.0 * log6 / p.n) + 1.0)
        * p.sigma_x
        * math.sqrt(log6 / p.n)
    )
    shift = p.C * p.eps_star
    contamination = p.eps * (2.0 * p.beta * p.sigma + 2.0 * p.C * p.eps_star)
    v = check_validity(p)
    return BoundResult(
        value=statistical + shift + contamination,
        valid=v.valid,
        statistical=statistical,
        quantile_shift=shift,
        contamination=contamination,
        delta_star=v.delta_star,
    )


winsorized_deviation_bound = theorem41_bound


def subgaussian_radius(variance: float, n: int, delta: float, c: float = 1.0) -> float:
    """``c * sqrt(variance * log(1/delta) / n)``."""
    if not (variance > 0 and n > 0 and c > 0):
        raise ValueError("variance, n and c must be positive")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    return c * math.sqrt(variance * math.log(1.0 / delta) / n)


def rbp_theoretical(estimator: EstimatorSpec, n: int) -> Fraction:
    """Replacement breakdown point (value or upper bound) for ``estimator``.

    mean, catoni : 1/n
    median, winsorized : floor((n+1)/2)/n
    mom with k groups : floor((k+1)/2)/n (an upper bound)
    lm_trimmed : (floor(eps n) + 1)/(2n) over the 2n pooled points (an upper bound)
    """
    if n < 2:
        raise ValueError("n must be at least 2")
    kind = estimator.kind
    if kind in ("mean", "catoni"):
        return Fraction(1, n)
    if kind in ("median", "winsorized"):
        return Fraction((n + 1) // 2, n)
    if kind == "mom":
        k = estimator.tuning.k
        return Fraction((k + 1) // 2, n)
    if kind == "lm_trimmed":
        t = math.floor(estimator.tuning.epsilon * n + 1e-9)
        return Fraction(t + 1, 2 * n)
    raise ValueError(f"no breakdown value for {kind!r}")
