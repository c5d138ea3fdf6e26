"""Straight-line reference computations used as test oracles.

Nothing here imports the package; each function restates a definition in
the most literal form available (exact rationals where possible) so that a
shared bug cannot hide in both sides of a comparison.
"""

from __future__ import annotations

import math
from fractions import Fraction


def median_exact(values):
    s = sorted(Fraction(v) for v in values)
    n = len(s)
    # 1-based order statistics floor((n+1)/2) and floor((n+2)/2)
    return (s[(n + 1) // 2 - 1] + s[(n + 2) // 2 - 1]) / 2


def mad_exact(values):
    med = median_exact(values)
    return median_exact([abs(Fraction(v) - med) for v in values])


def winsorized_exact(values, beta):
    """Sort, take median and MAD by definition, clip, average. Exact."""
    med = median_exact(values)
    if beta == 0:
        return med
    scale = mad_exact(values)
    b = Fraction(beta)
    lo, hi = med - b * scale, med + b * scale
    clipped = [min(max(Fraction(v), lo), hi) for v in values]
    return sum(clipped) / len(clipped)


def catoni_root_scan(values, alpha, lo, hi, steps=200_001):
    """Sign-change scan on a fine grid followed by plain bisection."""

    def psi(x):
        return math.log(1 + x + x * x / 2) if x >= 0 else -math.log(1 - x + x * x / 2)

    def score(mu):
        return sum(psi(alpha * (v - mu)) for v in values)

    step = (hi - lo) / (steps - 1)
    a = lo
    for i in range(1, steps):
        b = lo + i * step
        if score(a) > 0 >= score(b):
            break
        a = b
    for _ in range(200):
        mid = (a + b) / 2
        if score(mid) > 0:
            a = mid
        else:
            b = mid
    return (a + b) / 2


def clip_mean(x, lo, hi):
    return sum(min(max(v, lo), hi) for v in x) / len(x)


def bernstein_line(n, t, nu, b):
    num = n * t ** 2
    den = 2 * (nu + b * t / 3)
    return min(1.0, math.exp(-num / den))


def delta_star_line(n, e):
    return math.exp(-n * e ** 2 / (8 * (1 / 4 - e ** 2 + e / 6)))


def bound_line(n, delta, eps, eps_star, beta, mu, sigma, sigma_x, c1, c2):
    L = math.log(6 / delta)
    u = abs(mu) + beta * sigma
    C = c1 + c2
    stat = math.sqrt(2) * (u / sigma_x * math.sqrt(2 * L / n) + 1) * sigma_x * math.sqrt(L / n)
    return stat + C * eps_star + eps * (2 * beta * sigma + 2 * C * eps_star)


def radius_line(variance, n, delta, c):
    return c * math.sqrt(variance * math.log(1 / delta) / n)
