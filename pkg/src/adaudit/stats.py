"""Two-sample Kolmogorov-Smirnov test and Pearson correlation.

Both tests are implemented from first principles (pure Python, no
third-party numerics) so the test suite can check them against an
independent reference library. Pool-size distributions are heavy-tailed
enough that p-values can reach the edge of double precision; instead of
printing 0.0 such values saturate at the smallest positive double and
carry an ``underflow`` marker.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass

#: smallest positive (subnormal) double; used to saturate underflowing p-values
MIN_POSITIVE = 5e-324


@dataclass(frozen=True)
class StatResult:
    statistic: float
    p_value: float
    underflow: bool = False


def _saturate(p: float) -> tuple[float, bool]:
    if p <= 0.0:
        return MIN_POSITIVE, True
    return min(p, 1.0), False


def kolmogorov_sf(lam: float) -> float:
    """Survival function Q(lam) of the Kolmogorov distribution.

    Q(lam) = 2 * sum_{k>=1} (-1)^(k-1) * exp(-2 k^2 lam^2)

    For small lam the alternating series converges slowly, so the
    Jacobi-theta transform of the same function is used instead:

    Q(lam) = 1 - sqrt(2*pi)/lam * sum_{k odd} exp(-(k*pi)^2 / (8 lam^2))
    """
    if lam <= 0.0:
        return 1.0
    if lam < 1.0:
        t = math.exp(-math.pi * math.pi / (8.0 * lam * lam))
        s = sum(t ** (k * k) for k in (1, 3, 5, 7, 9))
        return max(0.0, min(1.0, 1.0 - math.sqrt(2.0 * math.pi) / lam * s))
    total = 0.0
    for k in range(1, 200):
        term = math.exp(-2.0 * k * k * lam * lam)
        if term == 0.0:
            break
        total += term if k % 2 == 1 else -term
    return max(0.0, min(1.0, 2.0 * total))


def _ecdf_sup_distance(a: list[float], b: list[float]) -> float:
    """sup_x |ECDF_a(x) - ECDF_b(x)| evaluated over the pooled sample."""
    sa, sb = sorted(a), sorted(b)
    na, nb = len(sa), len(sb)
    best = 0.0
    for x in sa + sb:
        fa = bisect_right(sa, x) / na
        fb = bisect_right(sb, x) / nb
        best = max(best, abs(fa - fb))
    return best


def ks_two_sample(a: list[float], b: list[float]) -> StatResult:
    """Two-sample KS test with the asymptotic two-sided p-value.

    The statistic is the supremum distance between the two empirical
    CDFs; the p-value is Q(sqrt(n_a n_b / (n_a + n_b)) * D) under the
    limiting Kolmogorov distribution.
    """
    if not a or not b:
        raise ValueError("ks_two_sample requires non-empty samples")
    d = _ecdf_sup_distance([float(x) for x in a], [float(x) for x in b])
    en = len(a) * len(b) / (len(a) + len(b))
    p, underflow = _saturate(kolmogorov_sf(math.sqrt(en) * d))
    if d == 0.0:
        # identical ECDFs: Q(0) is exactly 1, never an underflow
        return StatResult(statistic=0.0, p_value=1.0)
    return StatResult(statistic=d, p_value=p, underflow=underflow)


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    max_iter, eps, fpmin = 300, 3e-16, 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < fpmin:
        d = fpmin
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < fpmin:
            d = fpmin
        c = 1.0 + aa / c
        if abs(c) < fpmin:
            c = fpmin
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return h


def incomplete_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_bt = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    bt = math.exp(log_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def pearson(xs: list[float], ys: list[float]) -> StatResult:
    """Sample Pearson correlation with a two-sided t-distribution p-value.

    With r the sample correlation and df = n - 2, the two-sided p-value
    is I_{df/(df + t^2)}(df/2, 1/2) where t = r * sqrt(df / (1 - r^2)).
    """
    if len(xs) != len(ys):
        raise ValueError("pearson requires equal-length samples")
    n = len(xs)
    if n < 3:
        raise ValueError("pearson requires at least 3 observations")
    mean_x = sum(xs) / n
    mean_y = sum(ys) / n
    sxx = sum((x - mean_x) ** 2 for x in xs)
    syy = sum((y - mean_y) ** 2 for y in ys)
    if sxx == 0.0 or syy == 0.0:
        raise ValueError("pearson is undefined for constant input")
    sxy = sum((x - mean_x) * (y - mean_y) for x, y in zip(xs, ys))
    r = max(-1.0, min(1.0, sxy / math.sqrt(sxx * syy)))

    df = n - 2
    if abs(r) == 1.0:
        # t diverges; the p-value is below any representable positive double
        return StatResult(statistic=r, p_value=MIN_POSITIVE, underflow=True)
    t_squared = r * r * df / (1.0 - r * r)
    p, underflow = _saturate(incomplete_beta(df / 2.0, 0.5, df / (df + t_squared)))
    return StatResult(statistic=r, p_value=p, underflow=underflow)
