"""Statistical battery: Wilcoxon signed-rank, Welch t-test, F-test,
and Bonferroni star annotation.

The Wilcoxon test drops zero differences, uses midranks for ties, and is
exact (full sign-assignment enumeration) up to 12 effective pairs, with a
tie-corrected, continuity-corrected normal approximation beyond that.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np

EXACT_WILCOXON_LIMIT = 12


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    direction: str  # "first-higher" | "second-higher" | "none"
    method: str  # "wilcoxon" | "ttest" | "ftest"


@dataclass(frozen=True)
class StarLevel:
    level: int  # 0..3
    m: int
    alpha: float = 0.05

    @property
    def symbol(self) -> str:
        return "*" * self.level


def _midranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    ranks = np.empty(len(values))
    sorted_vals = values[order]
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def wilcoxon_signed_rank(x, y) -> TestResult:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1 or len(x) < 1:
        raise ValueError("samples must be paired 1-d arrays of equal length >= 1")
    d = x - y
    d = d[d != 0.0]
    n = len(d)
    if n == 0:
        return TestResult(0.0, 1.0, "none", "wilcoxon")
    ranks = _midranks(np.abs(d))
    w_plus = float(ranks[d > 0].sum())
    w_minus = float(ranks[d < 0].sum())
    w = min(w_plus, w_minus)
    if w_plus > w_minus:
        direction = "first-higher"
    elif w_plus < w_minus:
        direction = "second-higher"
    else:
        direction = "none"

    if n <= EXACT_WILCOXON_LIMIT:
        total = ranks.sum()
        hits = 0
        for signs in product((0.0, 1.0), repeat=n):
            s = float(np.dot(signs, ranks))
            if min(s, total - s) <= w + 1e-12:
                hits += 1
        p = hits / 2.0 ** n
    else:
        mean = n * (n + 1) / 4.0
        var = n * (n + 1) * (2 * n + 1) / 24.0
        _, tie_counts = np.unique(ranks, return_counts=True)
        var -= float(((tie_counts ** 3 - tie_counts) / 48.0).sum())
        if var <= 0:
            p = 1.0
        else:
            z = (abs(w_plus - mean) - 0.5) / math.sqrt(var)
            z = max(z, 0.0)
            p = math.erfc(z / math.sqrt(2.0))
    return TestResult(w, min(p, 1.0), direction, "wilcoxon")


def two_sample_ttest(x, y, pooled: bool = False) -> TestResult:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2 or len(y) < 2:
        raise ValueError("each sample needs at least 2 observations")
    mx, my = x.mean(), y.mean()
    vx, vy = x.var(ddof=1), y.var(ddof=1)
    nx, ny = len(x), len(y)
    direction = ("first-higher" if mx > my
                 else "second-higher" if mx < my else "none")
    if vx == 0.0 and vy == 0.0:
        p = 1.0 if mx == my else 0.0
        return TestResult(0.0 if mx == my else math.inf, p, direction, "ttest")
    if pooled:
        sp2 = ((nx - 1) * vx + (ny - 1) * vy) / (nx + ny - 2)
        se2 = sp2 * (1.0 / nx + 1.0 / ny)
        df = nx + ny - 2
    else:
        se2 = vx / nx + vy / ny
        df = se2 ** 2 / ((vx / nx) ** 2 / (nx - 1) + (vy / ny) ** 2 / (ny - 1))
    t = (mx - my) / math.sqrt(se2)
    p = regularized_incomplete_beta(df / 2.0, 0.5, df / (df + t * t))
    return TestResult(t, min(p, 1.0), direction, "ttest")


def f_test_variance_equality(x, y) -> TestResult:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(x) < 2 or len(y) < 2:
        raise ValueError("each sample needs at least 2 observations")
    vx, vy = x.var(ddof=1), y.var(ddof=1)
    direction = ("first-higher" if vx > vy
                 else "second-higher" if vx < vy else "none")
    if vx == 0.0 and vy == 0.0:
        return TestResult(1.0, 1.0, "none", "ftest")
    if vy == 0.0 or vx == 0.0:
        return TestResult(math.inf if vy == 0.0 else 0.0, 0.0, direction, "ftest")
    f = vx / vy
    d1, d2 = len(x) - 1, len(y) - 1
    cdf = regularized_incomplete_beta(d1 / 2.0, d2 / 2.0,
                                      d1 * f / (d1 * f + d2))
    p = 2.0 * min(cdf, 1.0 - cdf)
    return TestResult(f, min(p, 1.0), direction, "ftest")


def bonferroni_star(p: float, m: int, alpha: float = 0.05) -> StarLevel:
    if not 0.0 <= p <= 1.0:
        raise ValueError("p must lie in [0, 1]")
    if m < 1:
        raise ValueError("m must be >= 1")
    if p <= 0.001 / m:
        level = 3
    elif p <= 0.01 / m:
        level = 2
    elif p <= alpha / m:
        level = 1
    else:
        level = 0
    return StarLevel(level, m, alpha)


def regularized_incomplete_beta(a: float, b: float, x: float) -> float:
    """I_x(a, b) by Lentz's continued fraction, accurate to ~1e-12."""
    if a <= 0.0 or b <= 0.0:
        raise ValueError("a and b must be > 0")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0:
        return 0.0
    if x == 1.0:
        return 1.0
    ln_bt = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
             + a * math.log(x) + b * math.log1p(-x))
    bt = math.exp(ln_bt)
    if x < (a + 1.0) / (a + b + 2.0):
        return bt * _betacf(a, b, x) / a
    return 1.0 - bt * _betacf(b, a, 1.0 - x) / b


def _betacf(a: float, b: float, x: float, max_iter: int = 300,
            eps: float = 1e-14) -> float:
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < eps:
            break
    return h
