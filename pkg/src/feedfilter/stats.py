"""Statistical battery: one-way ANOVA with effect size, Tukey HSD,
Wilcoxon signed-rank, and simultaneous confidence intervals for
proportion differences, plus the distribution numerics they need.

All distribution functions are implemented here rather than imported:
the F CDF goes through a continued-fraction regularized incomplete beta,
and studentized-range quantiles come from direct numeric integration of
the range CDF plus bisection.  Test suites check them against independent
oracles (definitional sums of squares, brute-force sign enumeration,
numeric quadrature, published table values).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

# ---------------------------------------------------------------------------
# Scalar distribution primitives


def norm_cdf(x: float) -> float:
    return 0.5 * (1.0 + math.erf(x / math.sqrt(2.0)))


def norm_pdf(x: float) -> float:
    return math.exp(-0.5 * x * x) / math.sqrt(2.0 * math.pi)


def norm_ppf(p: float) -> float:
    """Inverse standard normal CDF via bisection plus Newton polish."""
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must be in (0,1), got {p}")
    lo, hi = -40.0, 40.0
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if norm_cdf(mid) < p:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    for _ in range(4):
        pdf = norm_pdf(x)
        if pdf <= 0.0:
            break
        x -= (norm_cdf(x) - p) / pdf
    return x


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for the incomplete beta (modified Lentz)."""
    max_iter, eps, fpmin = 500, 1e-16, 1e-300
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
            return h
    raise ArithmeticError("incomplete beta continued fraction did not converge")


def reg_inc_beta(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    ln_front = (
        math.lgamma(a + b)
        - math.lgamma(a)
        - math.lgamma(b)
        + a * math.log(x)
        + b * math.log1p(-x)
    )
    front = math.exp(ln_front)
    if x < (a + 1.0) / (a + b + 2.0):
        return front * _betacf(a, b, x) / a
    return 1.0 - front * _betacf(b, a, 1.0 - x) / b


def f_cdf(x: float, d1: int, d2: int) -> float:
    """CDF of the F distribution with (d1, d2) degrees of freedom."""
    if d1 < 1 or d2 < 1:
        raise ValueError("degrees of freedom must be >= 1")
    if x < 0:
        raise ValueError("x must be nonnegative")
    if x == 0.0:
        return 0.0
    if math.isinf(x):
        return 1.0
    t = d1 * x / (d1 * x + d2)
    return reg_inc_beta(d1 / 2.0, d2 / 2.0, t)


def f_critical(alpha: float, d1: int, d2: int) -> float:
    """Smallest x with upper tail probability <= alpha, by bisection."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0,1)")
    lo, hi = 0.0, 1.0
    while 1.0 - f_cdf(hi, d1, d2) > alpha:
        hi *= 2.0
        if hi > 1e12:
            raise ArithmeticError("failed to bracket the F critical value")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if 1.0 - f_cdf(mid, d1, d2) > alpha:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Studentized range distribution

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(12)


def _panel_nodes(lo: float, hi: float, panels: int) -> tuple[np.ndarray, np.ndarray]:
    edges = np.linspace(lo, hi, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    weights = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return nodes, weights

_vec_erf = np.vectorize(math.erf)


def _norm_cdf_array(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + _vec_erf(x / math.sqrt(2.0)))


class _StudentizedRangeCdf:
    """CDF of the studentized range for k groups and df error degrees.

    Precomputes quadrature grids once so repeated evaluations during
    bisection stay cheap.
    """

    def __init__(self, k: int, df: int):
        if k < 2 or df < 1:
            raise ValueError("need k >= 2 and df >= 1")
        self.k = k
        self.df = df
        self._z, z_w = _panel_nodes(-8.5, 8.5, 36)
        self._z_term = z_w * np.exp(-0.5 * self._z**2) / math.sqrt(2.0 * math.pi)
        self._phi_z = _norm_cdf_array(self._z)
        spread = 12.0 / math.sqrt(2.0 * df)
        s_lo = max(0.0, 1.0 - spread)
        s_hi = 1.0 + max(spread, 8.0 / math.sqrt(df))
        s, s_w = _panel_nodes(s_lo, s_hi, 48)
        keep = s > 0.0
        s, s_w = s[keep], s_w[keep]
        ln_const = (
            math.log(2.0)
            + (df / 2.0) * math.log(df)
            - (df / 2.0) * math.log(2.0)
            - math.lgamma(df / 2.0)
        )
        log_density = ln_const + (df - 1) * np.log(s) - 0.5 * df * s**2
        self._s = s
        self._s_term = s_w * np.exp(log_density)

    def range_cdf(self, r: float) -> float:
        """P(range of k standard normals <= r)."""
        if r <= 0.0:
            return 0.0
        inner = (self._phi_z - _norm_cdf_array(self._z - r)) ** (self.k - 1)
        return float(self.k * np.sum(self._z_term * inner))

    def __call__(self, q: float) -> float:
        if q <= 0.0:
            return 0.0
        if self.df > 10_000:  # effectively infinite error df
            return self.range_cdf(q)
        shifted = self._z[None, :] - q * self._s[:, None]
        inner = (self._phi_z[None, :] - _norm_cdf_array(shifted)) ** (self.k - 1)
        range_probs = self.k * np.sum(self._z_term[None, :] * inner, axis=1)
        return float(np.sum(self._s_term * range_probs))


def studentized_range_cdf(q: float, k: int, df: int) -> float:
    return _StudentizedRangeCdf(k, df)(q)


def studentized_range_quantile(alpha: float, k: int, df: int) -> float:
    """Upper-alpha quantile of the studentized range, by bisection.

    Tolerance is 1e-4 in probability.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must be in (0,1)")
    cdf = _StudentizedRangeCdf(k, df)
    target = 1.0 - alpha
    lo, hi = 0.0, 4.0
    while cdf(hi) < target:
        hi *= 2.0
        if hi > 1e6:
            raise ArithmeticError("failed to bracket the studentized range quantile")
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        p = cdf(mid)
        if abs(p - target) < 1e-6 or hi - lo < 1e-9:
            return mid
        if p < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


# ---------------------------------------------------------------------------
# Result types


@dataclass(frozen=True)
class StatConfig:
    alpha: float = 0.05
    ci_rule: str = "paper"  # "paper": |p-diff| > alpha; "conventional": 0 outside CI

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must be in (0,1), got {self.alpha}")
        if self.ci_rule not in ("paper", "conventional"):
            raise ValueError(f"unknown ci_rule: {self.ci_rule!r}")


@dataclass(frozen=True)
class AnovaResult:
    F: float
    df_between: int
    df_within: int
    p_value: float
    eta_squared: float
    ss_between: float
    ss_within: float
    ss_total: float

    def to_json_dict(self) -> dict:
        return {
            "F": self.F,
            "df_between": self.df_between,
            "df_within": self.df_within,
            "p_value": self.p_value,
            "eta_squared": self.eta_squared,
            "ss_between": self.ss_between,
            "ss_within": self.ss_within,
            "ss_total": self.ss_total,
        }


@dataclass(frozen=True)
class TukeyPair:
    q: float
    significant_05: bool
    significant_01: bool


@dataclass(frozen=True)
class TukeyResult:
    pairwise: Mapping[tuple[int, int], TukeyPair]
    q_critical_05: float
    q_critical_01: float
    ms_within: float

    def to_json_dict(self) -> dict:
        return {
            "pairs": [
                {
                    "i": i,
                    "j": j,
                    "q": pair.q,
                    "significant_05": pair.significant_05,
                    "significant_01": pair.significant_01,
                }
                for (i, j), pair in sorted(self.pairwise.items())
            ],
            "q_critical_05": self.q_critical_05,
            "q_critical_01": self.q_critical_01,
            "ms_within": self.ms_within,
        }


@dataclass(frozen=True)
class WilcoxonResult:
    n_effective: int
    W: float
    p_value: float
    method: str  # "exact" | "normal_approx" | "no-test"

    def to_json_dict(self) -> dict:
        return {
            "n_effective": self.n_effective,
            "W": self.W,
            "p_value": self.p_value,
            "method": self.method,
        }


@dataclass(frozen=True)
class PropDiffCI:
    p_diff: float
    diff: float  # signed adjusted difference (interval center)
    lower: float
    upper: float
    significant: bool

    def to_json_dict(self) -> dict:
        return {
            "p_diff": self.p_diff,
            "diff": self.diff,
            "lower": self.lower,
            "upper": self.upper,
            "significant": self.significant,
        }


# ---------------------------------------------------------------------------
# Tests


def _check_groups(groups: Sequence[Sequence[float]]) -> None:
    if len(groups) < 2:
        raise ValueError("need at least 2 groups")
    for i, g in enumerate(groups):
        if len(g) < 2:
            raise ValueError(f"group {i} has fewer than 2 values")


def anova_oneway(groups: Sequence[Sequence[float]]) -> AnovaResult:
    """Classical one-way between/within decomposition with eta squared."""
    _check_groups(groups)
    k = len(groups)
    n_total = sum(len(g) for g in groups)
    grand_mean = sum(sum(g) for g in groups) / n_total
    ss_between = sum(len(g) * (sum(g) / len(g) - grand_mean) ** 2 for g in groups)
    ss_within = sum(
        sum((x - sum(g) / len(g)) ** 2 for x in g) for g in groups
    )
    ss_total = ss_between + ss_within
    df_between = k - 1
    df_within = n_total - k
    ms_between = ss_between / df_between
    ms_within = ss_within / df_within
    if ms_within == 0.0:
        f_stat = 0.0 if ms_between == 0.0 else math.inf
    else:
        f_stat = ms_between / ms_within
    p_value = 1.0 - f_cdf(f_stat, df_between, df_within)
    eta_squared = ss_between / ss_total if ss_total > 0.0 else 0.0
    return AnovaResult(
        F=f_stat,
        df_between=df_between,
        df_within=df_within,
        p_value=p_value,
        eta_squared=eta_squared,
        ss_between=ss_between,
        ss_within=ss_within,
        ss_total=ss_total,
    )


def tukey_hsd(groups: Sequence[Sequence[float]], config: StatConfig = StatConfig()) -> TukeyResult:
    """All-pairs studentized-range comparison of group means.

    Unequal group sizes use the Tukey-Kramer standard error.
    """
    _check_groups(groups)
    k = len(groups)
    n_total = sum(len(g) for g in groups)
    df_within = n_total - k
    ss_within = sum(sum((x - sum(g) / len(g)) ** 2 for x in g) for g in groups)
    ms_within = ss_within / df_within
    q_crit_05 = studentized_range_quantile(0.05, k, df_within)
    q_crit_01 = studentized_range_quantile(0.01, k, df_within)
    means = [sum(g) / len(g) for g in groups]
    pairwise: dict[tuple[int, int], TukeyPair] = {}
    for i in range(k):
        for j in range(i + 1, k):
            se = math.sqrt(
                ms_within / 2.0 * (1.0 / len(groups[i]) + 1.0 / len(groups[j]))
            )
            if se == 0.0:
                q = 0.0 if means[i] == means[j] else math.inf
            else:
                q = abs(means[i] - means[j]) / se
            pairwise[(i, j)] = TukeyPair(
                q=q,
                significant_05=q > q_crit_05,
                significant_01=q > q_crit_01,
            )
    return TukeyResult(
        pairwise=pairwise,
        q_critical_05=q_crit_05,
        q_critical_01=q_crit_01,
        ms_within=ms_within,
    )


def _midranks(values: Sequence[float]) -> list[float]:
    order = sorted(range(len(values)), key=lambda i: values[i])
    ranks = [0.0] * len(values)
    i = 0
    while i < len(order):
        j = i
        while j + 1 < len(order) and values[order[j + 1]] == values[order[i]]:
            j += 1
        rank = (i + j + 2) / 2.0  # average of 1-based positions i+1 .. j+1
        for idx in order[i : j + 1]:
            ranks[idx] = rank
        i = j + 1
    return ranks


def _exact_signed_rank_p(ranks: Sequence[float], w_observed: float) -> float:
    """Exact two-sided p over all 2^n sign assignments.

    Ranks are midranks (multiples of 1/2), so doubling makes them integers
    and the distribution of the signed-rank sum can be counted exactly with
    a subset-sum table; the count matches literal enumeration bit for bit.
    """
    doubled = [int(round(2.0 * r)) for r in ranks]
    total = sum(doubled)
    counts = [0] * (total + 1)
    counts[0] = 1
    for r in doubled:
        nxt = counts[:]
        for s in range(total - r + 1):
            if counts[s]:
                nxt[s + r] += counts[s]
        counts = nxt
    w2_observed = abs(int(round(2.0 * w_observed)))
    favorable = sum(
        c for s, c in enumerate(counts) if abs(2 * s - total) >= w2_observed
    )
    return favorable / (2 ** len(ranks))


def wilcoxon_signed_rank(
    paired_a: Sequence[float], paired_b: Sequence[float]
) -> WilcoxonResult:
    """Two-sided Wilcoxon signed-rank test on paired samples.

    Zero differences are dropped.  Exact when n_effective <= 25; otherwise a
    normal approximation with tie-corrected variance and continuity
    correction.  All-zero differences yield method "no-test" with p = 1.
    """
    if len(paired_a) != len(paired_b):
        raise ValueError("paired samples must have equal length")
    if not paired_a:
        raise ValueError("need at least one pair")
    diffs = [a - b for a, b in zip(paired_a, paired_b) if a - b != 0.0]
    if not diffs:
        return WilcoxonResult(n_effective=0, W=0.0, p_value=1.0, method="no-test")
    n = len(diffs)
    ranks = _midranks([abs(d) for d in diffs])
    w = sum(r if d > 0 else -r for d, r in zip(diffs, ranks))
    if n <= 25:
        return WilcoxonResult(
            n_effective=n,
            W=w,
            p_value=_exact_signed_rank_p(ranks, w),
            method="exact",
        )
    variance = sum(r * r for r in ranks)  # midranks absorb the tie correction
    # |W| moves on a lattice of step 2, so the continuity correction is 1.
    z = max(abs(w) - 1.0, 0.0) / math.sqrt(variance)
    p = min(1.0, 2.0 * (1.0 - norm_cdf(z)))
    return WilcoxonResult(n_effective=n, W=w, p_value=p, method="normal_approx")


def prop_diff_ci(
    successes_a: int,
    trials_a: int,
    successes_b: int,
    trials_b: int,
    config: StatConfig = StatConfig(),
) -> PropDiffCI:
    """Adjusted-Wald confidence interval for a difference of proportions.

    One success and one failure are added to each sample before forming the
    interval.  p_diff is the absolute difference of the raw sample
    proportions.  The default significance rule compares p_diff against
    alpha; ci_rule="conventional" instead flags intervals excluding zero.
    """
    for successes, trials, label in (
        (successes_a, trials_a, "a"),
        (successes_b, trials_b, "b"),
    ):
        if trials < 1:
            raise ValueError(f"trials_{label} must be >= 1")
        if not 0 <= successes <= trials:
            raise ValueError(f"successes_{label} out of range 0..trials_{label}")
    p_hat_a = successes_a / trials_a
    p_hat_b = successes_b / trials_b
    p_diff = abs(p_hat_a - p_hat_b)
    adj_a = (successes_a + 1) / (trials_a + 2)
    adj_b = (successes_b + 1) / (trials_b + 2)
    diff = adj_a - adj_b
    se = math.sqrt(
        adj_a * (1.0 - adj_a) / (trials_a + 2) + adj_b * (1.0 - adj_b) / (trials_b + 2)
    )
    z = norm_ppf(1.0 - config.alpha / 2.0)
    lower = diff - z * se
    upper = diff + z * se
    if config.ci_rule == "paper":
        significant = p_diff > config.alpha
    else:
        significant = lower > 0.0 or upper < 0.0
    return PropDiffCI(
        p_diff=p_diff, diff=diff, lower=lower, upper=upper, significant=significant
    )


# ---------------------------------------------------------------------------
# Rank helpers


def spearman(x: Sequence[float], y: Sequence[float]) -> float:
    """Spearman rank correlation with midrank ties.

    Identical rank vectors short-circuit to exactly 1.0 so monotone
    identities hold bit-for-bit.
    """
    if len(x) != len(y):
        raise ValueError("sequences must have equal length")
    if len(x) < 2:
        raise ValueError("need at least 2 points")
    rx = _midranks(x)
    ry = _midranks(y)
    if rx == ry:
        return 1.0
    n = len(rx)
    mean_x = sum(rx) / n
    mean_y = sum(ry) / n
    cov = sum((a - mean_x) * (b - mean_y) for a, b in zip(rx, ry))
    var_x = sum((a - mean_x) ** 2 for a in rx)
    var_y = sum((b - mean_y) ** 2 for b in ry)
    if var_x == 0.0 or var_y == 0.0:
        raise ValueError("rank variance is zero; correlation undefined")
    return cov / math.sqrt(var_x * var_y)
