"""Significance testing on 2x2 contingency tables.

The table crosses {target stratum, complement stratum} (rows) with
{current window, reference window} (columns):

        current  reference
target     a        b
other      c        d

All tests are elevation-sided: only an excess of the target/current cell
over its margin-product expectation counts as significant.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import erfc, gammaln

from .errors import StatError

FISHER = "fisher"
CHI_SQUARE = "chi_square"

# Routing thresholds (Cochran's rule plus a small-sample floor).
MIN_EXPECTED_CELL = 5.0
MIN_GRAND_TOTAL = 200


@dataclass(frozen=True)
class ContingencyTable:
    a: int  # target stratum, current window
    b: int  # target stratum, reference window
    c: int  # complement stratum, current window
    d: int  # complement stratum, reference window

    def __post_init__(self):
        if min(self.a, self.b, self.c, self.d) < 0:
            raise StatError(f"negative cell in {self}")

    @property
    def total(self) -> int:
        return self.a + self.b + self.c + self.d


@dataclass(frozen=True)
class TestResult:
    p_value: float
    statistic: Optional[float]  # chi-square value; None for Fisher
    test_used: str
    expected_a: float


def expected_count(t: ContingencyTable) -> float:
    """Margin-product expectation of the target/current cell: (a+b)(a+c)/N."""
    n = t.total
    if n == 0:
        raise StatError("expected count undefined for an empty table")
    return (t.a + t.b) * (t.a + t.c) / n


def expected_cells(t: ContingencyTable) -> tuple[float, float, float, float]:
    """All four margin-product expected cells (ea, eb, ec, ed)."""
    n = t.total
    if n == 0:
        raise StatError("expected cells undefined for an empty table")
    row_t, row_o = t.a + t.b, t.c + t.d
    col_c, col_r = t.a + t.c, t.b + t.d
    return (row_t * col_c / n, row_t * col_r / n,
            row_o * col_c / n, row_o * col_r / n)


def _log_binom(n, k):
    return gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1)


def fisher_exact_p(t: ContingencyTable) -> float:
    """One-sided (elevation) Fisher exact p-value: P[X >= a] for the
    hypergeometric X with t's margins.

    Summed in log space via log-factorials, so large margins do not
    overflow.
    """
    a, n = t.a, t.total
    if n == 0 or a == 0:
        return 1.0
    row_t = t.a + t.b  # target stratum margin
    col_c = t.a + t.c  # current window margin
    k_hi = min(row_t, col_c)
    if a > k_hi:
        raise StatError(f"cell a={a} exceeds its margins in {t}")
    ks = np.arange(a, k_hi + 1)
    log_pmf = (_log_binom(row_t, ks)
               + _log_binom(n - row_t, col_c - ks)
               - _log_binom(n, col_c))
    m = log_pmf.max()
    return float(min(1.0, np.exp(m) * np.exp(log_pmf - m).sum()))


def chi2_upper_tail(statistic) -> float:
    """Upper-tail probability of chi-square with 1 degree of freedom."""
    return erfc(np.sqrt(np.asarray(statistic, dtype=float) / 2.0))


def chi_square_p(t: ContingencyTable) -> tuple[float, float]:
    """Pearson chi-square on the 2x2 table, no continuity correction.

    Returns (statistic, p). The reported p is elevation-sided: half the
    two-sided chi-square(1) tail when a exceeds its expectation, else 1.
    """
    ea, eb, ec, ed = expected_cells(t)
    if min(ea, eb, ec, ed) <= 0:
        raise StatError(f"zero expected cell in {t}; use Fisher instead")
    stat = ((t.a - ea) ** 2 / ea + (t.b - eb) ** 2 / eb
            + (t.c - ec) ** 2 / ec + (t.d - ed) ** 2 / ed)
    if t.a > ea:
        p = float(chi2_upper_tail(stat)) / 2.0
    else:
        p = 1.0
    return float(stat), p


def select_test(t: ContingencyTable) -> str:
    """Route to Fisher for small samples, chi-square otherwise.

    Fisher iff any margin-product expected cell is below
    MIN_EXPECTED_CELL or the grand total is below MIN_GRAND_TOTAL.
    """
    if t.total == 0:
        return FISHER
    if t.total < MIN_GRAND_TOTAL:
        return FISHER
    if min(expected_cells(t)) < MIN_EXPECTED_CELL:
        return FISHER
    return CHI_SQUARE


def evaluate_table(t: ContingencyTable) -> TestResult:
    """Score one table: route via select_test, report p and expected count."""
    if t.total == 0:
        return TestResult(p_value=1.0, statistic=None, test_used=FISHER,
                          expected_a=0.0)
    test = select_test(t)
    exp_a = expected_count(t)
    if test == FISHER:
        return TestResult(p_value=fisher_exact_p(t), statistic=None,
                          test_used=FISHER, expected_a=exp_a)
    stat, p = chi_square_p(t)
    return TestResult(p_value=p, statistic=stat, test_used=CHI_SQUARE,
                      expected_a=exp_a)


def hypergeom_sf_vec(a, total, successes, draws):
    """Vectorized hypergeometric upper tail P[X >= a].

    The pmf at a is evaluated with log-factorials; the remaining terms
    follow the pmf recurrence
        pmf(k+1) = pmf(k) * (K-k)(n-k) / ((k+1)(N-K-n+k+1)),
    summed until the support ends. Exact up to float rounding and far
    faster than per-element exact-test calls.
    """
    a = np.asarray(a, dtype=np.int64)
    N = np.asarray(total, dtype=np.int64)
    K = np.asarray(successes, dtype=np.int64)
    n = np.asarray(draws, dtype=np.int64)
    a, N, K, n = np.broadcast_arrays(a, N, K, n)
    p = np.ones(a.shape, dtype=float)

    k_hi = np.minimum(K, n)
    live = (a > np.maximum(0, K + n - N)) & (a <= k_hi)
    if not live.any():
        return p
    ai, Ni, Ki, ni = a[live], N[live], K[live], n[live]
    log_pmf = (_log_binom(Ki, ai) + _log_binom(Ni - Ki, ni - ai)
               - _log_binom(Ni, ni))
    term = np.exp(log_pmf)
    acc = term.copy()
    k = ai.copy()
    hi = np.minimum(Ki, ni)
    active = k < hi
    while active.any():
        ka = k[active]
        ratio = ((Ki[active] - ka) * (ni[active] - ka)).astype(float) / (
            (ka + 1) * (Ni[active] - Ki[active] - ni[active] + ka + 1))
        term[active] *= ratio
        acc[active] += term[active]
        k[active] += 1
        # Stop an element once the rest of its support cannot move the sum:
        # past the mode the terms decrease, so the neglected tail is at
        # most (hi - k) * term. (Before the mode this bound cannot
        # trigger, since acc <= (k - a + 1) * term there.)
        active = (k < hi) & (term * (hi - k) > acc * 1e-16)
    out = np.minimum(acc, 1.0)
    p[live] = out
    p[a <= np.maximum(0, K + n - N)] = 1.0
    return p


def evaluate_tables_vec(a, b, c, d):
    """Vectorized evaluate_table over parallel cell arrays.

    Returns (p_values, expected_a, fisher_mask) as float/bool arrays.
    The per-element routing and conventions match evaluate_table exactly;
    the Fisher branch evaluates the same hypergeometric survival
    function as fisher_exact_p.
    """
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    c = np.asarray(c, dtype=np.int64)
    d = np.asarray(d, dtype=np.int64)
    n = a + b + c + d
    row_t, row_o = a + b, c + d
    col_c, col_r = a + c, b + d

    safe_n = np.where(n > 0, n, 1)
    ea = row_t * col_c / safe_n
    eb = row_t * col_r / safe_n
    ec = row_o * col_c / safe_n
    ed = row_o * col_r / safe_n
    min_exp = np.minimum(np.minimum(ea, eb), np.minimum(ec, ed))

    fisher_mask = (n == 0) | (n < MIN_GRAND_TOTAL) | (min_exp < MIN_EXPECTED_CELL)

    p = np.ones(a.shape, dtype=float)

    fm = fisher_mask & (n > 0) & (a > 0)
    if fm.any():
        p[fm] = hypergeom_sf_vec(a[fm], n[fm], row_t[fm], col_c[fm])

    cm = ~fisher_mask
    if cm.any():
        num = n[cm].astype(float) * (a[cm] * d[cm] - b[cm] * c[cm]).astype(float) ** 2
        den = (row_t[cm] * row_o[cm]).astype(float) * (col_c[cm] * col_r[cm]).astype(float)
        stat = num / den
        elevated = a[cm] > ea[cm]
        p_cm = np.ones(stat.shape)
        p_cm[elevated] = chi2_upper_tail(stat[elevated]) / 2.0
        p[cm] = p_cm

    expected_a = np.where(n > 0, ea, 0.0)
    return np.minimum(p, 1.0), expected_a, fisher_mask


def benjamini_hochberg(p_values):
    """BH-adjusted p-values (step-up FDR). Optional; screening reports raw
    p-values by default."""
    p = np.asarray(p_values, dtype=float)
    m = p.size
    if m == 0:
        return p
    order = np.argsort(p, kind="stable")
    ranked = p[order] * m / np.arange(1, m + 1)
    ranked = np.minimum.accumulate(ranked[::-1])[::-1]
    out = np.empty(m)
    out[order] = np.minimum(ranked, 1.0)
    return out
