"""Nonparametric monotone-trend testing for coverage-indexed statistic series.

Implements the rank-based Mann-Kendall test with the tie-corrected variance

    Var(S) = [ n(n-1)(2n+5) - sum_k q_k (q_k - 1)(2 q_k + 5) ] / 18,

where the q_k are tie-group sizes, a continuity correction of +/-1 on S, and
one-sided p-values against an 'increasing' or 'decreasing' alternative.
Sen's slope is the median of all pairwise slopes (y_j - y_i)/(j - i), with a
rank-based normal-approximation confidence interval over the sorted slopes:

    C  = z_{1-(1-conf)/2} * sqrt(Var(S))
    r_lo = round_half_up((N' - C)/2)        (1-based rank, clamped to [1, N'])
    r_hi = round_half_up((N' + C)/2 + 1)    (clamped likewise)

with N' = n(n-1)/2 pairwise slopes. Both procedures are deliberately simple
enough to cross-check against full pair enumeration.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.special import ndtri

from .errors import SeriesTooShortError

INCREASING = "increasing"
DECREASING = "decreasing"


@dataclass(frozen=True)
class TrendResult:
    s_statistic: int
    variance_s: float
    z_score: float
    p_value: float
    alternative: str


@dataclass(frozen=True)
class SenSlope:
    slope: float
    ci_low: float
    ci_high: float
    confidence: float


def _tie_term(series: Sequence[float]) -> float:
    groups = Counter(series)
    return float(sum(q * (q - 1) * (2 * q + 5) for q in groups.values() if q > 1))


def _variance_s(series: Sequence[float]) -> float:
    n = len(series)
    return (n * (n - 1) * (2 * n + 5) - _tie_term(series)) / 18.0


def _pairwise_sign_sum(y: np.ndarray) -> int:
    diff = np.sign(np.subtract.outer(y, y))  # diff[j, i] = sign(y_j - y_i)
    return int(np.triu(diff.T, k=1).sum())


def mann_kendall(series: Sequence[float], alternative: str = INCREASING) -> TrendResult:
    """Mann-Kendall trend test with one-sided alternative.

    Raises SeriesTooShortError for fewer than 3 points. A constant series
    (zero variance) yields S = 0, z = 0, p = 0.5.
    """
    if alternative not in (INCREASING, DECREASING):
        raise ValueError(f"alternative must be '{INCREASING}' or '{DECREASING}'")
    y = np.asarray(series, dtype=np.float64)
    if y.ndim != 1 or y.size < 3:
        raise SeriesTooShortError("mann_kendall needs a 1-D series of length >= 3")
    s = _pairwise_sign_sum(y)
    var_s = _variance_s(y.tolist())

    if s > 0:
        z = (s - 1) / math.sqrt(var_s)
    elif s < 0:
        z = (s + 1) / math.sqrt(var_s)
    else:
        z = 0.0

    # sf(z) via erfc keeps full precision in the upper tail
    upper = 0.5 * math.erfc(z / math.sqrt(2.0))
    p = upper if alternative == INCREASING else 1.0 - upper
    return TrendResult(s_statistic=s, variance_s=var_s, z_score=z, p_value=p,
                       alternative=alternative)


def _pairwise_slopes(y: np.ndarray) -> np.ndarray:
    n = y.size
    idx = np.arange(n, dtype=np.float64)
    num = np.subtract.outer(y, y)      # y_j - y_i at [j, i]
    den = np.subtract.outer(idx, idx)  # j - i
    ii, jj = np.triu_indices(n, k=1)   # pairs with i < j
    return num[jj, ii] / den[jj, ii]


def sen_slope(series: Sequence[float], confidence: float = 0.95) -> SenSlope:
    """Sen's slope (median pairwise slope per series step) with a rank CI."""
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must be in (0, 1)")
    y = np.asarray(series, dtype=np.float64)
    if y.ndim != 1 or y.size < 2:
        raise SeriesTooShortError("sen_slope needs a 1-D series of length >= 2")

    slopes = np.sort(_pairwise_slopes(y))
    n_pairs = slopes.size
    slope = float(np.median(slopes))

    var_s = _variance_s(y.tolist())
    z = float(ndtri(1.0 - (1.0 - confidence) / 2.0))
    c = z * math.sqrt(var_s)
    r_lo = math.floor((n_pairs - c) / 2.0 + 0.5)
    r_hi = math.floor((n_pairs + c) / 2.0 + 1.0 + 0.5)
    r_lo = min(max(r_lo, 1), n_pairs)
    r_hi = min(max(r_hi, 1), n_pairs)
    return SenSlope(slope=slope, ci_low=float(slopes[r_lo - 1]),
                    ci_high=float(slopes[r_hi - 1]), confidence=confidence)
