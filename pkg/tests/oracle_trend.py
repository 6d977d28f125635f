"""Independent brute-force oracle for the trend statistics.

Pure-Python pair enumeration, tie counting via Counter, and normal tail
probabilities via math.erfc, so nothing here shares code with the library
implementation. The 0.95 two-sided normal quantile is hardcoded.
"""

import math
from collections import Counter

Z_95 = 1.959963984540054  # Phi^-1(0.975)


def normal_upper_tail(z):
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def variance_s(series):
    n = len(series)
    tie_term = sum(q * (q - 1) * (2 * q + 5)
                   for q in Counter(series).values() if q > 1)
    return (n * (n - 1) * (2 * n + 5) - tie_term) / 18.0


def mann_kendall_oracle(series, alternative):
    s = 0
    n = len(series)
    for i in range(n):
        for j in range(i + 1, n):
            d = series[j] - series[i]
            s += (d > 0) - (d < 0)
    var_s = variance_s(series)
    if s > 0:
        z = (s - 1) / math.sqrt(var_s)
    elif s < 0:
        z = (s + 1) / math.sqrt(var_s)
    else:
        z = 0.0
    upper = normal_upper_tail(z)
    p = upper if alternative == "increasing" else 1.0 - upper
    return s, var_s, z, p


def sen_slope_oracle(series, z_value=Z_95):
    n = len(series)
    slopes = sorted((series[j] - series[i]) / (j - i)
                    for i in range(n) for j in range(i + 1, n))
    n_pairs = len(slopes)
    mid = n_pairs // 2
    if n_pairs % 2:
        median = slopes[mid]
    else:
        median = (slopes[mid - 1] + slopes[mid]) / 2.0
    c = z_value * math.sqrt(variance_s(series))
    r_lo = math.floor((n_pairs - c) / 2.0 + 0.5)
    r_hi = math.floor((n_pairs + c) / 2.0 + 1.0 + 0.5)
    r_lo = min(max(r_lo, 1), n_pairs)
    r_hi = min(max(r_hi, 1), n_pairs)
    return median, slopes[r_lo - 1], slopes[r_hi - 1]
