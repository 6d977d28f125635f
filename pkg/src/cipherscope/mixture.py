"""Convex-mixture model of intermittent encryption and its detectability limits.

A file with encrypted fraction alpha is modeled as

    P_mix(b; alpha) = alpha/256 + (1 - alpha) * P_orig(b),

the blend of uniform ciphertext with the family's native byte distribution.
The escape trajectory E(alpha) = D_KL(P_mix(alpha) || U) in bits measures how
much recognizable structure still leaks. Writing Delta(b) = P_orig(b) - 1/256
and c^2 = ||Delta||_2^2, the trajectory obeys a quadratic ceiling

    E(alpha) <= (256 / ln 2) * c^2 * (1 - alpha)^2

whenever the small-leak condition max_b |256 (1-alpha) Delta(b)| < 1 holds.
Inverting the ceiling at a detector threshold tau gives the coverage

    alpha* = 1 - sqrt(ln 2 / 256) * sqrt(tau) / c

past which no KL-thresholded histogram detector can fire; dividing raw KL
scores by (256 / ln 2) * c^2 collapses family differences into the coverage
term so one operating point transfers across file types.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .bytestats import N_BINS, ByteDistribution
from .errors import AlphaOutOfRangeError, DegenerateFamilyError, EmptyCorpusError

LN2 = math.log(2.0)
CEILING_SCALE = N_BINS / LN2  # 256 / ln 2

#: Upper bound on c^2, attained by a one-hot distribution.
C_SQUARED_MAX = (N_BINS - 1) / N_BINS


@dataclass(frozen=True)
class FamilyConstant:
    """Bootstrap estimate of a family's c^2 with an empirical 95% CI."""

    family: str
    c_squared_median: float
    ci_low: float
    ci_high: float
    replicates: int
    subset_size: int

    def __post_init__(self):
        if not (self.ci_low <= self.c_squared_median <= self.ci_high):
            raise ValueError("family constant CI must bracket the median")
        if self.c_squared_median < 0 or self.c_squared_median > C_SQUARED_MAX + 1e-12:
            raise ValueError("c^2 must lie in [0, 255/256]")


@dataclass(frozen=True)
class LeakProfile:
    """Per-bin deviation from uniform and the small-leak diagnostic at one alpha."""

    delta: np.ndarray  # Delta(b) = P_orig(b) - 1/256, sums to 0
    epsilon_max: float  # max_b |256 (1-alpha) Delta(b)|
    small_leak_ok: bool

    def __post_init__(self):
        delta = np.asarray(self.delta, dtype=np.float64)
        if delta.shape != (N_BINS,):
            raise ValueError("delta must have 256 entries")
        if abs(float(delta.sum())) > 1e-12:
            raise ValueError("delta must sum to zero")
        if self.small_leak_ok != (self.epsilon_max < 1.0):
            raise ValueError("small_leak_ok inconsistent with epsilon_max")
        object.__setattr__(self, "delta", delta)


def _check_alpha(alpha: float) -> float:
    if not 0.0 <= alpha <= 1.0:
        raise AlphaOutOfRangeError(f"alpha must be in [0, 1], got {alpha}")
    return float(alpha)


def mixture(p_orig: ByteDistribution, alpha: float) -> ByteDistribution:
    """Blend p_orig with uniform ciphertext at encrypted fraction alpha."""
    a = _check_alpha(alpha)
    return ByteDistribution(probs=a / N_BINS + (1.0 - a) * p_orig.probs)


def c_squared(p_orig: ByteDistribution) -> float:
    """Squared Euclidean distance between p_orig and the uniform distribution."""
    return float(((p_orig.probs - 1.0 / N_BINS) ** 2).sum())


def escape_trajectory(p_orig: ByteDistribution, alpha: float) -> float:
    """Exact D_KL(P_mix(alpha) || U) in bits; no smoothing, U has full support."""
    a = _check_alpha(alpha)
    p = mixture(p_orig, a).probs
    mask = p > 0
    return float((p[mask] * np.log2(N_BINS * p[mask])).sum())


def ceiling(c_squared: float, alpha: float) -> float:
    """Detectability ceiling (256/ln2) * c^2 * (1-alpha)^2 in bits."""
    if c_squared < 0:
        raise ValueError("c_squared must be >= 0")
    a = _check_alpha(alpha)
    return CEILING_SCALE * c_squared * (1.0 - a) ** 2


def alpha_star(c_squared: float, tau: float) -> float:
    """Coverage at which a threshold tau becomes unreachable, clamped to [0, 1].

    Families with c^2 == 0 have a ceiling identically 0, so every tau > 0 is
    unreachable at any coverage; that degenerate case is rejected explicitly.
    """
    if c_squared < 0:
        raise ValueError("c_squared must be >= 0")
    if c_squared == 0:
        raise DegenerateFamilyError("c^2 == 0: the ceiling is identically zero")
    if tau <= 0:
        raise ValueError("tau must be > 0")
    a = 1.0 - math.sqrt(LN2 / N_BINS) * math.sqrt(tau) / math.sqrt(c_squared)
    return min(max(a, 0.0), 1.0)


def normalize_kl(raw_kl: float, c_squared: float) -> float:
    """Rescale a raw KL score by the family ceiling constant (256/ln2) * c^2."""
    if raw_kl < 0:
        raise ValueError("raw_kl must be >= 0")
    if c_squared < 0:
        raise ValueError("c_squared must be >= 0")
    if c_squared == 0:
        raise DegenerateFamilyError("c^2 == 0: normalized score is undefined")
    return raw_kl / (CEILING_SCALE * c_squared)


def leak_profile(p_orig: ByteDistribution, alpha: float) -> LeakProfile:
    """Per-bin leak magnitudes and whether the small-leak regime holds."""
    a = _check_alpha(alpha)
    delta = p_orig.probs - 1.0 / N_BINS
    delta = delta - delta.sum() / N_BINS  # cancel float residue so sum is exactly 0
    eps_max = float(N_BINS * (1.0 - a) * np.abs(delta).max())
    return LeakProfile(delta=delta, epsilon_max=eps_max, small_leak_ok=eps_max < 1.0)


def estimate_family_constant(
    corpus: Sequence[ByteDistribution],
    family: str,
    subset_size: int = 200,
    replicates: int = 100,
    seed: int = 0,
    weights: Optional[Sequence[float]] = None,
    method: str = "pool",
) -> FamilyConstant:
    """Bootstrap a family's c^2 from per-file distributions.

    Each replicate samples `subset_size` files with replacement. With
    method="pool" the sampled files' byte mass is pooled (weighted by
    `weights`, typically file lengths) into one aggregate distribution whose
    c^2 is the replicate statistic; method="mean" instead averages per-file
    c^2 values. The report is the median across replicates with an empirical
    2.5/97.5 percentile interval. Per-replicate generators are spawned from
    the master seed, so results do not depend on evaluation order.
    """
    if len(corpus) == 0:
        raise EmptyCorpusError("estimate_family_constant needs a non-empty corpus")
    if subset_size < 1:
        raise ValueError("subset_size must be >= 1")
    if replicates < 1:
        raise ValueError("replicates must be >= 1")
    if method not in ("pool", "mean"):
        raise ValueError("method must be 'pool' or 'mean'")

    probs = np.stack([d.probs for d in corpus])
    if weights is None:
        w = np.ones(len(corpus))
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (len(corpus),) or (w <= 0).any():
            raise ValueError("weights must be positive, one per corpus file")

    children = np.random.SeedSequence(seed).spawn(replicates)
    stats = np.empty(replicates)
    for r, child in enumerate(children):
        rng = np.random.default_rng(child)
        idx = rng.integers(0, len(corpus), size=subset_size)
        if method == "pool":
            ww = w[idx]
            pooled = (probs[idx] * ww[:, None]).sum(axis=0) / ww.sum()
            stats[r] = float(((pooled - 1.0 / N_BINS) ** 2).sum())
        else:
            stats[r] = float(((probs[idx] - 1.0 / N_BINS) ** 2).sum(axis=1).mean())

    lo, hi = np.percentile(stats, [2.5, 97.5])
    return FamilyConstant(
        family=family,
        c_squared_median=float(np.median(stats)),
        ci_low=float(lo),
        ci_high=float(hi),
        replicates=replicates,
        subset_size=subset_size,
    )
