"""Byte-histogram statistics and distribution distances.

The 256-bin byte histogram is the substrate for everything else in this
package: scalar traits (entropy, variance, skewness), distances between a
partially encrypted file and a reference (L2, KL, total variation), and the
quantile bands used by the coverage atlas.

Conventions, chosen to match the magnitudes observed in partially encrypted
corpora:

* entropy is measured in bits with 0*log2(0) = 0, so the ceiling is 8 bits
  per byte;
* variance and skewness are population (uncorrected) moments of the 256 bin
  probabilities viewed as a data vector, which puts the one-hot ceiling at
  255/65536 and ~15.906 respectively;
* skewness of a flat distribution (second moment zero) is defined as 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

import numpy as np

from .errors import EmptyInputError, SupportMismatchError

N_BINS = 256

BytesLike = Union[bytes, bytearray, memoryview, np.ndarray]


@dataclass(frozen=True)
class ByteHistogram:
    """Raw occurrence counts per byte value."""

    counts: np.ndarray  # shape (256,), non-negative integers
    total: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (N_BINS,):
            raise ValueError(f"histogram needs exactly {N_BINS} bins, got {counts.shape}")
        if (counts < 0).any():
            raise ValueError("histogram counts must be non-negative")
        if int(counts.sum()) != int(self.total):
            raise ValueError("histogram counts do not sum to total")
        object.__setattr__(self, "counts", counts)
        object.__setattr__(self, "total", int(self.total))

    def __eq__(self, other):
        if not isinstance(other, ByteHistogram):
            return NotImplemented
        return self.total == other.total and np.array_equal(self.counts, other.counts)


@dataclass(frozen=True)
class ByteDistribution:
    """Normalized byte-value probabilities."""

    probs: np.ndarray  # shape (256,), sums to 1

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.shape != (N_BINS,):
            raise ValueError(f"distribution needs exactly {N_BINS} bins, got {probs.shape}")
        if (probs < 0).any():
            raise ValueError("probabilities must be non-negative")
        s = float(probs.sum())
        if not (1 - 1e-9 <= s <= 1 + 1e-9):
            raise ValueError(f"probabilities sum to {s}, expected 1")
        object.__setattr__(self, "probs", probs)

    def __eq__(self, other):
        if not isinstance(other, ByteDistribution):
            return NotImplemented
        return np.array_equal(self.probs, other.probs)


@dataclass(frozen=True)
class StatVector:
    """All scalar traits of one observed distribution against a reference."""

    entropy_bits: float
    variance: float
    skewness: float
    l2_to_ref: float
    kl_to_ref_bits: float
    tv_to_ref: float


@dataclass(frozen=True)
class QuantileBand:
    """Five-point quantile summary (deciles and quartiles around the median)."""

    q10: float
    q25: float
    q50: float
    q75: float
    q90: float

    def __post_init__(self):
        if not (self.q10 <= self.q25 <= self.q50 <= self.q75 <= self.q90):
            raise ValueError("quantiles must be non-decreasing")


def _as_byte_array(data: BytesLike) -> np.ndarray:
    if isinstance(data, np.ndarray):
        if data.dtype != np.uint8:
            raise ValueError("byte arrays must have dtype uint8")
        return data
    return np.frombuffer(bytes(data) if isinstance(data, memoryview) else data, dtype=np.uint8)


def histogram(data: BytesLike) -> ByteHistogram:
    """Count occurrences of each byte value. Empty input gives an all-zero histogram."""
    arr = _as_byte_array(data)
    counts = np.bincount(arr, minlength=N_BINS).astype(np.int64)
    return ByteHistogram(counts=counts, total=int(arr.size))


def normalize(hist: ByteHistogram) -> ByteDistribution:
    """Turn counts into probabilities. Raises EmptyInputError on an empty histogram."""
    if hist.total == 0:
        raise EmptyInputError("cannot normalize an empty histogram")
    return ByteDistribution(probs=hist.counts / hist.total)


def uniform() -> ByteDistribution:
    """The uniform reference distribution (ideal ciphertext)."""
    return ByteDistribution(probs=np.full(N_BINS, 1.0 / N_BINS))


def entropy_bits(dist: ByteDistribution) -> float:
    """Shannon entropy in bits per byte; 0 for one-hot, 8 for uniform."""
    p = dist.probs
    nz = p[p > 0]
    return float(-(nz * np.log2(nz)).sum())


def variance(dist: ByteDistribution) -> float:
    """Population variance of the 256 bin probabilities (0 iff uniform)."""
    p = dist.probs
    return float(np.mean((p - p.mean()) ** 2))


def skewness(dist: ByteDistribution) -> float:
    """Population Fisher-Pearson skewness of the 256 bin probabilities.

    Defined as 0 when the second moment vanishes (i.e. the uniform
    distribution), where the usual ratio is singular.
    """
    p = dist.probs
    d = p - p.mean()
    m2 = float(np.mean(d**2))
    if m2 == 0.0:
        return 0.0
    m3 = float(np.mean(d**3))
    return m3 / m2**1.5


def kl_divergence_bits(p: ByteDistribution, q: ByteDistribution, smoothing: float = 0.0) -> float:
    """KL divergence D(p || q') in bits, where q' is q with `smoothing`
    pseudo-mass added per bin and renormalized.

    With smoothing == 0 this is the exact divergence and requires
    support(p) contained in support(q); a violation raises
    SupportMismatchError. For count-space Laplace smoothing against a raw
    histogram reference, see kl_to_reference_bits.
    """
    if smoothing < 0:
        raise ValueError("smoothing must be >= 0")
    pp = p.probs
    qq = q.probs
    if smoothing == 0.0:
        if np.any((pp > 0) & (qq == 0)):
            raise SupportMismatchError("p has mass where q is zero; use smoothing > 0")
        qs = qq
    else:
        qs = (qq + smoothing) / (1.0 + N_BINS * smoothing)
    mask = pp > 0
    return float((pp[mask] * np.log2(pp[mask] / qs[mask])).sum())


def kl_to_reference_bits(p: ByteDistribution, ref: ByteHistogram, pseudo_count: float = 1.0) -> float:
    """KL divergence of p against a count histogram reference, in bits.

    The reference is Laplace-smoothed in count space,
    q'[b] = (counts[b] + pseudo_count) / (total + 256 * pseudo_count),
    so distance-to-plaintext stays well defined once encryption fills bins
    the plaintext never used.
    """
    if pseudo_count <= 0 and ref.total == 0:
        raise EmptyInputError("reference histogram is empty and unsmoothed")
    q = (ref.counts + pseudo_count) / (ref.total + N_BINS * pseudo_count)
    pp = p.probs
    mask = pp > 0
    if pseudo_count == 0 and np.any(mask & (q == 0)):
        raise SupportMismatchError("p has mass where the reference is zero")
    return float((pp[mask] * np.log2(pp[mask] / q[mask])).sum())


def l2_distance(p: ByteDistribution, q: ByteDistribution) -> float:
    """Euclidean distance between two distributions."""
    return float(np.sqrt(((p.probs - q.probs) ** 2).sum()))


def total_variation(p: ByteDistribution, q: ByteDistribution) -> float:
    """Total variation distance, 0.5 * sum |p - q|, in [0, 1]."""
    return float(0.5 * np.abs(p.probs - q.probs).sum())


def quantile_band(values: Union[Sequence[float], Iterable[float]]) -> QuantileBand:
    """Linear-interpolation quantiles at 0.10/0.25/0.50/0.75/0.90."""
    arr = np.asarray(values if isinstance(values, np.ndarray) else list(values), dtype=np.float64)
    if arr.size == 0:
        raise EmptyInputError("quantile_band needs at least one value")
    q = np.quantile(arr, [0.10, 0.25, 0.50, 0.75, 0.90], method="linear")
    return QuantileBand(*(float(x) for x in q))


def stat_vector(dist: ByteDistribution, ref: ByteHistogram, kl_pseudo_count: float = 1.0) -> StatVector:
    """Bundle every scalar trait of `dist` measured against a plaintext reference."""
    ref_dist = normalize(ref)
    return StatVector(
        entropy_bits=entropy_bits(dist),
        variance=variance(dist),
        skewness=skewness(dist),
        l2_to_ref=l2_distance(dist, ref_dist),
        kl_to_ref_bits=kl_to_reference_bits(dist, ref, pseudo_count=kl_pseudo_count),
        tv_to_ref=total_variation(dist, ref_dist),
    )
