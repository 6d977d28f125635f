import math

import numpy as np
import pytest

from cipherscope.bytestats import (
    ByteDistribution,
    ByteHistogram,
    entropy_bits,
    histogram,
    kl_divergence_bits,
    kl_to_reference_bits,
    l2_distance,
    normalize,
    quantile_band,
    skewness,
    stat_vector,
    total_variation,
    uniform,
    variance,
)
from cipherscope.errors import EmptyInputError, SupportMismatchError
from conftest import one_hot, random_distribution, two_bins


def test_histogram_empty():
    h = histogram(b"")
    assert h.total == 0
    assert h.counts.sum() == 0


def test_histogram_one_hot():
    h = histogram(b"\x41" * 1000)
    assert h.counts[0x41] == 1000
    assert h.counts.sum() == 1000


def test_histogram_direct_count():
    h = histogram(bytes([0, 1, 1, 2]))
    assert h.counts[0] == 1 and h.counts[1] == 2 and h.counts[2] == 1
    assert h.total == 4


def test_histogram_invariants_enforced():
    with pytest.raises(ValueError):
        ByteHistogram(counts=np.zeros(255, dtype=np.int64), total=0)
    with pytest.raises(ValueError):
        ByteHistogram(counts=np.ones(256, dtype=np.int64), total=5)


def test_normalize():
    h = histogram(b"\x00" * 7)
    d = normalize(h)
    assert d.probs[0] == 1.0
    uniform_counts = ByteHistogram(counts=np.full(256, 4, dtype=np.int64), total=1024)
    assert np.allclose(normalize(uniform_counts).probs, 1 / 256)
    mixed = histogram(bytes([0, 0, 0, 1]))
    assert normalize(mixed).probs[0] == 0.75
    assert normalize(mixed).probs[1] == 0.25


def test_normalize_empty_raises():
    with pytest.raises(EmptyInputError):
        normalize(histogram(b""))


def test_entropy_endpoints():
    assert entropy_bits(uniform()) == pytest.approx(8.0, abs=1e-12)
    assert entropy_bits(one_hot()) == 0.0
    assert entropy_bits(two_bins()) == pytest.approx(1.0, abs=1e-12)


def test_variance_fixtures():
    assert variance(uniform()) == 0.0
    # one-hot: direct moment computation over 256 values = 255/65536
    assert variance(one_hot()) == pytest.approx(255 / 65536, abs=1e-15)
    # two bins at 0.5: 127/65536
    assert variance(two_bins()) == pytest.approx(127 / 65536, abs=1e-15)


def test_skewness_fixtures():
    assert skewness(uniform()) == 0.0  # m2 == 0 convention
    # indicator closed form (1-2p)/sqrt(p(1-p)), p = 1/256
    p = 1 / 256
    assert skewness(one_hot()) == pytest.approx((1 - 2 * p) / math.sqrt(p * (1 - p)), rel=1e-12)
    assert skewness(one_hot()) == pytest.approx(15.9060969936, abs=1e-9)
    # bin positions do not matter: the statistic is over the probability
    # vector, so any two-bin 0.5/0.5 distribution has the same skewness
    assert skewness(two_bins(0, 255)) == pytest.approx(skewness(two_bins(3, 17)), abs=1e-12)
    assert skewness(two_bins()) == pytest.approx(11.1806920186, abs=1e-9)


def test_kl_fixtures():
    assert kl_divergence_bits(uniform(), uniform()) == pytest.approx(0.0, abs=1e-12)
    assert kl_divergence_bits(one_hot(), uniform()) == pytest.approx(8.0, abs=1e-12)
    # mixture of one-hot at alpha=0.5 vs uniform: direct 256-term summation
    mix = ByteDistribution(probs=0.5 / 256 + 0.5 * one_hot().probs)
    assert kl_divergence_bits(mix, uniform()) == pytest.approx(3.0184482600446, abs=1e-10)


def test_kl_support_mismatch():
    with pytest.raises(SupportMismatchError):
        kl_divergence_bits(uniform(), one_hot(), smoothing=0.0)
    # smoothing makes it finite
    assert kl_divergence_bits(uniform(), one_hot(), smoothing=1e-6) > 0


def test_kl_to_reference_count_smoothing():
    ref = histogram(b"ab" * 500)
    d = normalize(histogram(b"abc" * 300))
    val = kl_to_reference_bits(d, ref, pseudo_count=1.0)
    assert math.isfinite(val) and val > 0
    # one pseudo-count per bin vanishes against a large reference
    big_ref = histogram(b"ab" * 500_000)
    self_val = kl_to_reference_bits(normalize(big_ref), big_ref, pseudo_count=1.0)
    assert self_val == pytest.approx(0.0, abs=1e-3)


def test_l2_fixtures():
    assert l2_distance(uniform(), uniform()) == 0.0
    assert l2_distance(one_hot(), uniform()) == pytest.approx(math.sqrt(255 / 256), rel=1e-12)


def test_tv_fixtures():
    assert total_variation(uniform(), uniform()) == 0.0
    assert total_variation(one_hot(), uniform()) == pytest.approx(255 / 256, rel=1e-12)
    assert total_variation(one_hot(0), one_hot(1)) == pytest.approx(1.0, abs=1e-12)


def test_distance_symmetry_and_triangle(rng):
    for _ in range(50):
        p = random_distribution(rng)
        q = random_distribution(rng, 0.3)
        r = random_distribution(rng, 3.0)
        assert l2_distance(p, q) == pytest.approx(l2_distance(q, p), rel=1e-12)
        assert total_variation(p, q) == pytest.approx(total_variation(q, p), rel=1e-12)
        assert l2_distance(p, r) <= l2_distance(p, q) + l2_distance(q, r) + 1e-12
        assert total_variation(p, r) <= total_variation(p, q) + total_variation(q, r) + 1e-12


def test_kl_nonnegative_and_zero_iff_equal(rng):
    for _ in range(100):
        p = random_distribution(rng)
        q = random_distribution(rng)
        assert kl_divergence_bits(p, q, smoothing=0.0) >= 0.0
        assert kl_divergence_bits(p, p, smoothing=0.0) == pytest.approx(0.0, abs=1e-12)
        assert kl_divergence_bits(p, q, smoothing=0.0) > 1e-6  # distinct draws differ


def test_pinsker_consistency(rng):
    # kl >= (2/ln2) * tv^2: small KL forces every histogram distance small
    for _ in range(100):
        p = random_distribution(rng)
        q = random_distribution(rng)
        kl = kl_divergence_bits(p, q, smoothing=0.0)
        tv = total_variation(p, q)
        assert kl >= (2.0 / math.log(2.0)) * tv * tv - 1e-12


def test_entropy_bounds_and_uniformity(rng):
    for _ in range(100):
        d = random_distribution(rng)
        h = entropy_bits(d)
        assert 0.0 <= h <= 8.0
        assert variance(d) > 0  # only uniform has zero variance
    assert entropy_bits(uniform()) == pytest.approx(8.0, abs=1e-12)


def test_pipeline_order_independence(rng):
    data = rng.integers(0, 256, size=4096).astype(np.uint8).tobytes()
    shuffled = np.frombuffer(data, dtype=np.uint8).copy()
    rng.shuffle(shuffled)
    d1 = normalize(histogram(data))
    d2 = normalize(histogram(shuffled.tobytes()))
    assert d1 == d2
    assert entropy_bits(d1) == entropy_bits(d2)
    assert skewness(d1) == skewness(d2)


def test_quantile_band():
    band = quantile_band([5, 5, 5])
    assert (band.q10, band.q50, band.q90) == (5, 5, 5)
    band = quantile_band(list(range(1, 101)))
    assert band.q50 == pytest.approx(50.5)  # brute-force sort + interpolation
    assert band.q25 == pytest.approx(25.75)
    band = quantile_band([7])
    assert band.q10 == band.q90 == 7
    with pytest.raises(EmptyInputError):
        quantile_band([])


def test_stat_vector_bundles_all_traits():
    ref = histogram(b"hello world" * 20_000)
    sv = stat_vector(normalize(ref), ref)
    assert sv.l2_to_ref == 0.0
    assert sv.tv_to_ref == 0.0
    assert sv.kl_to_ref_bits == pytest.approx(0.0, abs=1e-2)
    assert 0 <= sv.entropy_bits <= 8
