import numpy as np
import pytest

from cipherscope.atlas import (
    IQR_SERIES,
    MEDIAN_SERIES,
    METRICS,
    compute_atlas,
    emit_trend_table,
    file_metrics_at_alpha,
)
from cipherscope.corpus import generate_archetype_bytes
from cipherscope.cryptosim import derive_key_nonce
from cipherscope.errors import EmptyCorpusError


def _tiny_corpus(rng, n=4, size=30_000):
    return [("txt", generate_archetype_bytes("text", size, rng)) for _ in range(n)]


def test_atlas_shapes(rng):
    grid = (0.0, 0.5, 1.0)
    result = compute_atlas(_tiny_corpus(rng), grid, seed=1)
    assert result.alpha_grid == grid
    assert len(result.bands) == len(grid) * len(METRICS)
    assert len(result.trends) == 2 * len(METRICS)  # median + iqr per metric
    series = result.series["entropy"]["txt"]
    assert len(series[MEDIAN_SERIES]) == len(grid)
    assert len(series[IQR_SERIES]) == len(grid)


def test_atlas_deterministic(rng):
    corpus = _tiny_corpus(rng)
    a = compute_atlas(corpus, (0.0, 0.5, 1.0), seed=9)
    b = compute_atlas(corpus, (0.0, 0.5, 1.0), seed=9)
    assert a.bands == b.bands
    assert a.trends == b.trends


def test_atlas_entropy_rises_variance_falls(rng):
    result = compute_atlas(_tiny_corpus(rng, n=6), tuple(np.linspace(0, 1, 11)), seed=2)
    ent = result.series["entropy"]["txt"][MEDIAN_SERIES]
    var = result.series["variance"]["txt"][MEDIAN_SERIES]
    assert ent[0] < 6.0 and ent[-1] > 7.99
    assert all(a < b for a, b in zip(ent, ent[1:]))
    assert all(a > b for a, b in zip(var, var[1:]))


def test_atlas_distances_start_at_zero(rng):
    result = compute_atlas(_tiny_corpus(rng, n=3), (0.0, 0.5, 1.0), seed=3)
    for metric in ("l2", "tv"):
        assert result.series[metric]["txt"][MEDIAN_SERIES][0] == 0.0
        assert result.series[metric]["txt"][MEDIAN_SERIES][-1] > 0.1


def test_atlas_requires_corpus_and_grid(rng):
    with pytest.raises(EmptyCorpusError):
        compute_atlas([], (0.0, 0.5, 1.0))
    with pytest.raises(ValueError):
        compute_atlas(_tiny_corpus(rng, n=1), (0.0, 1.0))


def test_file_metrics_keys(rng):
    data = generate_archetype_bytes("text", 20_000, rng)
    measured = file_metrics_at_alpha(data, 0.5, *derive_key_nonce(0, 0))
    assert set(measured) == set(METRICS)


def test_trend_table_format(tmp_path, rng):
    result = compute_atlas(_tiny_corpus(rng, n=3), (0.0, 0.25, 0.5, 0.75, 1.0), seed=4)
    path = tmp_path / "trends.csv"
    emit_trend_table(result.trends, path)
    lines = path.read_text().splitlines()
    assert lines[1] == "family,metric,series,alternative,sen_slope,ci_low,ci_high,mk_p"
    assert len(lines) == 2 + len(result.trends)
    assert any(ln.startswith("txt,entropy,median,increasing,") for ln in lines)
    assert any(ln.startswith("txt,variance,median,decreasing,") for ln in lines)
