# %% [markdown]
# # Byte-trait atlas across encryption coverage
#
# How do entropy, variance, and skewness of the byte histogram evolve as an
# increasing fraction of a file is encrypted? We generate a small synthetic
# corpus from two archetypes that bracket the spectrum (a structured,
# spreadsheet-like format and a precompressed, video-like one), encrypt each
# file at every coverage on a grid, and summarize each trait with quantile
# bands plus a nonparametric trend certificate.

# %%
import numpy as np

from cipherscope.atlas import compute_atlas
from cipherscope.corpus import PRECOMPRESSED, STRUCTURED, generate_archetype_bytes

rng = np.random.default_rng(7)
corpus = []
for archetype in (STRUCTURED, PRECOMPRESSED):
    for _ in range(12):
        size = int(rng.integers(200_000, 300_000))
        corpus.append((archetype, generate_archetype_bytes(archetype, size, rng)))

grid = tuple(round(0.1 * i, 1) for i in range(11))
result = compute_atlas(corpus, grid, seed=7)

# %% [markdown]
# The median entropy of the structured family climbs steeply toward the
# 8-bit ceiling while the precompressed family barely moves; variance shows
# the mirror image. The quantile bands quantify how spread shrinks as every
# file converges on uniform ciphertext.

# %%
for family in (STRUCTURED, PRECOMPRESSED):
    print(f"\n=== {family} ===")
    print("alpha   entropy(q25/q50/q75)        variance(q50)")
    for alpha in grid:
        ent = next(b for f, a, m, b in result.bands
                   if f == family and a == alpha and m == "entropy")
        var = next(b for f, a, m, b in result.bands
                   if f == family and a == alpha and m == "variance")
        print(f"{alpha:4.1f}   {ent.q25:5.3f} / {ent.q50:5.3f} / {ent.q75:5.3f}"
              f"        {var.q50:.3e}")

# %% [markdown]
# Mann-Kendall p-values and Sen's slopes certify the directions: entropy
# increasing, variance decreasing, at wildly different rates per family.
# The slope units are "per 0.1 coverage", so a structured slope near +0.5
# bits dwarfs the precompressed family's few millibits.

# %%
print("\nfamily          metric    series   slope[95% CI]              MK p")
for t in result.trends:
    if t.metric in ("entropy", "variance") and t.series == "median":
        print(f"{t.family:15s} {t.metric:9s} {t.series:8s} "
              f"{t.slope.slope:+.4g} [{t.slope.ci_low:+.4g}, {t.slope.ci_high:+.4g}]"
              f"   {t.test.p_value:.3g} ({t.test.alternative})")
