"""cipherscope: measurement, modeling, and detection for intermittently
encrypted files.

Submodules:

* bytestats  - byte histograms, scalar traits, distribution distances
* trend      - Mann-Kendall test and Sen's slope estimator
* mixture    - mixture model, escape trajectory, detectability ceilings
* cryptosim  - intermittent-encryption planning and AES-128-GCM transform
* histimage  - 16x16 histogram-image encoding and graymap interchange
* detection  - chunk-level detection pipeline and threshold calibration
* corpus     - corpus scanning, synthetic corpora, manifests, result tables
* atlas      - coverage atlas orchestration (quantile bands + trend report)
* cli        - command-line front end
"""

from . import atlas, bytestats, cli, corpus, cryptosim, detection, errors, histimage, mixture, trend

__version__ = "0.1.0"

__all__ = [
    "atlas",
    "bytestats",
    "cli",
    "corpus",
    "cryptosim",
    "detection",
    "errors",
    "histimage",
    "mixture",
    "trend",
    "__version__",
]
