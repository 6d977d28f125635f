import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # for oracle helpers

from cipherscope.bytestats import ByteDistribution, N_BINS


@pytest.fixture
def rng():
    return np.random.default_rng(20260809)


def random_distribution(rng, concentration=1.0):
    """Random 256-bin distribution via a symmetric Dirichlet draw."""
    return ByteDistribution(probs=rng.dirichlet(np.full(N_BINS, concentration)))


def one_hot(bin_index=0):
    probs = np.zeros(N_BINS)
    probs[bin_index] = 1.0
    return ByteDistribution(probs=probs)


def two_bins(b1=0, b2=255):
    probs = np.zeros(N_BINS)
    probs[b1] = 0.5
    probs[b2] = 0.5
    return ByteDistribution(probs=probs)
