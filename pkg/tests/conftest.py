import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oudesign.model import Design

# the three benchmark (label, lam, omega) parameter sets
BENCH_SETS = [("2017", 2.4522, -4.1274), ("2016", 4.9968, -0.3561), ("2015", 4.9366, -5.7767)]


def random_design(rng, n, min_gap=0.02):
    """Random valid design with pinned endpoints and comfortable gaps."""
    while True:
        pts = np.sort(rng.uniform(0.0, 1.0, n - 2))
        t = np.concatenate(([0.0], pts, [1.0]))
        if n == 2 or np.min(np.diff(t)) >= min_gap:
            return Design(t)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
