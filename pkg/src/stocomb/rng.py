"""Seeded random streams.

One global seed is split into independent per-component streams by fixed
string labels, so adding a new randomized check never perturbs the draws
seen by an existing one.
"""

from __future__ import annotations

import numpy as np


def stream(seed: int, label: str = "") -> np.random.Generator:
    """Return a generator derived from ``seed`` and an isolating label."""
    if seed < 0:
        raise ValueError("seed must be non-negative")
    entropy = [seed] + list(label.encode("utf-8"))
    return np.random.default_rng(np.random.SeedSequence(entropy))
