"""Deterministic seed derivation for nested stochastic stages.

Every stochastic stage (anneal call, tie-break draw, instance generation)
derives its own seed from a master seed plus an integer path, so runs are
reproducible regardless of which stages actually execute.
"""

from __future__ import annotations

import numpy as np

# Purpose tags namespacing the derivation paths.
ANNEAL = 0
TIE_BREAK = 1
NOISE = 2
INSTANCE = 3
CELL = 4


def derived_seed(base: int, *path: int) -> int:
    """Stable 32-bit seed for the stage identified by ``path`` under ``base``."""
    ss = np.random.SeedSequence(entropy=int(base), spawn_key=tuple(int(p) for p in path))
    return int(ss.generate_state(1)[0])
