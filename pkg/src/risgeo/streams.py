"""Counter-based random substreams for reproducible parallel simulation.

Each (master_seed, index) pair keys an independent Philox stream, so any
partition of work into indexed blocks yields the same draws regardless of
scheduling or worker count.
"""

from __future__ import annotations

import numpy as np

_MASK64 = (1 << 64) - 1


def substream(master_seed: int, index: int) -> np.random.Generator:
    """Independent generator for block `index` of the run keyed by `master_seed`."""
    key = np.array([master_seed & _MASK64, index & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
