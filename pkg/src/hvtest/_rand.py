"""Counter-based random generators shared across modules.

Philox keeps independent streams cheap: a (seed, stream) pair fully
determines the output, so parallel or chunked sampling stays reproducible
no matter how work is split.
"""

import numpy as np


def philox_rng(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[int(seed), int(stream)]))
