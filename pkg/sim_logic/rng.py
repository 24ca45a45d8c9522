"""
Keyed random streams - every consumer gets its own PCG64 stream derived from the run seed
"""

from enum import IntEnum

import numpy as np


class Purpose(IntEnum):
    """What a stream is used for; part of the key"""
    INIT = 0    # generation-0 genomes
    BREED = 1   # per-child crossover mask and mutation


def stream(seed: int, purpose: Purpose, generation: int, index: int) -> np.random.Generator:
    """Independent generator keyed by (seed, purpose, generation, index)"""
    key = np.random.SeedSequence([int(seed), int(purpose), int(generation), int(index)])
    return np.random.Generator(np.random.PCG64(key))
