"""Named, splittable random streams.

Every stream is a PCG64 generator seeded by
``SeedSequence([master_seed, network_id, purpose, index])``. The purpose tag
keeps streams apart: SeedSequence zero-pads short entropy, so
``[s, k]`` and ``[s, k, 0]`` would otherwise collide.
"""

import numpy as np

TOPOLOGY = 0       # degree sequence + stub matching of network k
SUBSCRIPTIONS = 1  # uniforms thresholded by sigma for network k
EVENTS = 2         # publisher choice + gossip draws for event i of network k

ALGORITHM = "PCG64"


def stream(master_seed: int, network_id: int, purpose: int, index: int = 0) -> np.random.Generator:
    if master_seed < 0:
        raise ValueError("master_seed must be nonnegative")
    ss = np.random.SeedSequence([int(master_seed), int(network_id), int(purpose), int(index)])
    return np.random.Generator(np.random.PCG64(ss))
