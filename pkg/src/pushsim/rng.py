"""Seeded counter-based random streams.

All randomness in the simulator is drawn from Philox 4x64 generators keyed
by (seed, purpose tag). Each purpose gets an independent substream, so e.g.
scene layout never depends on how much actuation noise a controller consumed.
"""

import numpy as np

# Purpose tags. New tags may be appended; existing values must never change
# or previously recorded trajectories stop being reproducible.
STREAM_SCENE = 1
STREAM_NOISE = 2
STREAM_CONTACT = 3


def make_stream(seed: int, purpose: int, salt: int | None = None) -> np.random.Generator:
    """Return the deterministic generator for (seed, purpose).

    `salt` opens a further substream under the same purpose (used for layout
    retry attempts); None and 0 are distinct streams by construction.
    """
    if seed < 0:
        raise ValueError(f"seed must be >= 0, got {seed}")
    key = (int(purpose),) if salt is None else (int(purpose), int(salt))
    seq = np.random.SeedSequence(entropy=int(seed), spawn_key=key)
    return np.random.Generator(np.random.Philox(seq))
