"""Reproducible random streams.

A stream is identified by ``(master_seed, stream_id)``. Streams are Philox
counter-based generators keyed through ``SeedSequence([master_seed, stream_id])``,
so chunk ``i`` of a Monte Carlo run draws the same numbers no matter which
worker executes it or how many workers there are.
"""

from dataclasses import dataclass

import numpy as np

SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class RngContract:
    master_seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        if not (0 <= self.master_seed <= SEED_MASK):
            raise ValueError("master_seed must be a 64-bit unsigned integer")
        if self.stream_id < 0:
            raise ValueError("stream_id must be nonnegative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence([self.master_seed, self.stream_id])
        return np.random.Generator(np.random.Philox(ss))

    def substream(self, i: int) -> "RngContract":
        """Stream ``i`` below this one; distinct from every other ``(seed, id)`` pair used here."""
        ss = np.random.SeedSequence([self.master_seed, self.stream_id, i])
        return RngContract(int(ss.generate_state(1, np.uint64)[0]), 0)


def as_contract(rng) -> RngContract:
    if isinstance(rng, RngContract):
        return rng
    if rng is None:
        return RngContract()
    return RngContract(int(rng))
