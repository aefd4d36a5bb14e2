"""
Seeded Random Streams
Independent, reproducible random streams for the simulator.

Each simulated user owns its own streams spawned from one root seed, so a
run is fully determined by its seed and two configurations that differ only
in scale, channel rates or size distribution consume the same underlying
random numbers.
"""

import hashlib
from typing import List, Union

import numpy as np

from src.constants import RANDOM_BLOCK_SIZE


class RandomStream:
    """Buffered wrapper over a numpy PCG64 generator."""

    def __init__(self, seed_sequence: np.random.SeedSequence, block_size: int = RANDOM_BLOCK_SIZE):
        self._seed_sequence = seed_sequence
        self._rng = np.random.Generator(np.random.PCG64(seed_sequence))
        self._block_size = block_size
        self._exp_block = np.empty(0)
        self._exp_pos = 0
        self._uni_block = np.empty(0)
        self._uni_pos = 0

    @classmethod
    def from_seed(cls, seed: int) -> "RandomStream":
        return cls(np.random.SeedSequence(seed))

    @property
    def generator(self) -> np.random.Generator:
        return self._rng

    def exponential(self) -> float:
        """Unit-mean exponential variate."""
        if self._exp_pos >= len(self._exp_block):
            self._exp_block = self._rng.standard_exponential(self._block_size)
            self._exp_pos = 0
        value = self._exp_block[self._exp_pos]
        self._exp_pos += 1
        return float(value)

    def uniform(self) -> float:
        """Uniform variate on [0, 1)."""
        if self._uni_pos >= len(self._uni_block):
            self._uni_block = self._rng.random(self._block_size)
            self._uni_pos = 0
        value = self._uni_block[self._uni_pos]
        self._uni_pos += 1
        return float(value)

    def spawn(self, n: int) -> List["RandomStream"]:
        """Child streams statistically independent of this one and of each other."""
        return [RandomStream(child, self._block_size) for child in self._seed_sequence.spawn(n)]


def spawn_streams(seed: int, n: int) -> List[RandomStream]:
    """
    Derive ``n`` independent streams from one root seed.

    The i-th stream depends only on (seed, i), so adding users at the end of a
    configuration leaves the streams of existing users unchanged.
    """
    root = np.random.SeedSequence(seed)
    return [RandomStream(child) for child in root.spawn(n)]


def _key_to_int(key: Union[int, float, str]) -> int:
    if isinstance(key, (int, np.integer)) and not isinstance(key, bool):
        return int(key) & 0xFFFFFFFFFFFFFFFF
    digest = hashlib.sha256(repr(key).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def derive_seed(base_seed: int, *keys: Union[int, float, str]) -> int:
    """
    Deterministic 63-bit seed for a sub-run (a sweep point, a replica).

    Args:
        base_seed: Seed of the parent run
        *keys: Identifiers of the sub-run, e.g. (point_index, replica)

    Returns:
        Non-negative integer seed
    """
    entropy = [_key_to_int(base_seed)] + [_key_to_int(k) for k in keys]
    state = np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0]
    return int(state) >> 1
