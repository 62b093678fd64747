"""Seeding helpers.

A single integer seed is expanded into independent named substreams so that
adding a stage to a pipeline never shifts the randomness of the others.
"""

from __future__ import annotations

import zlib

import numpy as np


def substream(seed: int, name: str) -> np.random.Generator:
    key = zlib.crc32(name.encode("utf-8"))
    ss = np.random.SeedSequence(entropy=int(seed) & (2**64 - 1), spawn_key=(key,))
    return np.random.Generator(np.random.PCG64(ss))


def as_generator(rng=None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def child(rng: np.random.Generator, name: str) -> np.random.Generator:
    """Derive a named child stream from an existing generator.

    Draws one 64-bit word from ``rng``; used where a function needs several
    independent streams but only received one.
    """
    return substream(int(rng.integers(0, 2**63)), name)


class Streams:
    """Named random streams derived from one base seed.

    ``streams("sample")`` always yields the same generator for the same base
    seed, independent of which other names were requested before it.
    """

    def __init__(self, seed=None):
        if isinstance(seed, Streams):
            seed = seed.seed
        elif isinstance(seed, np.random.Generator):
            seed = int(seed.integers(0, 2**63))
        elif seed is None:
            seed = int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
        self.seed = int(seed)

    def __call__(self, name: str) -> np.random.Generator:
        return substream(self.seed, name)

    def sub(self, name: str) -> "Streams":
        return Streams(int(self(name).integers(0, 2**63)))
