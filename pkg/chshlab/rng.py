"""
Seed and stream derivation.

A stream is identified by (seed, label). The label is hashed with CRC-32 and combined with
the seed in a numpy SeedSequence; the generator is PCG64. Runs that use the same labels
reproduce bit-for-bit.
"""

import zlib
from typing import List

import numpy as np


def label_key(label: str) -> int:
    return zlib.crc32(label.encode("utf-8"))


def stream(seed: int, label: str) -> np.random.Generator:
    """Generator for one named stream."""
    sequence = np.random.SeedSequence([int(seed) & 0xFFFFFFFF, label_key(label)])
    return np.random.Generator(np.random.PCG64(sequence))


def spawn(seed: int, label: str, count: int) -> List[np.random.Generator]:
    """Independent per-trial streams, labelled '<label>/<index>'."""
    return [stream(seed, f"{label}/{i}") for i in range(count)]
