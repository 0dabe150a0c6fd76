"""Counter-based random streams for reproducible parallel Monte Carlo.

Every estimator splits its work into fixed-size streams.  Stream i of an
estimator tagged ``tag`` under experiment seed ``seed`` is generated by a
Philox counter-based generator keyed by ``(mix(seed, tag), i)``.  Results are
reduced in stream order, so they depend only on (seed, tag, stream layout),
never on scheduling or worker count.
"""

from __future__ import annotations

import numpy as np

STREAM_CHUNK = 1 << 18  # paths per stream

_MASK = (1 << 64) - 1


def _splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def mix_key(seed: int, tag: str, *indices: int) -> int:
    """Derive a 64-bit stream family key from the experiment seed, an
    operation tag, and any extra indices (node number, epsilon slot, ...)."""
    key = _splitmix64(seed & _MASK)
    for ch in tag.encode("utf-8"):
        key = _splitmix64(key ^ ch)
    for ix in indices:
        key = _splitmix64(key ^ (ix & _MASK))
    return key


def stream_generator(family_key: int, stream_index: int) -> np.random.Generator:
    """Philox generator for one stream: key = (family_key, stream_index)."""
    key = np.array([family_key, stream_index], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def stream_sizes(n_total: int, chunk: int = STREAM_CHUNK) -> list[int]:
    """Fixed partition of n_total paths into streams (independent of workers)."""
    if n_total <= 0:
        return []
    full, rest = divmod(n_total, chunk)
    return [chunk] * full + ([rest] if rest else [])
