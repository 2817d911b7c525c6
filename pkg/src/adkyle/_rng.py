"""Counter-based random number plumbing.

Every stochastic routine in the package draws from Philox streams keyed by
(seed, block_id).  Blocks are generated in a fixed order and merged with
pairwise summation, so results are bitwise reproducible and independent of
any worker scheduling.
"""

from __future__ import annotations

import numpy as np

BLOCK_SIZE = 65536


def block_generator(seed: int, block_id: int) -> np.random.Generator:
    """Independent generator for one sample block of a master stream."""
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(block_id)])
    return np.random.Generator(np.random.Philox(key=key))


def block_sizes(n: int, block_size: int = BLOCK_SIZE) -> list[int]:
    """Split n draws into fixed-order block lengths."""
    full, rest = divmod(n, block_size)
    return [block_size] * full + ([rest] if rest else [])


def standard_normal_matrix(seed: int, n: int, dim: int) -> np.ndarray:
    """(n, dim) standard normals assembled from counter-based blocks.

    The block structure (not just the seed) is part of the reproducibility
    contract: the same (seed, n, dim) always yields the same matrix, and
    any prefix of blocks is unaffected by how many blocks follow.
    """
    parts = []
    for block_id, m in enumerate(block_sizes(n)):
        parts.append(block_generator(seed, block_id).standard_normal((m, dim)))
    return np.concatenate(parts, axis=0) if len(parts) > 1 else parts[0]


def derive_seed(master: int, *tags: int) -> int:
    """Stable 64-bit sub-seed for a tagged child stream (e.g. one sweep entry)."""
    ss = np.random.SeedSequence(entropy=master, spawn_key=tuple(int(t) for t in tags))
    return int(ss.generate_state(1, np.uint64)[0])
