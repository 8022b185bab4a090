"""Bitstring primitives and the seeded randomness contract.

Bitstrings are 1-d numpy ``uint8`` arrays holding 0/1 values; all operators
treat their inputs as immutable and return fresh arrays.  Randomness flows
through ``numpy.random.Generator`` objects (PCG64 via ``default_rng``).
Reproducibility contract: the same seed replays the same call-for-call
output sequence bit-exactly, and child seeds derived with ``derive_seed``
are statistically independent across distinct derivation paths.
"""

from __future__ import annotations

from typing import Iterable, Union

import numpy as np

# 1-d uint8 array of 0/1 values; length fixed at construction.
BitString = np.ndarray


def bits(values: Union[str, Iterable[int]]) -> BitString:
    """Build a bitstring from an iterable of 0/1 or a '0101'-style string."""
    if isinstance(values, str):
        values = [int(c) for c in values]
    arr = np.asarray(list(values))
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("bitstring must be a non-empty 1-d sequence")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError("bitstring values must be 0 or 1")
    return arr.astype(np.uint8)


def all_ones(n: int) -> BitString:
    return np.ones(n, dtype=np.uint8)


def all_zeros(n: int) -> BitString:
    return np.zeros(n, dtype=np.uint8)


def derive_seed(master_seed: int, *path: int) -> int:
    """64-bit seed of the child stream at ``path`` under ``master_seed``.

    Distinct (master_seed, path) tuples yield independent streams.  The
    returned integer alone reproduces the child via ``stream(seed)``, which
    is what run records store.
    """
    ss = np.random.SeedSequence(master_seed, spawn_key=tuple(path))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def stream(seed: int) -> np.random.Generator:
    """Seeded PCG64 generator: identical seed, identical output sequence."""
    return np.random.default_rng(seed)


def substream(master_seed: int, *path: int) -> np.random.Generator:
    """Independent, individually replayable generator for one run."""
    return stream(derive_seed(master_seed, *path))


def uniform_random(n: int, rng: np.random.Generator) -> BitString:
    """Uniform random bitstring: each bit independently 1 with probability 1/2."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return (rng.random(n) < 0.5).astype(np.uint8)


def mutate(parent: BitString, rng: np.random.Generator) -> BitString:
    """Standard bit-wise mutation: flip each bit independently with probability 1/n."""
    n = parent.shape[0]
    flips = rng.random(n) < 1.0 / n
    return np.bitwise_xor(parent, flips.astype(np.uint8))


def mutate_batch(parent: BitString, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` independent mutants of ``parent``, stacked as a (count, n) array.

    One generator call for the whole batch; equivalent in distribution to
    ``count`` calls of :func:`mutate`.
    """
    n = parent.shape[0]
    flips = rng.random((count, n)) < 1.0 / n
    return np.bitwise_xor(parent, flips.astype(np.uint8))


def ones_count(x: BitString) -> int:
    return int(x.sum())


def hamming(a: BitString, b: BitString) -> int:
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return int(np.count_nonzero(a != b))
