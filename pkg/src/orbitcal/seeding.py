"""Deterministic named randomness streams.

All randomness flows from one global seed.  Each consumer derives its own
stream from (global_seed, stream id, indices...) through numpy's
SeedSequence, which is a splittable counter-based hash: streams are
independent, order-free, and reproducible from the manifest alone.
"""

from __future__ import annotations

import numpy as np

STREAM_IDS = {
    "sequence": 1,
    "detuning": 2,
    "optimizer": 3,
    "shots": 4,
    "meta": 5,
    "rating": 6,
}


def stream_seed(global_seed: int, stream: str, *indices: int) -> np.random.SeedSequence:
    try:
        sid = STREAM_IDS[stream]
    except KeyError:
        raise ValueError(f"unknown stream {stream!r}") from None
    return np.random.SeedSequence((int(global_seed), sid) + tuple(int(i) for i in indices))


def stream_rng(global_seed: int, stream: str, *indices: int) -> np.random.Generator:
    return np.random.default_rng(stream_seed(global_seed, stream, *indices))


def stream_int(global_seed: int, stream: str, *indices: int) -> int:
    """A single derived 63-bit integer seed (for configs storing plain ints)."""
    return int(stream_seed(global_seed, stream, *indices).generate_state(1, np.uint64)[0] >> 1)
