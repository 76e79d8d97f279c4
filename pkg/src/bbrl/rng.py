"""Seed handling: one run seed fans out into named, order-independent substreams."""

from __future__ import annotations

import numpy as np

# Fixed fan-out order; appending new names keeps existing streams stable.
STREAM_NAMES = ("init", "env", "explore", "batch", "bandit", "eval")


def split_streams(seed: int, names: tuple[str, ...] = STREAM_NAMES) -> dict[str, np.random.Generator]:
    """Derive one independent Generator per name from a single run seed.

    Streams are spawned from a SeedSequence, so consuming draws from one
    stream never perturbs another.  This keeps runs reproducible no matter
    how work is interleaved.
    """
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {name: np.random.default_rng(child) for name, child in zip(names, children)}
