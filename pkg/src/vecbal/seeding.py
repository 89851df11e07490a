"""Deterministic RNG derivation.

Every estimator and sampler in the package takes an explicit seed and is a
pure function of (inputs, seed).  Sub-computations derive child seeds through
``child_seed`` so that nested randomized stages are reproducible and mutually
independent.  The random walk uses the counter-based Philox generator so that
restart attempt r reads stream (seed, r).
"""

from __future__ import annotations

import numpy as np


def _entropy(parts) -> list[int]:
    out = []
    for p in parts:
        if isinstance(p, np.random.SeedSequence):
            ent = p.entropy
            if isinstance(ent, (tuple, list)):
                out.extend(int(x) for x in ent)
            else:
                out.append(int(ent or 0))
        elif isinstance(p, (tuple, list)):
            out.extend(_entropy(p))
        else:
            out.append(int(p) & (2**63 - 1))
    return out


def child_seed(*parts) -> np.random.SeedSequence:
    """Build a SeedSequence deterministically from integer tags."""
    return np.random.SeedSequence(_entropy(parts))


def rng_from(seed) -> np.random.Generator:
    """PCG64 generator from an int, tuple of ints, or SeedSequence."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    return np.random.default_rng(child_seed(seed))


def philox_from(seed) -> np.random.Generator:
    """Counter-based generator for the random walk streams."""
    if isinstance(seed, np.random.SeedSequence):
        ss = seed
    else:
        ss = child_seed(seed)
    return np.random.Generator(np.random.Philox(seed=ss))
