"""Deterministic random-stream derivation.

Every stochastic routine takes one base seed and derives an independent
stream per replicate from ``(seed, domain, replicate)``.  Results are then
identical for any degree of parallelism, including serial execution.
"""

from __future__ import annotations

import numpy as np

# Domain tags keep replicate streams of different subsystems disjoint even
# when they share a base seed.
DOMAIN_SAMPLING = 0
DOMAIN_BOOTSTRAP = 1
DOMAIN_GOF = 2


def check_seed(seed: int) -> int:
    seed = int(seed)
    if seed < 0:
        raise ValueError("seed must be a nonnegative integer")
    return seed


def derived_rng(seed: int, domain: int, replicate: int = 0) -> np.random.Generator:
    """Generator for one replicate of one domain under a base seed."""
    ss = np.random.SeedSequence([check_seed(seed), domain, replicate])
    return np.random.Generator(np.random.PCG64(ss))
