"""Seeded random number generation.

Every stochastic routine takes a ``seed`` argument and builds its generator
through :func:`make_rng`. The bit generator is fixed to PCG64 seeded via
:class:`numpy.random.SeedSequence`, so identical seeds give identical streams
across runs and platforms. Independent child streams (bagging members,
simulation batches) come from :func:`spawn`, which derives them from
``(seed, child index)`` only.
"""

import numpy as np

from .errors import DomainError


def _seed_sequence(seed):
    if isinstance(seed, np.random.SeedSequence):
        return seed
    if isinstance(seed, (bool, np.bool_)) or not isinstance(seed, (int, np.integer)):
        raise DomainError(f"seed must be a non-negative integer, got {seed!r}")
    if seed < 0:
        raise DomainError(f"seed must be a non-negative integer, got {seed}")
    return np.random.SeedSequence(int(seed))


def make_rng(seed):
    """Return a PCG64 generator for ``seed``.

    ``seed`` may be a non-negative int, a ``SeedSequence`` or an existing
    ``Generator`` (returned unchanged so callers can thread one stream through
    several steps).
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(_seed_sequence(seed)))


def spawn(seed, n):
    """Return ``n`` independent generators derived deterministically from ``seed``."""
    if isinstance(seed, np.random.Generator):
        return [np.random.Generator(bg) for bg in seed.bit_generator.spawn(n)]
    children = _seed_sequence(seed).spawn(n)
    return [np.random.Generator(np.random.PCG64(c)) for c in children]
