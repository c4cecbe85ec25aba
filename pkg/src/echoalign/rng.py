"""Deterministic random streams backed by numpy's Philox counter generator.

Every random draw in the toolkit comes from a stream addressed by
``(seed, tag, element)``. ``tag`` names the consumer (one of the TAG_*
constants below) and ``element`` is usually an instance id. Distinct
``(tag, element)`` pairs map to distinct Philox keys, so per-instance
draws are independent of iteration order and of how work is split across
threads: corrupting or modifying instance 17 consumes the same stream no
matter which other instances are processed alongside it.

Key layout: Philox takes a 128-bit key; we use word0 = seed and
word1 = (tag << 48) | element, which leaves 48 bits for instance ids.
"""

from __future__ import annotations

import numpy as np

# Stream tags. Values are part of the reproducibility contract: changing
# them changes every downstream byte.
TAG_PROTOTYPES = 1      # prototype rejection sampling (sequential draws)
TAG_WORLD = 2           # per-instance feature noise in generate_world
TAG_SYMMETRIC = 3       # per-instance symmetric-noise uniforms
TAG_PAIRFLIP = 4        # per-instance pairflip uniforms
TAG_IDN = 5             # per-instance IDN uniforms (flip rate, then category)
TAG_IDN_PROJECTION = 6  # the shared D x C random projection
TAG_MODIFY = 7          # per-instance modifier residuals
TAG_SHUFFLE = 8         # per-epoch minibatch shuffles (element = epoch)
TAG_RADEMACHER = 9      # sign draws for the complexity estimate
TAG_LINEAR_WORLD = 10   # regression world draws
TAG_BOOTSTRAP = 11      # bootstrap resampling indices

_MAX_ELEMENT = 1 << 48
_MAX_TAG = 1 << 16


def stream(seed: int, tag: int, element: int = 0) -> np.random.Generator:
    """Return the Generator for stream ``(seed, tag, element)``."""
    if not 0 <= tag < _MAX_TAG:
        raise ValueError(f"tag out of range: {tag}")
    if not 0 <= element < _MAX_ELEMENT:
        raise ValueError(f"element out of range: {element}")
    key = np.array([np.uint64(seed), np.uint64((tag << 48) | element)],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def per_element_uniforms(seed: int, tag: int, elements, count: int) -> np.ndarray:
    """Draw ``count`` uniforms from each element's stream; shape (n, count)."""
    out = np.empty((len(elements), count), dtype=np.float64)
    for row, element in enumerate(elements):
        out[row] = stream(seed, tag, int(element)).random(count)
    return out


def per_element_normals(seed: int, tag: int, elements, count: int) -> np.ndarray:
    """Draw ``count`` standard normals from each element's stream."""
    out = np.empty((len(elements), count), dtype=np.float64)
    for row, element in enumerate(elements):
        out[row] = stream(seed, tag, int(element)).normal(size=count)
    return out


def derived_seed(seed: int, salt: int) -> int:
    """A documented seed derivation for auxiliary worlds (e.g. test splits)."""
    return int((np.uint64(seed) ^ np.uint64(salt)) & np.uint64(2**64 - 1))
