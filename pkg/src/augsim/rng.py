"""Deterministic, cross-platform random number generation.

All sampled behavior in the toolkit flows through one fixed generator
algorithm (numpy's PCG64, whose bit stream is stable across platforms and
numpy releases).  Independent substreams are derived by hashing
``(seed, label, label, ...)`` with SHA-256 and feeding the first 128 bits
to the generator as its seed, so any (seed, purpose) pair names the same
stream everywhere.
"""

from __future__ import annotations

import hashlib

import numpy as np

MAX_SEED = 2**64 - 1


def check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or isinstance(seed, bool):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    if not 0 <= seed <= MAX_SEED:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    return int(seed)


def derive_key(seed: int, *labels) -> int:
    """Hash (seed, labels...) into a 128-bit substream key.

    Labels may be strings, integers, or bytes; each is length-prefixed in
    the hash input so distinct label tuples never collide by concatenation.
    """
    h = hashlib.sha256()
    h.update(check_seed(seed).to_bytes(8, "little"))
    for label in labels:
        if isinstance(label, str):
            data = label.encode("utf-8")
        elif isinstance(label, (int, np.integer)):
            data = int(label).to_bytes(16, "little", signed=True)
        elif isinstance(label, bytes):
            data = label
        else:
            raise TypeError(f"unsupported label type: {type(label).__name__}")
        h.update(len(data).to_bytes(4, "little"))
        h.update(data)
    return int.from_bytes(h.digest()[:16], "little")


def generator(seed: int, *labels) -> np.random.Generator:
    """Return the PCG64 stream named by (seed, labels...)."""
    return np.random.Generator(np.random.PCG64(derive_key(seed, *labels)))


def derive_seed(seed: int, *labels) -> int:
    """Collapse a substream key to a 64-bit seed (for manifests and specs)."""
    return derive_key(seed, *labels) & MAX_SEED
