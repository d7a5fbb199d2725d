"""Small shared helpers: stable seeding and canonical JSON digests."""

from __future__ import annotations

import hashlib
import json

import numpy as np

_MASK64 = (1 << 64) - 1


def stable_seed(*parts) -> int:
    """Content-addressed 64-bit seed, stable across runs and platforms.

    Python's builtin ``hash`` is salted per process, so it must never feed
    an RNG that has to be reproducible.
    """
    h = hashlib.blake2b(digest_size=8)
    for p in parts:
        if isinstance(p, np.ndarray):
            h.update(np.ascontiguousarray(p).tobytes())
        else:
            h.update(repr(p).encode())
        h.update(b"\x1f")
    return int.from_bytes(h.digest(), "big")


def seed_entry(value: int) -> int:
    """Coerce a user-supplied integer into the nonnegative range that
    ``numpy.random.SeedSequence`` accepts."""
    return int(value) & _MASK64


def config_digest(obj) -> str:
    """SHA-256 of the canonical JSON form of ``obj``."""
    text = json.dumps(obj, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()
