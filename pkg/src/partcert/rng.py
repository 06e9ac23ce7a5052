"""Deterministic random-stream derivation.

Streams are keyed by hashing a tuple of labels into a Philox counter key, so
every consumer gets an independent stream that depends only on the labels,
never on call order or process layout.
"""

from __future__ import annotations

import hashlib

import numpy as np


def _digest(parts) -> bytes:
    canon = "\x1f".join(
        p.decode("latin1") if isinstance(p, bytes) else str(p) for p in parts
    )
    return hashlib.blake2b(canon.encode("utf-8"), digest_size=16).digest()


def derive_seed(*parts) -> int:
    """A 63-bit integer seed that is a pure function of the labels."""
    return int.from_bytes(_digest(parts)[:8], "little") & (2**63 - 1)


def philox_gen(*parts) -> np.random.Generator:
    """A counter-based generator keyed by the labels."""
    key = np.frombuffer(_digest(parts), dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))
