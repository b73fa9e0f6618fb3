"""Deterministic per-stage randomness.

Every randomized subroutine in the pipeline draws from a stream derived
from the scenario's root seed and a stage name, so results are reproducible
and independent stages never share a stream.
"""

from __future__ import annotations

import hashlib
import random


def derive_seed(root: int, stage: str) -> int:
    """A 64-bit seed determined by the root seed and the stage label."""
    h = hashlib.blake2b(f"{root}:{stage}".encode(), digest_size=8)
    return int.from_bytes(h.digest(), "big")


def derive_rng(root: int, stage: str) -> random.Random:
    return random.Random(derive_seed(root, stage))


__all__ = ["derive_seed", "derive_rng"]
