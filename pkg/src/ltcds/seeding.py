"""Deterministic seed derivation.

A single master seed governs an entire experiment. Every run, trial, and
sweep cell draws its randomness from an independent stream whose seed is
derived by hashing the master seed together with a label path, e.g.
``derive_seed(7, "sweep", "ltcds1", "n=500", "rep=3")``. Because the
derivation is a pure function of (master seed, labels), adding new cells or
reordering work never perturbs the streams of existing cells.

The hash is BLAKE2b (8-byte digest) over the ``|``-joined decimal master
seed and labels, giving a 64-bit seed for numpy's PCG64 generator.
"""

from __future__ import annotations

import hashlib

import numpy as np


def derive_seed(master_seed: int, *labels: object) -> int:
    """Map (master seed, label path) to a stable 64-bit stream seed."""
    text = "|".join([str(int(master_seed))] + [str(lab) for lab in labels])
    digest = hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def spawn_rng(master_seed: int, *labels: object) -> np.random.Generator:
    """Independent generator for the stream named by the label path."""
    return np.random.default_rng(derive_seed(master_seed, *labels))
