"""Seed discipline: one master seed fans out into named, independent streams.

Stream identity is a stable hash of (master seed, name), so adding or removing
consumers of one stream can never perturb another. The planner derives one
further level of per-node seeds so tree evaluations are order-independent.
"""

from __future__ import annotations

import hashlib

import numpy as np

MOTION = "motion-noise"
DETECTION = "detection"
MEASUREMENT = "measurement"
PLANNER = "planner"
SCENARIO = "scenario-gen"


def stream_seed(master_seed: int, name: str) -> int:
    digest = hashlib.blake2b(f"{master_seed}:{name}".encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little")


def substream(master_seed: int, name: str) -> np.random.Generator:
    """Independent generator for one named stream of a master seed."""
    return np.random.Generator(np.random.PCG64(stream_seed(master_seed, name)))


def node_seed(plan_seed: int, path: tuple[int, ...]) -> int:
    """Stable per-node seed for search trees; path is the (action, outcome) trail."""
    h = hashlib.blake2b(digest_size=8)
    h.update(plan_seed.to_bytes(8, "little", signed=False))
    for v in path:
        h.update(v.to_bytes(4, "little", signed=False))
    return int.from_bytes(h.digest(), "little")
