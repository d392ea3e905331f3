"""Deterministic random streams.

Every randomized routine takes a ``seed`` and derives independent child
streams from it (Philox is counter based, so children never overlap).
"""
from __future__ import annotations

import os

import numpy as np


def make_rng(seed: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def child_rngs(seed: int, n: int) -> list[np.random.Generator]:
    """``n`` independent generators, reproducible from ``seed``."""
    return [np.random.Generator(np.random.Philox(s)) for s in np.random.SeedSequence(seed).spawn(n)]


def random_ket(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-random normalized ket."""
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def random_unit_vectors(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=(n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def worker_count() -> int:
    """Thread cap from ``SYMGM_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("SYMGM_THREADS", "1")))
    except ValueError:
        return 1
