"""Vectorized exhaustive sweeps over Hom_{m,n}.

Homomorphisms are handled in blocks as int arrays of shape (B, m, n) holding
0-based images. Blocks follow the same order as homspace.enumerate_homs.
"""

from __future__ import annotations

import itertools
from functools import lru_cache
from typing import Iterator

import numpy as np

from .freegroup import Word
from .homspace import DEFAULT_BUDGET, check_budget

BLOCK = 1 << 18


@lru_cache(maxsize=16)
def all_perms(n: int) -> tuple[np.ndarray, np.ndarray]:
    """All n! permutations in lexicographic order and their inverses."""
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int8).reshape(-1, n)
    inv = np.empty_like(perms)
    rows = np.arange(len(perms))[:, None]
    inv[rows, perms] = np.arange(n, dtype=np.int8)
    return perms, inv


def hom_blocks(m: int, n: int, budget: int = DEFAULT_BUDGET, block: int = BLOCK) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Yield (images, inverse images), each of shape (B, m, n)."""
    total = check_budget(m, n, budget)
    perms, inv = all_perms(n)
    f = len(perms)
    for start in range(0, total, block):
        idx = np.arange(start, min(start + block, total), dtype=np.int64)
        digits = np.empty((len(idx), m), dtype=np.int64)
        for g in range(m - 1, -1, -1):
            digits[:, g] = idx % f
            idx //= f
        yield perms[digits], inv[digits]


def gather(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Row-wise composition p o q (q applied first)."""
    return np.take_along_axis(p, q.astype(np.intp), axis=1)


def evaluate_block(images: np.ndarray, inverses: np.ndarray, w: Word) -> np.ndarray:
    b, _, n = images.shape
    result = np.broadcast_to(np.arange(n, dtype=images.dtype), (b, n)).copy()
    for gen, sign in w.letters:
        g = images[:, gen - 1] if sign > 0 else inverses[:, gen - 1]
        result = gather(result, g)
    return result


def bounded_orbit_sizes_block(p: np.ndarray, cap: int) -> np.ndarray:
    """Orbit sizes per point, capped at ``cap``; shape (B, n)."""
    b, n = p.shape
    start = np.arange(n, dtype=p.dtype)
    sizes = np.full((b, n), cap, dtype=np.int64)
    cur = p.copy()
    for t in range(1, cap):
        hit = (cur == start) & (sizes == cap)
        sizes[hit] = t
        cur = gather(p, cur)
    return sizes


def tangled_block(images: np.ndarray, inverses: np.ndarray, w1: Word, w2: Word, R: int) -> np.ndarray:
    b = images.shape[0]
    if R < 2:
        return np.zeros(b, dtype=bool)
    s1 = bounded_orbit_sizes_block(evaluate_block(images, inverses, w1), R)
    s2 = bounded_orbit_sizes_block(evaluate_block(images, inverses, w2), R)
    return ((s1 + s2) <= R).any(axis=1)


def transitive_block(images: np.ndarray, inverses: np.ndarray) -> np.ndarray:
    """Min-label propagation along generator edges until stable."""
    b, m, n = images.shape
    label = np.broadcast_to(np.arange(n, dtype=images.dtype), (b, n)).copy()
    while True:
        new = label
        for g in range(m):
            new = np.minimum(new, gather(new, images[:, g]))
            new = np.minimum(new, gather(new, inverses[:, g]))
        if np.array_equal(new, label):
            break
        label = new
    return (label == 0).all(axis=1)
