"""Homomorphisms F_m -> Sym_n, stored as the m generator images.

A word acts with its rightmost letter first: phi(uv) = phi(u) o phi(v).
"""

from __future__ import annotations

import itertools
import json
import math
from collections import deque
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .freegroup import RankMismatch, Word, power
from .perm import (
    Permutation,
    bounded_orbit_sizes,
    compose,
    conjugate,
    fisher_yates,
    format_cycles,
    inverse,
    parse_cycles,
)

DEFAULT_BUDGET = 10**8
MAX_FACTORIAL_RADIUS = 20


class BudgetExceeded(RuntimeError):
    pass


class NotTransitive(ValueError):
    pass


@dataclass(frozen=True)
class Homomorphism:
    images: tuple[Permutation, ...]

    def __post_init__(self):
        if not self.images:
            raise ValueError("rank must be >= 1")
        degrees = {p.degree for p in self.images}
        if len(degrees) != 1:
            raise ValueError(f"generator images have different degrees {sorted(degrees)}")

    @property
    def rank(self) -> int:
        return len(self.images)

    @property
    def degree(self) -> int:
        return self.images[0].degree

    def __call__(self, w: Word) -> Permutation:
        return evaluate(self, w)

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "degree": self.degree,
            "images": [format_cycles(p) for p in self.images],
        }

    @classmethod
    def from_json(cls, data: dict) -> "Homomorphism":
        rank, degree, images = data["rank"], data["degree"], data["images"]
        if len(images) != rank:
            raise ValueError(f"expected {rank} images, got {len(images)}")
        return cls(tuple(parse_cycles(text, degree) for text in images))

    @classmethod
    def load(cls, path) -> "Homomorphism":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class TangleReport:
    witness_point: int
    orbit_size_1: int
    orbit_size_2: int


def evaluate(phi: Homomorphism, w: Word) -> Permutation:
    if w.rank != phi.rank:
        raise RankMismatch(f"word rank {w.rank} vs homomorphism rank {phi.rank}")
    invs: dict[int, Permutation] = {}
    result = None
    for gen, sign in w.letters:
        if sign > 0:
            g = phi.images[gen - 1]
        else:
            g = invs.get(gen)
            if g is None:
                g = invs[gen] = inverse(phi.images[gen - 1])
        result = g if result is None else compose(result, g)
    return result if result is not None else Permutation.identity(phi.degree)


def is_tangled(phi: Homomorphism, w1: Word, w2: Word, R: int) -> TangleReport | None:
    """Smallest k with |Orb(phi(w1),k)| + |Orb(phi(w2),k)| <= R, if any."""
    if not w1 or not w2:
        raise ValueError("tangling is undefined for the trivial word")
    p1, p2 = evaluate(phi, w1), evaluate(phi, w2)
    if R < 2:
        return None
    # each size is >= 1, so only sizes up to R - 1 can take part in a witness
    s1 = bounded_orbit_sizes(p1, R)
    s2 = bounded_orbit_sizes(p2, R)
    for k, (a, b) in enumerate(zip(s1, s2), start=1):
        if a + b <= R:
            return TangleReport(k, a, b)
    return None


def tangle_to_fixed_point(w1: Word, w2: Word, R: int) -> tuple[Word, Word]:
    """The powers w1^(R!), w2^(R!): any R-tangling witness is a common fixed point."""
    if R < 2:
        raise ValueError("R must be >= 2")
    if R > MAX_FACTORIAL_RADIUS:
        raise OverflowError(f"R! is too large for R={R} (limit {MAX_FACTORIAL_RADIUS})")
    e = math.factorial(R)
    return power(w1, e), power(w2, e)


def _point_graph(phi: Homomorphism) -> list[list[int]]:
    # 0-based neighbours of each point, ordered by generator, then +1 before -1
    n = phi.degree
    invs = [inverse(p)._img for p in phi.images]
    return [
        [x for p, q in zip(phi.images, invs) for x in (p._img[k], q[k])]
        for k in range(n)
    ]


def is_transitive(phi: Homomorphism) -> bool:
    adj = _point_graph(phi)
    seen = {0}
    queue = deque([0])
    while queue:
        k = queue.popleft()
        for x in adj[k]:
            if x not in seen:
                seen.add(x)
                queue.append(x)
    return len(seen) == phi.degree


def hom_count(m: int, n: int) -> int:
    return math.factorial(n) ** m


def check_budget(m: int, n: int, budget: int = DEFAULT_BUDGET) -> int:
    total = hom_count(m, n)
    if total > budget:
        raise BudgetExceeded(f"|Hom_{{{m},{n}}}| = {total} exceeds budget {budget}")
    return total


def enumerate_homs(m: int, n: int, budget: int = DEFAULT_BUDGET) -> Iterator[Homomorphism]:
    """Every homomorphism exactly once, lexicographic with generator 1 most significant."""
    if m < 1 or n < 1:
        raise ValueError("rank and degree must be >= 1")
    check_budget(m, n, budget)
    perms = [Permutation._trusted(p) for p in itertools.permutations(range(n))]
    for images in itertools.product(perms, repeat=m):
        yield Homomorphism(images)


def sample_hom(rng: np.random.Generator, m: int, n: int) -> Homomorphism:
    if m < 1:
        raise ValueError("rank must be >= 1")
    return Homomorphism(tuple(fisher_yates(rng, n) for _ in range(m)))


def sample_transitive_hom(rng: np.random.Generator, m: int, n: int, max_tries: int = 10**4) -> Homomorphism:
    """Rejection sampling; uniform on transitive homomorphisms."""
    for _ in range(max_tries):
        phi = sample_hom(rng, m, n)
        if is_transitive(phi):
            return phi
    raise RuntimeError(f"no transitive homomorphism in {max_tries} draws (m={m}, n={n})")


def conjugate_hom(phi: Homomorphism, r: Permutation) -> Homomorphism:
    """r phi r^-1, i.e. the same cover with points renamed by r."""
    return Homomorphism(tuple(conjugate(p, r) for p in phi.images))


def canonical_pointed_form(phi: Homomorphism) -> Homomorphism:
    """Rename points in breadth-first order from 1.

    Neighbours are visited by generator index, the +1 direction before -1.
    Two transitive homomorphisms get the same form iff they differ by a
    renaming that fixes 1.
    """
    adj = _point_graph(phi)
    order = [0]
    new_label = {0: 0}
    i = 0
    while i < len(order):
        for x in adj[order[i]]:
            if x not in new_label:
                new_label[x] = len(order)
                order.append(x)
        i += 1
    if len(order) != phi.degree:
        raise NotTransitive("canonical_pointed_form needs a transitive homomorphism")
    relabel = Permutation._trusted(tuple(new_label[k] for k in range(phi.degree)))
    return conjugate_hom(phi, relabel)


def hom_from_cycles(cycle_texts: Sequence[str], n: int) -> Homomorphism:
    return Homomorphism(tuple(parse_cycles(t, n) for t in cycle_texts))
