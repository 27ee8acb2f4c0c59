"""Permutations of [n] = {1, ..., n}.

Points are 1-based everywhere in the public interface; images are stored
0-based internally.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable

import numpy as np


@dataclass(frozen=True)
class Permutation:
    _img: tuple[int, ...]

    def __post_init__(self):
        if sorted(self._img) != list(range(len(self._img))):
            raise ValueError("not a bijection of [n]")

    @classmethod
    def from_images(cls, images: Iterable[int]) -> "Permutation":
        """Build from the 1-based image list [p(1), ..., p(n)]."""
        return cls(tuple(int(i) - 1 for i in images))

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        if n < 1:
            raise ValueError("degree must be >= 1")
        return cls(tuple(range(n)))

    @classmethod
    def from_cycles(cls, text: str, n: int) -> "Permutation":
        return parse_cycles(text, n)

    @property
    def degree(self) -> int:
        return len(self._img)

    @property
    def images(self) -> tuple[int, ...]:
        """1-based image list."""
        return tuple(i + 1 for i in self._img)

    def __call__(self, k: int) -> int:
        if not 1 <= k <= len(self._img):
            raise ValueError(f"point {k} outside 1..{len(self._img)}")
        return self._img[k - 1] + 1

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __invert__(self) -> "Permutation":
        return inverse(self)

    def __str__(self) -> str:
        return format_cycles(self)

    @classmethod
    def _trusted(cls, img: tuple[int, ...]) -> "Permutation":
        # skips the bijection check; callers guarantee a valid image tuple
        p = object.__new__(cls)
        object.__setattr__(p, "_img", img)
        return p

    def is_identity(self) -> bool:
        return all(i == x for i, x in enumerate(self._img))

    def fixed_points(self) -> list[int]:
        return [i + 1 for i, x in enumerate(self._img) if i == x]


def compose(p: Permutation, q: Permutation) -> Permutation:
    """The permutation k -> p(q(k)); q is applied first."""
    if p.degree != q.degree:
        raise ValueError(f"degree mismatch: {p.degree} vs {q.degree}")
    pi = p._img
    return Permutation._trusted(tuple(pi[j] for j in q._img))


def inverse(p: Permutation) -> Permutation:
    inv = [0] * p.degree
    for i, j in enumerate(p._img):
        inv[j] = i
    return Permutation._trusted(tuple(inv))


def conjugate(p: Permutation, r: Permutation) -> Permutation:
    """r p r^-1."""
    return compose(compose(r, p), inverse(r))


def orbit(p: Permutation, k: int) -> list[int]:
    """k, p(k), p^2(k), ... up to (not including) the return to k."""
    if not 1 <= k <= p.degree:
        raise ValueError(f"point {k} outside 1..{p.degree}")
    img = p._img
    out = [k]
    x = img[k - 1]
    while x != k - 1:
        out.append(x + 1)
        x = img[x]
    return out


def orbit_size(p: Permutation, k: int) -> int:
    return len(orbit(p, k))


def bounded_orbit_sizes(p: Permutation, cap: int) -> list[int]:
    """Orbit size of every point, with sizes >= cap reported as cap.

    Costs O(n * cap) regardless of the cycle structure.
    """
    img = p._img
    sizes = []
    for k in range(len(img)):
        x, t = img[k], 1
        while x != k and t < cap:
            x = img[x]
            t += 1
        sizes.append(t)
    return sizes


def cycles(p: Permutation, include_fixed: bool = False) -> list[list[int]]:
    seen = [False] * p.degree
    out = []
    for k in range(1, p.degree + 1):
        if seen[k - 1]:
            continue
        cyc = orbit(p, k)
        for x in cyc:
            seen[x - 1] = True
        if include_fixed or len(cyc) > 1:
            out.append(cyc)
    return out


def cycle_type(p: Permutation) -> list[int]:
    """Cycle lengths (fixed points included), in decreasing order."""
    return sorted((len(c) for c in cycles(p, include_fixed=True)), reverse=True)


def format_cycles(p: Permutation) -> str:
    """Cycle notation with fixed points omitted; the identity prints as ``()``.

    Points are separated by commas when the degree exceeds 9.
    """
    cs = cycles(p)
    if not cs:
        return "()"
    sep = "," if p.degree > 9 else ""
    return "".join("(" + sep.join(str(x) for x in c) + ")" for c in cs)


_CYCLE = re.compile(r"\(([^()]*)\)")


def parse_cycles(text: str, n: int) -> Permutation:
    """Parse ``(15)(687)`` style notation into a permutation of degree n.

    Inside a cycle, points are single digits unless commas or spaces separate them.
    Cycles must be disjoint; ``()`` is the identity.
    """
    compact = text.replace(" ", ",") if re.search(r"\d\s+\d", text) else text.replace(" ", "")
    pos = 0
    img = list(range(n))
    seen: set[int] = set()
    for m in _CYCLE.finditer(compact):
        if m.start() != pos:
            raise ValueError(f"malformed cycle notation {text!r}")
        pos = m.end()
        body = m.group(1)
        if not body:
            continue
        if "," in body:
            points = [int(x) for x in body.split(",") if x]
        else:
            if not body.isdigit():
                raise ValueError(f"malformed cycle {body!r}")
            points = [int(ch) for ch in body]
        for x in points:
            if not 1 <= x <= n:
                raise ValueError(f"point {x} outside 1..{n}")
            if x in seen:
                raise ValueError(f"point {x} appears twice in {text!r}")
            seen.add(x)
        for a, b in zip(points, points[1:] + points[:1]):
            img[a - 1] = b - 1
    if pos != len(compact):
        raise ValueError(f"malformed cycle notation {text!r}")
    return Permutation(tuple(img))


def fisher_yates(rng: np.random.Generator, n: int) -> Permutation:
    """Uniform random permutation of [n] by the Fisher-Yates shuffle."""
    if n < 1:
        raise ValueError("degree must be >= 1")
    img = list(range(n))
    if n == 1:
        return Permutation(tuple(img))
    # draws[t] is uniform on {0, ..., n-1-t}, for positions i = n-1, ..., 1
    draws = rng.integers(0, np.arange(n, 1, -1)).tolist()
    for i, j in zip(range(n - 1, 0, -1), draws):
        img[i], img[j] = img[j], img[i]
    return Permutation._trusted(tuple(img))


uniform_sample = fisher_yates


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent generator for sample ``index`` of the run seeded by ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def stream(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
