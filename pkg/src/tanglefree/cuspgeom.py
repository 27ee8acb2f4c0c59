"""Horoball decisions for finite covers of a punctured surface.

A cover is given by a homomorphism from the free fundamental group of the base
surface. Each pair of connected cusps downstairs has a beam length and two
lollipop words; at fiber point k the lifted pair has length
base_length + ln d1(k) + ln d2(k), where di(k) is the orbit size of k under the
image of the i-th lollipop. The cover has the L-horoball property iff every
lifted length is at least 2 ln L.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation

from .freegroup import Word, distinct_powers_check, format_word, parse_word
from .homspace import Homomorphism, evaluate
from .perm import cycles, orbit_size

LENGTH_TOL = 1e-9


class DescriptorError(ValueError):
    pass


@dataclass(frozen=True)
class CuspPair:
    pair_id: str
    base_length: float
    a1: Word
    a2: Word

    def __post_init__(self):
        if self.base_length < 0:
            raise DescriptorError(f"pair {self.pair_id}: base length must be >= 0")
        if self.a1.rank != self.a2.rank:
            raise DescriptorError(f"pair {self.pair_id}: lollipop ranks differ")
        if not distinct_powers_check(self.a1, self.a2):
            raise DescriptorError(
                f"pair {self.pair_id}: lollipops must be nontrivial with distinct nontrivial powers"
            )


@dataclass(frozen=True)
class BaseSurface:
    genus: int
    punctures: int
    pairs: tuple[CuspPair, ...]

    def __post_init__(self):
        if self.genus < 0:
            raise DescriptorError("genus must be >= 0")
        if self.punctures < 1:
            raise DescriptorError("only punctured surfaces (p >= 1) are supported")
        if self.rank < 1:
            raise DescriptorError("the sphere with one puncture has trivial fundamental group")
        ids = [p.pair_id for p in self.pairs]
        if len(set(ids)) != len(ids):
            raise DescriptorError("pair ids must be unique")
        for p in self.pairs:
            if p.a1.rank != self.rank:
                raise DescriptorError(
                    f"pair {p.pair_id}: words have rank {p.a1.rank}, surface rank is {self.rank}"
                )

    @property
    def rank(self) -> int:
        return 2 * self.genus + self.punctures - 1

    @classmethod
    def from_json(cls, data: dict) -> "BaseSurface":
        try:
            genus, punctures = int(data["genus"]), int(data["punctures"])
            rank = 2 * genus + punctures - 1
            if rank < 1:
                raise DescriptorError("surface rank 2g+p-1 must be >= 1")
            pairs = []
            for item in data["pairs"]:
                text = item["base_length"]
                if not isinstance(text, str):
                    raise DescriptorError("base_length must be a decimal string")
                try:
                    length = float(Decimal(text))
                except InvalidOperation as exc:
                    raise DescriptorError(f"bad base_length {text!r}") from exc
                pairs.append(CuspPair(
                    str(item["id"]), length,
                    parse_word(item["a1"], rank), parse_word(item["a2"], rank),
                ))
        except KeyError as exc:
            raise DescriptorError(f"missing field {exc.args[0]!r}") from exc
        return cls(genus, punctures, tuple(pairs))

    def to_json(self) -> dict:
        return {
            "genus": self.genus,
            "punctures": self.punctures,
            "pairs": [
                {"id": p.pair_id, "base_length": repr(p.base_length),
                 "a1": format_word(p.a1), "a2": format_word(p.a2)}
                for p in self.pairs
            ],
        }

    @classmethod
    def load(cls, path) -> "BaseSurface":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


@dataclass(frozen=True)
class Worst:
    pair_id: str
    point: int
    d1: int
    d2: int


@dataclass(frozen=True)
class HoroballReport:
    decision: bool
    min_lift_length: float
    worst: Worst | None
    threshold: float
    note: str = ""


@dataclass(frozen=True)
class FailureWitness:
    pair_id: str
    point: int
    d1: int
    d2: int
    lift_length: float
    # whether d1 + d2 <= 2 ln L also holds (the additive tangling inequality)
    additive_tangled: bool


def branch_degrees(phi: Homomorphism, pair: CuspPair, k: int) -> tuple[int, int]:
    return (orbit_size(evaluate(phi, pair.a1), k), orbit_size(evaluate(phi, pair.a2), k))


def lifted_length(pair: CuspPair | float, d1: int, d2: int) -> float:
    if d1 < 1 or d2 < 1 or int(d1) != d1 or int(d2) != d2:
        raise ValueError("branching degrees must be positive integers")
    base = pair.base_length if isinstance(pair, CuspPair) else float(pair)
    return base + math.log(d1) + math.log(d2)


def _lift_table(phi: Homomorphism, surface: BaseSurface):
    if phi.rank != surface.rank:
        raise ValueError(f"homomorphism rank {phi.rank} vs surface rank {surface.rank}")
    for pair in surface.pairs:
        p1, p2 = evaluate(phi, pair.a1), evaluate(phi, pair.a2)
        sizes1 = _orbit_sizes(p1)
        sizes2 = _orbit_sizes(p2)
        for k in range(1, phi.degree + 1):
            d1, d2 = sizes1[k - 1], sizes2[k - 1]
            yield pair, k, d1, d2, lifted_length(pair, d1, d2)


def _orbit_sizes(p) -> list[int]:
    sizes = [0] * p.degree
    for cyc in cycles(p, include_fixed=True):
        for x in cyc:
            sizes[x - 1] = len(cyc)
    return sizes


def has_L_horoball(phi: Homomorphism, surface: BaseSurface, L: float) -> HoroballReport:
    threshold = 2 * math.log(L) if L > 0 else -math.inf
    best = None
    for pair, k, d1, d2, length in _lift_table(phi, surface):
        # ties broken by (pair_id, k)
        key = (length, pair.pair_id, k)
        if best is None or key < best[0]:
            best = (key, Worst(pair.pair_id, k, d1, d2))
    min_len = best[0][0] if best else math.inf
    worst = best[1] if best else None
    if L < 1:
        return HoroballReport(True, min_len, worst, threshold,
                              "L < 1: horoballs of perimeter below 1 are always embedded")
    decision = min_len >= threshold - LENGTH_TOL
    note = ""
    if not decision:
        w = horoball_failure_witness(phi, surface, L)
        if w is not None and not w.additive_tangled:
            note = ("length criterion fails but the failing lift has d1 + d2 > 2 ln L; "
                    f"it is tangled at radius {tangling_radius(L)}")
    return HoroballReport(decision, min_len, worst, threshold, note)


def tangling_radius(L: float) -> int:
    """A radius R at which every failing lift gives an R-tangled lollipop pair.

    A failing lift has d1 * d2 < L^2, hence d1 + d2 <= d1 * d2 + 1 <= ceil(L^2).
    """
    return max(2, math.ceil(L * L))


def horoball_failure_witness(phi: Homomorphism, surface: BaseSurface, L: float) -> FailureWitness | None:
    """A lift shorter than 2 ln L, or None if the cover has the L-horoball property.

    Among failing lifts, one satisfying d1 + d2 <= 2 ln L is preferred; otherwise
    the shortest lift is returned.
    """
    if L < 1:
        return None
    threshold = 2 * math.log(L)
    failures = [
        (length, pair.pair_id, k, d1, d2)
        for pair, k, d1, d2, length in _lift_table(phi, surface)
        if length < threshold - LENGTH_TOL
    ]
    if not failures:
        return None
    additive = [f for f in failures if f[3] + f[4] <= threshold + LENGTH_TOL]
    length, pid, k, d1, d2 = min(additive or failures)
    return FailureWitness(pid, k, d1, d2, length, bool(additive))
