"""Exact and Monte-Carlo experiments.

Every stochastic estimate draws sample i from its own substream derived from
(seed, i), so the numbers do not depend on how samples are split across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from . import batch
from .carrier import (
    carried_count_bound,
    carried_count_exact,
    carries,
    build_carrier,
    dedup_fold,
    euler_characteristic,
    is_f_compatible,
    quotient_by_labels,
    stallings_fold,
    LabelledGraph,
)
from .cuspgeom import BaseSurface, has_L_horoball, horoball_failure_witness
from .freegroup import Word, distinct_powers_check, format_word
from .homspace import (
    DEFAULT_BUDGET,
    Homomorphism,
    enumerate_homs,
    evaluate,
    hom_count,
    is_tangled,
    is_transitive,
    sample_hom,
    sample_transitive_hom,
)
from .perm import format_cycles, substream

MAX_TRANSITIVE_TRIES = 10**4


class CommutingWords(ValueError):
    """The words commute, so the tangling estimates do not apply."""


class BoundViolation(AssertionError):
    pass


@dataclass(frozen=True)
class FractionEstimate:
    n: int
    numerator: int
    denominator: int
    estimate: float
    stderr: float
    exact: bool

    def as_row(self) -> dict:
        return asdict(self)


def _exact(n: int, num: int, den: int) -> FractionEstimate:
    return FractionEstimate(n, num, den, num / den if den else math.nan, 0.0, True)


def _binomial(n: int, hits: int, samples: int) -> FractionEstimate:
    p = hits / samples
    return FractionEstimate(n, hits, samples, p, math.sqrt(p * (1 - p) / samples), False)


def require_distinct_powers(w1: Word, w2: Word) -> None:
    if not distinct_powers_check(w1, w2):
        raise CommutingWords(
            f"words {format_word(w1)!r} and {format_word(w2)!r} commute (or one is trivial); "
            "tangling estimates need non-commuting words"
        )


def exact_tangled_fraction(w1: Word, w2: Word, R: int, n: int, transitive_only: bool = False,
                           budget: int = DEFAULT_BUDGET) -> FractionEstimate:
    require_distinct_powers(w1, w2)
    hits = total = 0
    for images, inverses in batch.hom_blocks(w1.rank, n, budget):
        tangled = batch.tangled_block(images, inverses, w1, w2, R)
        if transitive_only:
            keep = batch.transitive_block(images, inverses)
            tangled &= keep
            total += int(keep.sum())
        else:
            total += len(images)
        hits += int(tangled.sum())
    return _exact(n, hits, total)


def _draw(rng, m: int, n: int, transitive_only: bool) -> Homomorphism:
    if transitive_only:
        return sample_transitive_hom(rng, m, n, MAX_TRANSITIVE_TRIES)
    return sample_hom(rng, m, n)


def _count_tangled(args) -> int:
    w1, w2, R, n, seed, start, stop, transitive_only = args
    hits = 0
    for i in range(start, stop):
        phi = _draw(substream(seed, i), w1.rank, n, transitive_only)
        hits += is_tangled(phi, w1, w2, R) is not None
    return hits


def _count_transitive(args) -> int:
    m, n, seed, start, stop = args
    return sum(is_transitive(sample_hom(substream(seed, i), m, n)) for i in range(start, stop))


def _sharded(fn: Callable, make_args: Callable[[int, int], tuple], samples: int, workers: int) -> int:
    if workers <= 1:
        return fn(make_args(0, samples))
    chunk = -(-samples // (4 * workers))
    jobs = [make_args(s, min(s + chunk, samples)) for s in range(0, samples, chunk)]
    with ProcessPoolExecutor(workers) as pool:
        return sum(pool.map(fn, jobs))


def mc_tangled_fraction(w1: Word, w2: Word, R: int, n: int, samples: int, seed: int,
                        transitive_only: bool = False, workers: int = 1) -> FractionEstimate:
    require_distinct_powers(w1, w2)
    if samples < 1:
        raise ValueError("samples must be >= 1")
    hits = _sharded(
        _count_tangled,
        lambda a, b: (w1, w2, R, n, seed, a, b, transitive_only),
        samples, workers,
    )
    return _binomial(n, hits, samples)


def transitive_fraction(m: int, n: int, samples: int | None = None, seed: int | None = None,
                        budget: int = DEFAULT_BUDGET, workers: int = 1) -> FractionEstimate:
    """Fraction of Hom_{m,n} that is transitive; exact unless ``samples`` is given."""
    if samples is None:
        hits = total = 0
        for images, inverses in batch.hom_blocks(m, n, budget):
            hits += int(batch.transitive_block(images, inverses).sum())
            total += len(images)
        return _exact(n, hits, total)
    if seed is None:
        raise ValueError("a seed is required for sampling")
    hits = _sharded(_count_transitive, lambda a, b: (m, n, seed, a, b), samples, workers)
    return _binomial(n, hits, samples)


def verify_count_bound(g: LabelledGraph, ns: Iterable[int], budget: int = DEFAULT_BUDGET) -> list[dict]:
    rows = []
    chi = euler_characteristic(g)
    for n in ns:
        exact = carried_count_exact(g, n, budget)
        bound, C = carried_count_bound(g, n)
        homs = hom_count(g.rank, n)
        if exact > bound:
            raise BoundViolation(f"n={n}: carried count {exact} exceeds bound {bound}")
        rows.append({
            "n": n,
            "exact": exact,
            "bound": bound,
            "hom_count": homs,
            "exact_ratio": exact / homs,
            "bound_ratio": bound / homs,
            "chi": chi,
            "C": str(C),
            "C_n_chi": float(C * Fraction(n) ** chi),
        })
    return rows


def _covers(m: int, n: int, samples: int | None, seed: int | None, budget: int):
    if samples is None:
        for phi in enumerate_homs(m, n, budget):
            if is_transitive(phi):
                yield phi
    else:
        for i in range(samples):
            yield sample_transitive_hom(substream(seed, i), m, n, MAX_TRANSITIVE_TRIES)


def horoball_experiment(surface: BaseSurface, L: float, ns: Iterable[int], samples: int | None = None,
                        seed: int | None = None, budget: int = DEFAULT_BUDGET,
                        max_witnesses: int = 5) -> tuple[list[dict], list[dict]]:
    """Fraction of transitive covers with the L-horoball property, per n.

    Exhaustive over transitive covers when ``samples`` is None. Returns the
    summary rows and a list of failure witnesses (at most ``max_witnesses`` per n).
    """
    if samples is not None and seed is None:
        raise ValueError("a seed is required for sampling")
    rows, witnesses = [], []
    for n in ns:
        covers = positive = 0
        found = 0
        for phi in _covers(surface.rank, n, samples, seed, budget):
            covers += 1
            report = has_L_horoball(phi, surface, L)
            if report.decision:
                positive += 1
            elif found < max_witnesses:
                w = horoball_failure_witness(phi, surface, L)
                witnesses.append({
                    "n": n, "pair_id": w.pair_id, "point": w.point, "d1": w.d1, "d2": w.d2,
                    "lift_length": w.lift_length, "additive_tangled": w.additive_tangled,
                    "images": " ".join(format_cycles(p) for p in phi.images),
                })
                found += 1
        est = _exact(n, positive, covers) if samples is None else _binomial(n, positive, covers)
        rows.append(est.as_row())
    return rows, witnesses


def carrier_demo(w1: Word, w2: Word, phi: Homomorphism, k: int) -> dict:
    """Carrier graph, its quotient by labels and the folded graph G1, with chi of each."""
    result = build_carrier(w1, w2, phi, k)
    quotient, labels = quotient_by_labels(result)
    folded = dedup_fold(quotient)
    f1 = carries(folded, phi)
    commuting = not distinct_powers_check(w1, w2)
    return {
        "w1": format_word(w1),
        "w2": format_word(w2),
        "phi_w1": format_cycles(evaluate(phi, w1)),
        "phi_w2": format_cycles(evaluate(phi, w2)),
        "fixed_point": k,
        "carrier": {**result.graph.to_json(), "labelling": list(result.labelling),
                    "chi": euler_characteristic(result.graph),
                    "compatible": is_f_compatible(result.graph, result.labelling, phi)},
        "quotient": {**quotient.to_json(), "labelling": list(labels),
                     "chi": euler_characteristic(quotient), "state": quotient.state},
        "folded": {**folded.to_json(), "labelling": list(labels),
                   "chi": euler_characteristic(folded), "state": folded.state,
                   "compatible": is_f_compatible(folded, labels, phi),
                   "carries": f1 is not None},
        "chi_sequence": [euler_characteristic(result.graph), euler_characteristic(quotient),
                         euler_characteristic(folded)],
        "warning": ("words commute: negative Euler characteristic is not guaranteed"
                    if commuting else ""),
    }


def fold_words(words: Sequence[Word]) -> dict:
    g = stallings_fold(words)
    return {**g.to_json(), "chi": euler_characteristic(g), "subgroup_rank": 1 - euler_characteristic(g)}


def parse_range(text: str) -> list[int]:
    """``start:stop:step`` (inclusive), ``start:stop``, a comma list, or a single value."""
    if ":" in text:
        parts = [int(x) for x in text.split(":")]
        if len(parts) == 2:
            parts.append(1)
        if len(parts) != 3 or parts[2] <= 0:
            raise ValueError(f"bad range {text!r}")
        start, stop, step = parts
        return list(range(start, stop + 1, step))
    return [int(x) for x in text.split(",") if x.strip()]
