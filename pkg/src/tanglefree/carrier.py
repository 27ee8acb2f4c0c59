"""Edge labelled graphs carrying homomorphisms, and the folding constructions around them.

A graph stores vertices 0..V-1 and a list of (src, dst, label) edges with labels
in 1..m. It is VALID when weakly connected with no two edges sharing
(src, dst, label); graphs coming out of ``quotient_by_labels`` may violate the
second condition (the PREFOLDED state) until ``dedup_fold`` is applied.
"""

from __future__ import annotations

import itertools
import json
import math
import random
from collections import Counter, deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .freegroup import Word
from .homspace import DEFAULT_BUDGET, Homomorphism, evaluate
from .perm import inverse


class InvalidGraph(ValueError):
    pass


class FoldError(ValueError):
    """Same source, same label, different targets: the input was not compatible."""


class Edge(NamedTuple):
    src: int
    dst: int
    label: int


@dataclass(frozen=True)
class LabelledGraph:
    rank: int
    num_vertices: int
    edges: tuple[Edge, ...] = ()
    basepoint: int = 0

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(Edge(*e) for e in self.edges))
        if self.num_vertices < 1:
            raise InvalidGraph("graph needs at least one vertex")
        if not 0 <= self.basepoint < self.num_vertices:
            raise InvalidGraph(f"basepoint {self.basepoint} out of range")
        for e in self.edges:
            if not (0 <= e.src < self.num_vertices and 0 <= e.dst < self.num_vertices):
                raise InvalidGraph(f"edge {e} references a missing vertex")
            if not 1 <= e.label <= self.rank:
                raise InvalidGraph(f"edge label {e.label} outside 1..{self.rank}")

    @property
    def state(self) -> str:
        return "VALID" if is_valid(self) else "PREFOLDED"

    def edges_with_label(self, label: int) -> list[Edge]:
        return [e for e in self.edges if e.label == label]

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "vertices": self.num_vertices,
            "edges": [list(e) for e in sorted(self.edges, key=lambda e: (e.label, e.src, e.dst))],
            "basepoint": self.basepoint,
        }

    @classmethod
    def from_json(cls, data: dict) -> "LabelledGraph":
        return cls(
            rank=data["rank"],
            num_vertices=data["vertices"],
            edges=tuple(Edge(*e) for e in data["edges"]),
            basepoint=data.get("basepoint", 0),
        )

    @classmethod
    def load(cls, path) -> "LabelledGraph":
        with open(path) as fh:
            return cls.from_json(json.load(fh))


# labelling[v] is the point of [n] (1-based) assigned to vertex v
VertexLabelling = tuple[int, ...]


@dataclass(frozen=True)
class CarrierResult:
    graph: LabelledGraph
    labelling: VertexLabelling
    basepoint: int = 0
    petal_edges: tuple[tuple[int, ...], ...] = field(default=(), compare=False)


def is_connected(g: LabelledGraph) -> bool:
    adj: list[list[int]] = [[] for _ in range(g.num_vertices)]
    for e in g.edges:
        adj[e.src].append(e.dst)
        adj[e.dst].append(e.src)
    seen = {0}
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for x in adj[v]:
            if x not in seen:
                seen.add(x)
                queue.append(x)
    return len(seen) == g.num_vertices


def is_valid(g: LabelledGraph) -> bool:
    return len(set(g.edges)) == len(g.edges) and is_connected(g)


def euler_characteristic(g: LabelledGraph) -> int:
    return g.num_vertices - len(g.edges)


def is_f_compatible(g: LabelledGraph, f: Sequence[int], phi: Homomorphism) -> bool:
    if g.rank != phi.rank:
        raise ValueError(f"graph rank {g.rank} vs homomorphism rank {phi.rank}")
    if len(f) != g.num_vertices:
        raise ValueError("labelling must assign a point to every vertex")
    n = phi.degree
    if any(not 1 <= x <= n for x in f):
        raise ValueError(f"labelling uses points outside 1..{n}")
    return all(phi.images[e.label - 1](f[e.src]) == f[e.dst] for e in g.edges)


def _propagate(g: LabelledGraph, phi: Homomorphism, seed_vertex: int, seed_label: int,
               injective: bool) -> list[int] | None:
    # 0-based points; returns None on conflict
    imgs = [p._img for p in phi.images]
    invs = [inverse(p)._img for p in phi.images]
    out: list[list[tuple[int, int, int]]] = [[] for _ in range(g.num_vertices)]
    for e in g.edges:
        out[e.src].append((e.dst, e.label - 1, 1))
        out[e.dst].append((e.src, e.label - 1, -1))
    f = [-1] * g.num_vertices
    f[seed_vertex] = seed_label
    used = {seed_label}
    queue = deque([seed_vertex])
    while queue:
        v = queue.popleft()
        for x, l, d in out[v]:
            want = imgs[l][f[v]] if d > 0 else invs[l][f[v]]
            if f[x] < 0:
                if injective and want in used:
                    return None
                f[x] = want
                used.add(want)
                queue.append(x)
            elif f[x] != want:
                return None
    return f


def carries(g: LabelledGraph, phi: Homomorphism) -> VertexLabelling | None:
    """An injective compatible labelling, trying seed labels 1..n at vertex 0."""
    if not is_valid(g):
        raise InvalidGraph("carries needs a VALID graph")
    if g.rank != phi.rank:
        raise ValueError(f"graph rank {g.rank} vs homomorphism rank {phi.rank}")
    if g.num_vertices > phi.degree:
        return None
    for c in range(phi.degree):
        f = _propagate(g, phi, 0, c, injective=True)
        if f is not None:
            return tuple(x + 1 for x in f)
    return None


def petal_graph(words: Sequence[Word]) -> tuple[LabelledGraph, list[list[tuple[int, int]]]]:
    """Wedge of subdivided cycles at vertex 0, one per word.

    Each word is walked from vertex 0 in application order (last letter first):
    a positive letter crosses a fresh edge forwards, a negative one backwards.
    Returns the graph and, per petal, the (edge index, new vertex or 0) walk.
    """
    if not words:
        raise ValueError("need at least one word")
    rank = words[0].rank
    edges: list[Edge] = []
    walks = []
    nv = 1
    for w in words:
        if w.rank != rank:
            raise ValueError("words must share a rank")
        if not w:
            raise ValueError("petal words must be nontrivial")
        cur = 0
        walk = []
        letters = w.letters
        for t in range(len(letters) - 1, -1, -1):
            gen, sign = letters[t]
            if t == 0:
                nxt = 0
            else:
                nxt = nv
                nv += 1
            edges.append(Edge(cur, nxt, gen) if sign > 0 else Edge(nxt, cur, gen))
            walk.append((len(edges) - 1, nxt))
            cur = nxt
        walks.append(walk)
    return LabelledGraph(rank, nv, tuple(edges), 0), walks


def build_carrier(w1: Word, w2: Word, phi: Homomorphism, k: int) -> CarrierResult:
    """Two-petal graph for w1, w2 with the labelling propagated from f(v0) = k."""
    p1, p2 = evaluate(phi, w1), evaluate(phi, w2)
    if p1(k) != k or p2(k) != k:
        raise ValueError(f"{k} is not a common fixed point of phi(w1), phi(w2)")
    g, walks = petal_graph([w1, w2])
    f = [0] * g.num_vertices
    f[0] = k
    for w, walk in zip((w1, w2), walks):
        cur = 0
        for (idx, nxt), (gen, sign) in zip(walk, reversed(w.letters)):
            p = phi.images[gen - 1]
            point = p(f[cur]) if sign > 0 else inverse(p)(f[cur])
            if nxt == 0:
                assert point == k
            else:
                f[nxt] = point
            cur = nxt
    petals = tuple(tuple(idx for idx, _ in walk) for walk in walks)
    return CarrierResult(g, tuple(f), 0, petals)


def quotient_by_labels(result: CarrierResult) -> tuple[LabelledGraph, VertexLabelling]:
    """Identify vertices with equal labels; vertices are numbered by first appearance."""
    g, f = result.graph, result.labelling
    index: dict[int, int] = {}
    order = [result.basepoint] + [v for v in range(g.num_vertices) if v != result.basepoint]
    for v in order:
        index.setdefault(f[v], len(index))
    edges = tuple(Edge(index[f[e.src]], index[f[e.dst]], e.label) for e in g.edges)
    labels = tuple(sorted(index, key=index.get))
    return LabelledGraph(g.rank, len(index), edges, 0), labels


def dedup_fold(g: LabelledGraph, rng: random.Random | None = None) -> LabelledGraph:
    """Collapse parallel same-label edges one pair at a time.

    ``rng`` picks which duplicate pair to identify next; the result does not
    depend on it. Surviving edges keep their relative order.
    """
    targets: dict[tuple[int, int], int] = {}
    for e in g.edges:
        if targets.setdefault((e.src, e.label), e.dst) != e.dst:
            raise FoldError(f"vertex {e.src} has label-{e.label} edges to different targets")
    alive = list(range(len(g.edges)))
    while True:
        groups: dict[Edge, list[int]] = {}
        for i in alive:
            groups.setdefault(g.edges[i], []).append(i)
        pairs = [ids for ids in groups.values() if len(ids) > 1]
        if not pairs:
            break
        ids = rng.choice(pairs) if rng else pairs[0]
        a, b = rng.sample(ids, 2) if rng else ids[:2]
        alive.remove(b)  # e_b is identified with e_a
    return LabelledGraph(g.rank, g.num_vertices, tuple(g.edges[i] for i in sorted(alive)), g.basepoint)


def _union_find_fold(num_vertices: int, edges: list[Edge], rng: random.Random | None) -> tuple[int, list[Edge], int]:
    parent = list(range(num_vertices))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = list(edges)
    while True:
        edges = [Edge(find(e.src), find(e.dst), e.label) for e in edges]
        # same (src,dst,label) edges are identical after merging: drop copies
        uniq = list(dict.fromkeys(edges))
        candidates = []
        by_out: dict[tuple[int, int], list[Edge]] = {}
        by_in: dict[tuple[int, int], list[Edge]] = {}
        for e in uniq:
            by_out.setdefault((e.src, e.label), []).append(e)
            by_in.setdefault((e.dst, e.label), []).append(e)
        for es in by_out.values():
            if len(es) > 1:
                candidates.append((es[0].dst, es[1].dst))
        for es in by_in.values():
            if len(es) > 1:
                candidates.append((es[0].src, es[1].src))
        if not candidates:
            edges = uniq
            break
        x, y = rng.choice(candidates) if rng else candidates[0]
        parent[find(y)] = find(x)
    # renumber surviving vertices densely
    roots = sorted({find(v) for v in range(num_vertices)})
    return len(roots), edges, find(0)


def stallings_fold(words: Sequence[Word], rng: random.Random | None = None) -> LabelledGraph:
    """Folded graph of the subgroup generated by ``words``; rank = 1 - chi."""
    g, _ = petal_graph(list(words))
    _, edges, base = _union_find_fold(g.num_vertices, list(g.edges), rng)
    used = sorted({base} | {v for e in edges for v in (e.src, e.dst)})
    index = {v: i for i, v in enumerate(used)}
    return LabelledGraph(
        g.rank, len(used), tuple(Edge(index[e.src], index[e.dst], e.label) for e in edges), index[base]
    )


def subgroup_rank(words: Sequence[Word]) -> int:
    return 1 - euler_characteristic(stallings_fold(words))


def is_deterministic(g: LabelledGraph) -> bool:
    out = Counter((e.src, e.label) for e in g.edges)
    inn = Counter((e.dst, e.label) for e in g.edges)
    return all(c == 1 for c in out.values()) and all(c == 1 for c in inn.values())


def canonical_form(g: LabelledGraph) -> tuple:
    """Label-respecting isomorphism invariant rooted at the basepoint.

    Vertices are renumbered in breadth-first order (out-edges by label, then
    in-edges by label). Complete for graphs with at most one out-edge and one
    in-edge per (vertex, label), which is what folding produces.
    """
    if not is_deterministic(g):
        raise ValueError("canonical_form needs a folded (deterministic) graph")
    out: dict[int, list[Edge]] = {}
    for e in g.edges:
        out.setdefault(e.src, []).append(e)
        out.setdefault(e.dst, []).append(e)
    num = {g.basepoint: 0}
    queue = deque([g.basepoint])
    while queue:
        v = queue.popleft()
        steps = sorted(
            ((0 if e.src == v else 1, e.label, e.dst if e.src == v else e.src) for e in out.get(v, [])),
            key=lambda s: (s[1], s[0]),
        )
        for _, _, x in steps:
            if x not in num:
                num[x] = len(num)
                queue.append(x)
    if len(num) != g.num_vertices:
        raise InvalidGraph("graph is not connected")
    return (g.rank, g.num_vertices, tuple(sorted((num[e.src], num[e.dst], e.label) for e in g.edges)))


def carried_count_bound(g: LabelledGraph, n: int) -> tuple[int, Fraction]:
    """Upper bound on |{phi : g carries phi}| and the matching constant C.

    The bound is n!/(n-|V|)! * prod_l (n - |E_l|)!; C is the smallest constant
    with bound / (n!)^m <= C * n^chi(g) at this n. Returns (0, 0) when no
    injective labelling exists.
    """
    nv = g.num_vertices
    sizes = [len(g.edges_with_label(l)) for l in range(1, g.rank + 1)]
    if n < nv or any(s > n for s in sizes):
        return 0, Fraction(0)
    bound = math.perm(n, nv)
    for s in sizes:
        bound *= math.factorial(n - s)
    chi = euler_characteristic(g)
    ratio = Fraction(bound, math.factorial(n) ** g.rank)
    return bound, ratio / Fraction(n) ** chi


def _spanning_steps(g: LabelledGraph) -> tuple[list[tuple[int, int, int, int]], list[Edge]]:
    # BFS tree from vertex 0 as (parent, child, label-1, direction); rest are checks
    adj: list[list[tuple[int, int, int, int]]] = [[] for _ in range(g.num_vertices)]
    for i, e in enumerate(g.edges):
        adj[e.src].append((i, e.dst, e.label - 1, 1))
        adj[e.dst].append((i, e.src, e.label - 1, -1))
    seen = {0}
    tree_ids = set()
    steps = []
    queue = deque([0])
    while queue:
        v = queue.popleft()
        for i, x, l, d in adj[v]:
            if x not in seen:
                seen.add(x)
                tree_ids.add(i)
                steps.append((v, x, l, d))
                queue.append(x)
    others = [e for i, e in enumerate(g.edges) if i not in tree_ids]
    return steps, others


def carried_count_exact(g: LabelledGraph, n: int, budget: int = DEFAULT_BUDGET) -> int:
    """Number of phi in Hom_{m,n} carried by g, by sweeping all of Hom_{m,n}.

    Every (phi, seed label of vertex 0) pair is propagated along a spanning
    tree; phi counts if some seed gives an injective labelling that satisfies
    the remaining edges.
    """
    from .batch import hom_blocks

    if not is_valid(g):
        raise InvalidGraph("carried_count_exact needs a VALID graph")
    if n < g.num_vertices:
        return 0
    steps, others = _spanning_steps(g)
    total = 0
    for images, inverses in hom_blocks(g.rank, n, budget):
        b = images.shape[0]
        rows = np.arange(b)
        ok = np.zeros(b, dtype=bool)
        for c in range(n):
            f = np.empty((b, g.num_vertices), dtype=np.int64)
            f[:, 0] = c
            for v, x, l, d in steps:
                table = images[:, l] if d > 0 else inverses[:, l]
                f[:, x] = table[rows, f[:, v]]
            good = np.ones(b, dtype=bool)
            for e in others:
                good &= images[:, e.label - 1][rows, f[:, e.src]] == f[:, e.dst]
            if g.num_vertices > 1:
                srt = np.sort(f, axis=1)
                good &= (srt[:, 1:] != srt[:, :-1]).all(axis=1)
            ok |= good
        total += int(ok.sum())
    return total


def carried_count_bruteforce(g: LabelledGraph, n: int, budget: int = DEFAULT_BUDGET) -> int:
    """Reference count running ``carries`` on every homomorphism."""
    from .homspace import enumerate_homs

    return sum(carries(g, phi) is not None for phi in enumerate_homs(g.rank, n, budget))


def _iso_key(num_vertices: int, edges: Sequence[Edge]) -> tuple:
    # brute force over vertex renamings; fine for the handful of vertices used here
    best = None
    for perm in itertools.permutations(range(num_vertices)):
        key = tuple(sorted((perm[e.src], perm[e.dst], e.label) for e in edges))
        if best is None or key < best:
            best = key
    return (num_vertices, best)


def enumerate_valid_graphs(max_edges: int, rank: int) -> list[LabelledGraph]:
    """One representative per isomorphism class of VALID graphs with <= max_edges edges.

    Grows graphs one edge at a time; every connected graph has an edge whose
    removal leaves a connected graph, possibly plus an isolated vertex.
    """
    level = {_iso_key(1, ()): LabelledGraph(rank, 1, ())}
    found = dict(level)
    for _ in range(max_edges):
        nxt: dict[tuple, LabelledGraph] = {}
        for g in level.values():
            nv = g.num_vertices
            present = set(g.edges)
            for src in range(nv + 1):
                for dst in range(nv + 1):
                    if src == nv and dst == nv:
                        continue
                    for label in range(1, rank + 1):
                        e = Edge(src, dst, label)
                        if e in present:
                            continue
                        size = nv + (src == nv or dst == nv)
                        edges = g.edges + (e,)
                        key = _iso_key(size, edges)
                        if key not in nxt:
                            nxt[key] = LabelledGraph(rank, size, edges)
        found.update(nxt)
        level = nxt
    return list(found.values())
