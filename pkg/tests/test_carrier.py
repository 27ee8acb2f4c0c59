import itertools
import math
import random
from collections import Counter
from fractions import Fraction

import pytest

from tanglefree.carrier import (
    CarrierResult,
    Edge,
    FoldError,
    InvalidGraph,
    LabelledGraph,
    build_carrier,
    canonical_form,
    carried_count_bound,
    carried_count_bruteforce,
    carried_count_exact,
    carries,
    dedup_fold,
    enumerate_valid_graphs,
    euler_characteristic,
    is_f_compatible,
    is_valid,
    quotient_by_labels,
    stallings_fold,
    subgroup_rank,
)
from tanglefree.freegroup import distinct_powers_check, parse_word, random_word
from tanglefree.homspace import enumerate_homs, evaluate, hom_from_cycles, is_tangled, sample_hom
from tanglefree.perm import Permutation, stream

# carrier edges of the worked example, written as (f(src), f(dst), label)
EXAMPLE_EDGES = Counter([
    (1, 7, 2), (7, 6, 1), (5, 6, 2), (1, 5, 1),
    (1, 9, 3), (6, 9, 2), (6, 8, 1), (5, 8, 3), (1, 5, 1),
])

LOOP = LabelledGraph(1, 1, [(0, 0, 1)])


def labelled_edges(g, f):
    return Counter((f[e.src], f[e.dst], e.label) for e in g.edges)


@pytest.fixture
def example_carrier(example_phi, example_words):
    return build_carrier(*example_words, example_phi, 1)


@pytest.fixture
def example_g1(example_carrier):
    q, labels = quotient_by_labels(example_carrier)
    return dedup_fold(q), labels


def test_is_valid_examples(example_g1):
    assert is_valid(LOOP)
    assert not is_valid(LabelledGraph(1, 2, [(0, 1, 1), (0, 1, 1)]))
    assert not is_valid(LabelledGraph(1, 2, []))
    assert is_valid(example_g1[0])


def test_graph_rejects_bad_labels():
    with pytest.raises(InvalidGraph):
        LabelledGraph(1, 1, [(0, 0, 2)])
    with pytest.raises(InvalidGraph):
        LabelledGraph(1, 1, [(0, 1, 1)])


def test_build_carrier_worked_example(example_carrier, example_phi):
    g, f = example_carrier.graph, example_carrier.labelling
    assert (g.num_vertices, len(g.edges), euler_characteristic(g)) == (8, 9, -1)
    assert labelled_edges(g, f) == EXAMPLE_EDGES
    petal1, petal2 = example_carrier.petal_edges
    assert {f[v] for i in petal1 for v in g.edges[i][:2]} == {1, 5, 6, 7}
    assert {f[v] for i in petal2 for v in g.edges[i][:2]} == {1, 5, 8, 6, 9}
    assert f[0] == 1
    assert is_f_compatible(g, f, example_phi)
    # first step of w1 from v0 is the label-2 edge 1 -> 7
    first = g.edges[petal1[0]]
    assert (f[first.src], f[first.dst], first.label) == (1, 7, 2)


def test_build_carrier_small_cases():
    a = parse_word("a", 1)
    res = build_carrier(a, a, hom_from_cycles(["()"], 2), 1)
    assert len(res.graph.edges) == 2 and res.graph.num_vertices == 1
    assert res.graph.edges == (Edge(0, 0, 1), Edge(0, 0, 1)) and res.labelling == (1,)

    ab, ba = parse_word("a b", 2), parse_word("b a", 2)
    phi = hom_from_cycles(["()", "()"], 3)
    res = build_carrier(ab, ba, phi, 2)
    g = res.graph
    assert (len(g.edges), g.num_vertices, euler_characteristic(g)) == (4, 3, -1)
    # petals meet only at v0
    p1 = {v for i in res.petal_edges[0] for v in g.edges[i][:2]}
    p2 = {v for i in res.petal_edges[1] for v in g.edges[i][:2]}
    assert p1 & p2 == {0}


def test_build_carrier_needs_common_fixed_point(example_phi, example_words):
    with pytest.raises(ValueError):
        build_carrier(*example_words, example_phi, 2)


def test_f_compatibility(example_carrier, example_phi):
    g, f = example_carrier.graph, list(example_carrier.labelling)

    def oracle(labels):
        return all(example_phi.images[e.label - 1](labels[e.src]) == labels[e.dst] for e in g.edges)

    for v in range(g.num_vertices):
        for x in range(1, 10):
            if x == f[v]:
                continue
            bad = f.copy()
            bad[v] = x
            assert is_f_compatible(g, bad, example_phi) == oracle(bad) is False
    phi = hom_from_cycles(["(12)"], 2)
    assert is_f_compatible(LabelledGraph(1, 1), [2], phi)


def test_quotient_worked_example(example_carrier, example_phi):
    q, labels = quotient_by_labels(example_carrier)
    assert sorted(labels) == [1, 5, 6, 7, 8, 9]
    assert (q.num_vertices, len(q.edges), euler_characteristic(q)) == (6, 9, -3)
    assert q.state == "PREFOLDED"
    assert labelled_edges(q, labels) == EXAMPLE_EDGES
    assert is_f_compatible(q, labels, example_phi)


def test_dedup_fold_worked_example(example_g1, example_phi):
    g1, labels = example_g1
    assert (g1.num_vertices, len(g1.edges), euler_characteristic(g1)) == (6, 8, -2)
    assert set(labelled_edges(g1, labels)) == set(EXAMPLE_EDGES)
    assert [len(g1.edges_with_label(l)) for l in (1, 2, 3)] == [3, 3, 2]
    f1 = carries(g1, example_phi)
    assert f1 is not None and is_f_compatible(g1, f1, example_phi)
    assert f1 == labels


def test_dedup_fold_small():
    assert dedup_fold(LOOP) == LOOP
    triple = LabelledGraph(1, 2, [(0, 1, 1)] * 3)
    assert dedup_fold(triple).edges == (Edge(0, 1, 1),)
    with pytest.raises(FoldError):
        dedup_fold(LabelledGraph(1, 3, [(0, 1, 1), (0, 2, 1)]))


def test_quotient_of_injective_carrier_is_isomorphic():
    ab, ba = parse_word("a b", 2), parse_word("b a", 2)
    phi = hom_from_cycles(["(123)", "(132)"], 3)
    res = build_carrier(ab, ba, phi, 1)
    assert len(set(res.labelling)) == res.graph.num_vertices
    q, _ = quotient_by_labels(res)
    assert canonical_form(q) == canonical_form(res.graph)


def test_euler_characteristic_examples(example_carrier, example_g1):
    assert euler_characteristic(LabelledGraph(1, 1)) == 1
    assert euler_characteristic(example_carrier.graph) == -1
    assert euler_characteristic(example_g1[0]) == -2


def test_carries_examples(example_g1, example_phi):
    assert carries(LOOP, hom_from_cycles(["(12)"], 3)) == (3,)
    assert carries(LOOP, hom_from_cycles(["(123)"], 3)) is None
    with pytest.raises(InvalidGraph):
        carries(LabelledGraph(1, 2, [(0, 1, 1), (0, 1, 1)]), hom_from_cycles(["()"], 2))


def test_carries_matches_exhaustive_labelling_search():
    rng = random.Random(4)
    graphs = enumerate_valid_graphs(3, 2)
    for g in rng.sample(graphs, 40):
        for i in range(10):
            phi = sample_hom(stream(i), 2, rng.randint(1, 4))
            found = carries(g, phi)
            oracle = any(
                is_f_compatible(g, f, phi)
                for f in itertools.permutations(range(1, phi.degree + 1), g.num_vertices)
            )
            assert (found is not None) == oracle
            if found is not None:
                assert len(set(found)) == len(found) and is_f_compatible(g, found, phi)


def test_stallings_examples(example_words):
    a, b = parse_word("a", 2), parse_word("b", 2)
    rose = stallings_fold([a, b])
    assert rose.num_vertices == 1 and len(rose.edges) == 2 and subgroup_rank([a, b]) == 2
    cyc = stallings_fold([parse_word("a b", 2), parse_word("a b a b", 2)])
    assert (cyc.num_vertices, len(cyc.edges)) == (2, 2)
    assert subgroup_rank([parse_word("a b", 2), parse_word("a b a b", 2)]) == 1
    assert subgroup_rank(list(example_words)) == 2


def test_stallings_rank_matches_commutator_test():
    rng = random.Random(2)
    for _ in range(500):
        m = rng.randint(1, 3)
        w1, w2 = random_word(rng, m, 6), random_word(rng, m, 6)
        assert (subgroup_rank([w1, w2]) == 2) == distinct_powers_check(w1, w2)


def test_stallings_fold_is_folded_and_order_independent():
    rng = random.Random(9)
    for _ in range(50):
        words = [random_word(rng, 2, 6) for _ in range(rng.randint(1, 3))]
        ref = canonical_form(stallings_fold(words))
        for s in range(10):
            assert canonical_form(stallings_fold(words, random.Random(s))) == ref


def test_count_bound_examples(example_g1):
    assert carried_count_bound(LOOP, 3) == (6, Fraction(6, 6) / Fraction(3) ** 0)
    path = LabelledGraph(1, 3, [(0, 1, 1), (1, 2, 1)])
    bound, _ = carried_count_bound(path, 5)
    assert bound == 60 * math.factorial(3)
    g1 = example_g1[0]
    bound, C = carried_count_bound(g1, 6)
    assert bound == 720 * 6 * 6 * 24
    assert Fraction(bound, math.factorial(6) ** 3) == C * Fraction(1, 6 ** 2)
    assert carried_count_bound(LabelledGraph(1, 4, [(0, 1, 1), (1, 2, 1), (2, 3, 1)]), 3) == (0, 0)


def test_count_exact_examples():
    # oracle: permutations of Sym_3 with a fixed point
    with_fixed = sum(1 for p in itertools.permutations(range(3)) if any(p[i] == i for i in range(3)))
    assert carried_count_exact(LOOP, 3) == with_fixed == 4
    assert carried_count_exact(LabelledGraph(1, 3, [(0, 1, 1), (1, 2, 1)]), 2) == 0
    edge = LabelledGraph(1, 2, [(0, 1, 1)])
    oracle = sum(p[0] != 0 or p[1] != 1 for p in itertools.permutations(range(2)))
    assert carried_count_exact(edge, 2) == carried_count_bruteforce(edge, 2) == oracle == 1


def test_count_exact_vectorized_matches_carries():
    rng = random.Random(1)
    graphs = enumerate_valid_graphs(3, 2)
    for g in rng.sample(graphs, 25):
        for n in (1, 2, 3):
            assert carried_count_exact(g, n) == carried_count_bruteforce(g, n)


def test_roundtrip_carrier_quotient_fold():
    rng = random.Random(17)
    done = 0
    i = 0
    while done < 100:
        i += 1
        n = rng.randint(2, 8)
        phi = sample_hom(stream(i), 2, n)
        w1, w2 = random_word(rng, 2, 5), random_word(rng, 2, 5)
        rep = is_tangled(phi, w1, w2, 2)
        if rep is None:
            continue
        res = build_carrier(w1, w2, phi, rep.witness_point)
        assert is_f_compatible(res.graph, res.labelling, phi)
        q, labels = quotient_by_labels(res)
        g1 = dedup_fold(q)
        assert is_valid(g1) and is_f_compatible(g1, labels, phi)
        assert len(set(labels)) == len(labels)
        assert carries(g1, phi) is not None
        done += 1


def test_enumerate_valid_graphs_small():
    # rank 1, <= 1 edge: single vertex, loop, one edge between two vertices
    assert len(enumerate_valid_graphs(1, 1)) == 3
    gs = enumerate_valid_graphs(2, 1)
    assert all(is_valid(g) for g in gs)
    keys = {canonical_key(g) for g in gs}
    assert len(keys) == len(gs)


def canonical_key(g):
    best = None
    for perm in itertools.permutations(range(g.num_vertices)):
        key = tuple(sorted((perm[e.src], perm[e.dst], e.label) for e in g.edges))
        best = key if best is None or key < best else best
    return g.num_vertices, best


def test_graph_json_roundtrip(example_g1):
    g = example_g1[0]
    data = g.to_json()
    assert data["edges"] == sorted(data["edges"], key=lambda e: (e[2], e[0], e[1]))
    assert canonical_form(LabelledGraph.from_json(data)) == canonical_form(g)
