import random
from fractions import Fraction

import pytest

from graphseq import (
    CycleAccumulator,
    FieldSpec,
    GraphError,
    build_graph,
    cycle_rank,
    cycle_rank_profile,
    cyclomatic_number,
    enumerate_short_cycles,
    s_q,
    s_q_profile,
    walk_chain,
)
from graphseq.sequences import complete_graph, cycle_graph, path_graph, torus_graph

from oracles import (
    all_cycles_by_edge_subsets,
    dense_rank_fractions,
    dense_rank_modp,
    random_connected_graph,
)

Q = FieldSpec.rationals()


def test_fieldspec():
    assert FieldSpec.parse("Q").name == "Q"
    assert FieldSpec.parse("F7").p == 7
    with pytest.raises(GraphError, match="not a prime"):
        FieldSpec.prime(6)
    with pytest.raises(GraphError, match="unknown field"):
        FieldSpec.parse("R")


def test_enumeration_trivial_cases():
    assert list(enumerate_short_cycles(path_graph(8), 10)) == []
    tri = build_graph(3, [(0, 1), (1, 2), (2, 0)])
    cycles = list(enumerate_short_cycles(tri, 3))
    assert len(cycles) == 1 and cycles[0].length == 3
    assert list(enumerate_short_cycles(tri, 2)) == []


def test_enumeration_k4():
    K4 = complete_graph(4)
    cycles = list(enumerate_short_cycles(K4, 4))
    assert len(cycles) == 7  # 4 triangles + 3 quadrilaterals
    assert [c.length for c in cycles] == [3, 3, 3, 3, 4, 4, 4]
    oracle = all_cycles_by_edge_subsets(K4)
    assert len(oracle) == 7
    mine = {frozenset(e for e, _ in c.entries) for c in cycles}
    assert mine == oracle


def test_enumeration_completeness_random():
    # production enumeration equals the edge-subset oracle, all lengths
    rng = random.Random(23)
    done = 0
    while done < 12:
        n, pairs = random_connected_graph(rng, max_vertices=10)
        if len(pairs) > 17:
            continue
        done += 1
        G = build_graph(n, pairs)
        mine = {
            frozenset(e for e, _ in c.entries)
            for c in enumerate_short_cycles(G, n)
        }
        assert mine == all_cycles_by_edge_subsets(G)


def test_enumeration_canonical_and_ordered():
    G = torus_graph(4)
    seen = set()
    last_len = 0
    for c in enumerate_short_cycles(G, 6):
        assert c.length >= last_len  # nondecreasing lengths
        last_len = c.length
        key = tuple(c.entries)
        assert key not in seen  # exactly once
        seen.add(key)
        assert all(coef in (1, -1) for _, coef in c.entries)
        assert len(c.entries) == c.length


def test_boundary_zero():
    # every emitted vector is a closed chain: signed counts cancel vertexwise
    rng = random.Random(3)
    for _ in range(8):
        n, pairs = random_connected_graph(rng, max_vertices=9)
        G = build_graph(n, pairs)
        for c in enumerate_short_cycles(G, n):
            boundary = [0] * n
            for eid, coef in c.entries:
                u, v = G.edges[eid]
                boundary[u] -= coef  # edge oriented u -> v
                boundary[v] += coef
            assert all(b == 0 for b in boundary)


def test_cyclomatic_number():
    assert cyclomatic_number(path_graph(5)) == 0
    tri = build_graph(3, [(0, 1), (1, 2), (2, 0)])
    assert cyclomatic_number(tri) == 1
    two = build_graph(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)])
    assert cyclomatic_number(two) == 2


def test_full_space_rank_formula():
    rng = random.Random(41)
    for _ in range(15):
        n, pairs = random_connected_graph(rng)
        G = build_graph(n, pairs)
        expect = G.edge_count - n + 1
        for field in (Q, FieldSpec.prime(2), FieldSpec.prime(3)):
            assert cycle_rank(G, n, field) == expect


def test_high_girth_rank_zero():
    # girth above q means nothing to span
    G = petersen = build_graph(
        10,
        [(i, (i + 1) % 5) for i in range(5)]
        + [(i, i + 5) for i in range(5)]
        + [(5 + i, 5 + (i + 2) % 5) for i in range(5)],
    )
    assert cycle_rank(G, 4, Q) == 0


def test_torus_rank_against_dense_oracle():
    # n=4: the sixteen 4-cell contours plus eight straight wrap-around
    # cycles; the wrap-arounds add two independent classes
    G4 = torus_graph(4)
    vectors = [dict(c.entries) for c in enumerate_short_cycles(G4, 4)]
    assert len(vectors) == 16 + 8
    oracle = dense_rank_fractions(vectors, G4.edge_count)
    assert oracle == 17
    assert cycle_rank(G4, 4, Q) == oracle
    assert s_q(G4, 4, Q) == Fraction(32 - 17, 16) - 1 == Fraction(-1, 16)
    # n=5: only the twenty-five 4-cell contours exist at length 4
    G5 = torus_graph(5)
    vectors5 = [dict(c.entries) for c in enumerate_short_cycles(G5, 4)]
    assert len(vectors5) == 25
    assert dense_rank_fractions(vectors5, G5.edge_count) == 24
    assert cycle_rank(G5, 4, Q) == 24
    assert s_q(G5, 4, Q) == Fraction(1, 25)


def test_rank_matches_dense_oracle_random():
    rng = random.Random(97)
    for _ in range(10):
        n, pairs = random_connected_graph(rng, max_vertices=9)
        G = build_graph(n, pairs)
        vectors = [dict(c.entries) for c in enumerate_short_cycles(G, 6)]
        assert cycle_rank(G, 6, Q) == dense_rank_fractions(vectors, G.edge_count)
        for p in (2, 3, 5):
            assert cycle_rank(G, 6, FieldSpec.prime(p)) == dense_rank_modp(
                vectors, G.edge_count, p
            )


def test_monotone_in_q_and_field_comparison():
    rng = random.Random(13)
    for _ in range(100):
        n, pairs = random_connected_graph(rng, max_vertices=10)
        G = build_graph(n, pairs)
        prof_q = cycle_rank_profile(G, 8, Q)
        sq_q = s_q_profile(G, 8, Q)
        ranks = [prof_q[q] for q in range(3, 9)]
        assert ranks == sorted(ranks)  # nondecreasing rank
        values = [sq_q[q] for q in range(3, 9)]
        assert values == sorted(values, reverse=True)  # nonincreasing s_q
        for p in (2, 3, 5):
            prof_p = cycle_rank_profile(G, 8, FieldSpec.prime(p))
            for q in range(3, 9):
                assert prof_p[q] <= prof_q[q]
                sq_p = Fraction(G.edge_count - prof_p[q], n) - 1
                assert sq_q[q] <= sq_p


def test_s_q_examples():
    tri = build_graph(3, [(0, 1), (1, 2), (2, 0)])
    assert s_q(tri, 3, Q) == Fraction(-1, 3)


def test_accumulator_saturation_cap():
    G = complete_graph(5)
    cap = cyclomatic_number(G)
    acc = CycleAccumulator(Q, cap)
    added = 0
    for c in enumerate_short_cycles(G, 5):
        if acc.add(c):
            added += 1
        if acc.saturated:
            break
    assert added == acc.rank == cap == 6


def test_accumulator_general_integer_vectors():
    # relator-style chains with coefficients beyond +-1
    acc = CycleAccumulator(FieldSpec.prime(3), 5)
    assert acc.add({0: 3, 1: 1}) is True      # reduces to {1: 1}
    assert acc.add({1: 2}) is False           # dependent mod 3
    assert acc.add({0: 6, 1: 3}) is False     # the zero vector mod 3
    accq = CycleAccumulator(Q, 5)
    assert accq.add({0: 4, 1: 6}) is True     # stored gcd-normalised
    assert accq.add({0: 2, 1: 3}) is False


def test_walk_chain():
    G = cycle_graph(4)
    chain = walk_chain(G, [0, 1, 2, 3, 0])
    assert chain == {0: 1, 1: 1, 2: 1, 3: -1}
    # backtracking cancels
    assert walk_chain(G, [0, 1, 0]) == {}
    with pytest.raises(GraphError, match="non-edge"):
        walk_chain(G, [0, 2, 0])
    with pytest.raises(GraphError, match="same vertex"):
        walk_chain(G, [0, 1])
