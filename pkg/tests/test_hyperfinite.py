import json
import random
from fractions import Fraction

import pytest

from graphseq import (
    CoveringFamily,
    Partition,
    PartitionError,
    box_partition,
    build_graph,
    connected_components,
    covering_cut_bound,
    edge_boundary_size,
    min_small_set_expansion,
    partition_from_covering,
    tree_partition,
    validate_partition,
)
from graphseq.sequences import cycle_graph, path_graph, torus_graph, torus_coordinates

from oracles import (
    connected_min_expansion_naive,
    powerset_min_expansion,
    random_connected_graph,
    random_tree_pairs,
)


def blocks_connected(G, partition):
    for block in partition.blocks():
        inside = set(block)
        seen = {block[0]}
        stack = [block[0]]
        while stack:
            x = stack.pop()
            for y, _, _ in G.adjacency[x]:
                if y in inside and y not in seen:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != len(block):
            return False
    return True


def test_tree_partition_p12():
    P = path_graph(12)
    part = tree_partition(P, 3)
    assert part.block_count == 4
    assert len(part.cut_edge_ids) == 3
    assert part.cut_ratio == Fraction(1, 4) <= Fraction(1, 3)
    assert blocks_connected(P, part)


def test_tree_partition_star_and_wide_q():
    star = build_graph(6, [(0, i) for i in range(1, 6)])
    part = tree_partition(star, 2)
    assert part.block_count == 1 and len(part.cut_edge_ids) == 0
    P = path_graph(9)
    part = tree_partition(P, 9)  # q beyond the diameter: one block
    assert part.block_count == 1 and part.cut_ratio == 0


def test_tree_partition_rejects_non_trees():
    with pytest.raises(PartitionError, match="not a tree"):
        tree_partition(cycle_graph(5), 2)
    with pytest.raises(PartitionError, match="not a tree"):
        tree_partition(build_graph(4, [(0, 1), (2, 3)]), 2)


def test_tree_partition_random_trees():
    rng = random.Random(99)
    for _ in range(40):
        n = rng.randint(20, 400)
        T = build_graph(n, random_tree_pairs(n, rng))
        for q in (2, 4, 8, 16):
            part = tree_partition(T, q)
            # on a tree each block is a subtree, so cut = blocks - 1
            assert len(part.cut_edge_ids) == part.block_count - 1
            assert blocks_connected(T, part)


def test_box_partition():
    T8 = torus_graph(8)
    coords = torus_coordinates(8)
    part = box_partition(T8, coords, 8)
    assert part.block_count == 1 and part.cut_ratio == 0
    part4 = box_partition(T8, coords, 4)
    assert part4.block_count == 4
    assert part4.max_block_size == 16
    assert part4.cut_ratio == Fraction(1, 2)
    # oracle: count crossing edges directly
    crossing = sum(
        1 for (u, v) in T8.edges
        if (coords[u][0] // 4, coords[u][1] // 4) != (coords[v][0] // 4, coords[v][1] // 4)
    )
    assert crossing == 2 * 64 // 4 == len(part4.cut_edge_ids)
    T16 = torus_graph(16)
    part16 = box_partition(T16, torus_coordinates(16), 8)
    assert part16.cut_ratio == Fraction(1, 4)
    with pytest.raises(PartitionError, match="divide"):
        box_partition(T8, coords, 3)


def test_validate_partition():
    Cn = cycle_graph(10)
    singletons = Partition.from_assignment(Cn, list(range(10)))
    v = validate_partition(Cn, singletons, Fraction(2), 1)
    assert v.passed and v.cut_ratio == 1
    T16 = torus_graph(16)
    part = box_partition(T16, torus_coordinates(16), 8)
    assert validate_partition(T16, part, Fraction(1, 4), 64).passed
    assert not validate_partition(T16, part, Fraction(1, 5), 64).passed
    assert not validate_partition(T16, part, Fraction(1, 4), 63).passed


def test_partition_from_assignment_recomputes():
    G = cycle_graph(6)
    part = Partition.from_assignment(G, [0, 0, 0, 1, 1, 1])
    assert part.block_count == 2
    assert part.max_block_size == 3
    assert len(part.cut_edge_ids) == 2
    assert part.cut_ratio == Fraction(2, 6)
    # sparse labels are relabelled densely
    part2 = Partition.from_assignment(G, [5, 5, 5, 9, 9, 9])
    assert part2.assignment == part.assignment


def test_covering_family_ingest_measured():
    T16 = torus_graph(16)
    boxes = []
    for bi in range(2):
        for bj in range(2):
            boxes.append([
                (8 * bi + i) * 16 + (8 * bj + j)
                for i in range(8) for j in range(8)
            ])
    fam = CoveringFamily.ingest(T16, boxes)
    assert fam.coverage_fraction == 1
    assert fam.size_cap == 64
    # disjoint full cover: the slack is the boundary term 32/64
    assert fam.omega == Fraction(1, 2)


def test_covering_family_rejections():
    T8 = torus_graph(8)
    small = [[0, 1], [1, 2]]
    with pytest.raises(PartitionError, match="private-fraction"):
        CoveringFamily.ingest(T8, small, omega=Fraction(1, 4))
    with pytest.raises(PartitionError, match="size"):
        CoveringFamily.ingest(
            T8, [list(range(64))], omega=Fraction(1, 2), size_cap=10
        )
    with pytest.raises(PartitionError, match="empty"):
        CoveringFamily.ingest(T8, [])
    # sets individually fine but covering too little
    T16 = torus_graph(16)
    one_box = [[(i * 16 + j) for i in range(8) for j in range(8)]]
    with pytest.raises(PartitionError, match="coverage"):
        CoveringFamily.ingest(T16, one_box, omega=Fraction(1, 2))


def test_partition_from_covering_disjoint_boxes_reproduces_box_partition():
    T16 = torus_graph(16)
    boxes = []
    for bi in range(2):
        for bj in range(2):
            boxes.append([
                (8 * bi + i) * 16 + (8 * bj + j)
                for i in range(8) for j in range(8)
            ])
    fam = CoveringFamily.ingest(T16, boxes)
    result = partition_from_covering(T16, fam)
    expected = box_partition(T16, torus_coordinates(16), 8)
    assert set(map(frozenset, result.partition.blocks())) == set(
        map(frozenset, expected.blocks())
    )
    assert result.partition.cut_ratio <= result.cut_bound


def test_partition_from_covering_overlapping():
    T16 = torus_graph(16)
    subsets = []
    for bi in range(4):
        for bj in range(4):
            subsets.append(sorted(
                ((4 * bi + i) % 16) * 16 + ((4 * bj + j) % 16)
                for i in range(6) for j in range(6)
            ))
    fam = CoveringFamily.ingest(T16, subsets)
    assert fam.omega < 1
    result = partition_from_covering(T16, fam)
    part = result.partition
    assert part.max_block_size <= fam.size_cap
    assert part.cut_ratio <= result.cut_bound
    assert part.cut_ratio <= covering_cut_bound(T16, fam.omega)
    # blocks partition the vertex set exactly
    assert sorted(v for b in part.blocks() for v in b) == list(range(256))


def test_expansion_cycle():
    C = cycle_graph(12)
    rep = min_small_set_expansion(C, 3)
    assert rep.delta == Fraction(2, 3)
    assert rep.argmin == (0, 1, 2)
    oracle = powerset_min_expansion(cycle_graph(8), 3)
    assert oracle == Fraction(2, 3)


def test_expansion_connected_restriction_sound():
    rng = random.Random(77)
    for _ in range(12):
        n, pairs = random_connected_graph(rng, max_vertices=9)
        G = build_graph(n, pairs)
        for m in (2, 3, n):
            mine = min_small_set_expansion(G, m, cap=max(10, m))
            assert mine.delta == powerset_min_expansion(G, m)
            assert mine.delta == connected_min_expansion_naive(G, m)


def test_expansion_argmin_is_witness():
    T = torus_graph(8)
    rep = min_small_set_expansion(T, 4)
    assert rep.delta == 2
    boundary = edge_boundary_size(T, rep.argmin)
    assert Fraction(boundary, len(rep.argmin)) == rep.delta
    assert rep.sets_examined > 0


def test_expansion_caps():
    with pytest.raises(PartitionError, match="cap"):
        min_small_set_expansion(cycle_graph(6), 12)
    with pytest.raises(PartitionError, match="vertices"):
        min_small_set_expansion(cycle_graph(20), 3, vertex_cap=10)


def test_partition_json_roundtrip():
    G = cycle_graph(6)
    part = Partition.from_assignment(G, [0, 0, 1, 1, 2, 2])
    data = part.to_jsonable()
    assert data["block_count"] == 3
    assert json.loads(json.dumps(data)) == data
