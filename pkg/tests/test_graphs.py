import io
import math
import random

import pytest

from graphseq import (
    GraphError,
    bfs_distance,
    build_graph,
    connected_components,
    domination_constant,
    girth,
    graph_union,
    max_q_net,
    read_edge_list,
    spanning_forest,
    write_edge_list,
)
from graphseq.graphs import INFINITE, domination_detail
from graphseq.sequences import cycle_graph, complete_graph, path_graph, torus_graph

from oracles import bfs_oracle, all_cycles_by_edge_subsets, random_connected_graph


def petersen():
    edges = [(i, (i + 1) % 5) for i in range(5)]
    edges += [(i, i + 5) for i in range(5)]
    edges += [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return build_graph(10, edges)


def test_build_triangle():
    G = build_graph(3, [(0, 1), (1, 2), (2, 0)])
    assert G.edge_count == 3
    assert G.max_degree == 2
    assert G.edges[2] == (0, 2)  # orientation low -> high
    # adjacency carries each edge twice with opposite signs
    signs = {}
    for v in range(3):
        for y, eid, sign in G.adjacency[v]:
            signs.setdefault(eid, []).append(sign)
    assert all(sorted(s) == [-1, 1] for s in signs.values())


def test_build_rejections():
    with pytest.raises(GraphError, match="edge 0.*loop"):
        build_graph(3, [(1, 1)])
    with pytest.raises(GraphError, match="edge 2.*duplicate"):
        build_graph(3, [(0, 1), (1, 2), (1, 0)])
    with pytest.raises(GraphError, match="edge 1.*out of range"):
        build_graph(3, [(0, 1), (0, 3)])


def test_torus_edge_count_oracle():
    # count 2n^2 edges by direct enumeration of lattice steps
    for n in (3, 4, 5):
        G = torus_graph(n)
        steps = set()
        for i in range(n):
            for j in range(n):
                for di, dj in ((0, 1), (1, 0)):
                    a = i * n + j
                    b = ((i + di) % n) * n + (j + dj) % n
                    steps.add((min(a, b), max(a, b)))
        assert G.edge_count == len(steps) == 2 * n * n
        assert G.max_degree == 4


def test_bfs_distance_examples():
    tri = build_graph(3, [(0, 1), (1, 2), (2, 0)])
    assert bfs_distance(tri, 0, 5) == {0: 0, 1: 1, 2: 1}
    P4 = path_graph(4)
    assert bfs_distance(P4, 0, 2) == {0: 0, 1: 1, 2: 2}


def test_bfs_distance_torus8_oracle():
    G = torus_graph(8)
    dist = bfs_distance(G, 0, 8)
    # (4,4) has id 4*8+4; l1 metric on the torus
    assert dist[4 * 8 + 4] == 8
    oracle = bfs_oracle(G, 0)
    assert dist == {v: d for v, d in oracle.items() if d <= 8}


def test_girth():
    assert girth(path_graph(6)) == INFINITE
    assert girth(build_graph(3, [(0, 1), (1, 2), (2, 0)])) == 3
    assert girth(petersen()) == 5
    # oracle: shortest cycle among all edge subsets
    cyc = all_cycles_by_edge_subsets(petersen())
    assert min(len(c) for c in cyc) == 5


def test_spanning_forest():
    tri = build_graph(3, [(0, 1), (1, 2), (2, 0)])
    assert len(spanning_forest(tri)) == 2
    P = path_graph(7)
    assert spanning_forest(P) == set(range(6))
    T = torus_graph(4)
    assert len(spanning_forest(T)) == 15


def test_spanning_forest_acyclic_union_find():
    rng = random.Random(7)
    for _ in range(25):
        n, pairs = random_connected_graph(rng)
        G = build_graph(n, pairs)
        forest = spanning_forest(G)
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for eid in sorted(forest):
            u, v = G.edges[eid]
            ru, rv = find(u), find(v)
            assert ru != rv  # acyclic
            parent[ru] = rv
        comps = connected_components(G)
        assert len(forest) == n - len(comps)
        # forest spans each component
        roots = {find(v) for v in range(n)}
        assert len(roots) == len(comps)


def test_graph_union():
    tri = build_graph(3, [(0, 1), (1, 2), (2, 0)])
    assert set(graph_union(tri, tri).edges) == set(tri.edges)
    C4 = cycle_graph(4)
    diags = build_graph(4, [(0, 2), (1, 3)])
    K4 = graph_union(C4, diags)
    assert set(K4.edges) == set(complete_graph(4).edges)
    # union ids: first graph's edges keep their positions
    assert K4.edges[: C4.edge_count] == C4.edges


def test_graph_union_torus_diagonals():
    n = 4
    T = torus_graph(n)
    diag_pairs = set()
    for i in range(n):
        for j in range(n):
            a = i * n + j
            for di, dj in ((1, 1), (1, n - 1)):
                b = ((i + di) % n) * n + (j + dj) % n
                diag_pairs.add((min(a, b), max(a, b)))
    D = build_graph(n * n, sorted(diag_pairs))
    U = graph_union(T, D)
    assert U.edge_count == 4 * n * n
    assert U.max_degree == 8
    with pytest.raises(GraphError, match="mismatch"):
        graph_union(T, torus_graph(5))


def test_domination_constant():
    T = torus_graph(5)
    assert domination_constant(T, T) == 1
    # subgraph: distances in the larger graph can only shrink
    sub = build_graph(25, T.edges[:40])
    assert domination_constant(T, sub) == 1
    # C10 minus one edge: deleted edge spans a 9-path
    C10 = cycle_graph(10)
    P = build_graph(10, C10.edges[:9])
    assert domination_constant(P, C10) == 9
    assert bfs_oracle(P, 0)[9] == 9
    # disconnection
    E0 = build_graph(10, [])
    L, edge = domination_detail(E0, C10)
    assert L == INFINITE and edge is not None


def test_domination_triangle_inequality_all_pairs():
    rng = random.Random(11)
    for _ in range(10):
        n, pairs = random_connected_graph(rng, max_vertices=10)
        G = build_graph(n, pairs)
        H = build_graph(n, [p for i, p in enumerate(pairs) if i % 3 != 0 or i < n])
        L = domination_constant(G, H)
        if L == INFINITE:
            continue
        for x in range(n):
            dg = bfs_oracle(G, x)
            dh = bfs_oracle(H, x)
            for y, dhy in dh.items():
                assert dg[y] <= L * dhy


def test_max_q_net():
    P12 = path_graph(12)
    assert max_q_net(P12, 3) == [0, 3, 6, 9]
    C6 = cycle_graph(6)
    assert max_q_net(C6, 3) == [0, 3]
    G = torus_graph(4)
    assert max_q_net(G, 1) == list(range(16))
    with pytest.raises(GraphError, match="connected"):
        max_q_net(build_graph(4, [(0, 1), (2, 3)]), 2)


def test_max_q_net_axioms_random():
    rng = random.Random(5)
    for _ in range(15):
        n, pairs = random_connected_graph(rng, max_vertices=20, max_degree=5)
        G = build_graph(n, pairs)
        for q in (2, 3, 4):
            net = max_q_net(G, q)
            dists = {v: bfs_oracle(G, v) for v in net}
            for i, x in enumerate(net):
                for y in net[i + 1:]:
                    assert dists[x][y] >= q
            for z in range(n):
                assert min(d[z] for d in dists.values()) <= q


def test_edge_list_roundtrip_and_errors():
    G = torus_graph(3)
    buf = io.StringIO()
    write_edge_list(G, buf)
    buf.seek(0)
    H = read_edge_list(buf)
    assert H.edges == G.edges and H.vertex_count == G.vertex_count
    with pytest.raises(GraphError, match="line 1"):
        read_edge_list(io.StringIO("nonsense\n"))
    with pytest.raises(GraphError, match="line 3"):
        read_edge_list(io.StringIO("3 3\n0 1\n1 2 9\n2 0\n"))
    with pytest.raises(GraphError, match="line 2"):
        read_edge_list(io.StringIO("3 1\n0 x\n"))
    with pytest.raises(GraphError, match="expected 1 edges"):
        read_edge_list(io.StringIO("3 1\n"))
