"""Finite simple graphs with stable, oriented edge indexing.

Vertices are integers ``0..n-1``.  Every edge gets a stable id (its position
in the construction order) and a fixed orientation from its smaller endpoint
to its larger one; traversing an edge against that orientation carries sign
-1.  Graphs are immutable after construction and every function in this
module is pure, so distinct computations can safely run concurrently.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

INFINITE = math.inf


class GraphError(ValueError):
    """Rejected construction or violated operation precondition."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple graph.

    ``edges[i]`` is the pair ``(u, v)`` with ``u < v`` of edge id ``i``.
    ``adjacency[x]`` lists ``(neighbor, edge_id, sign)`` with ``sign = +1``
    when leaving ``x`` along the stored orientation (``x < neighbor``).
    """

    vertex_count: int
    edges: tuple
    adjacency: tuple
    max_degree: int
    _edge_index: dict = field(repr=False, default_factory=dict)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def edge_id(self, u: int, v: int):
        """Id of the edge {u, v}, or None if absent."""
        return self._edge_index.get((u, v) if u < v else (v, u))


@dataclass(frozen=True)
class EquivalenceWitness:
    """Distance-distortion constants between two graphs on shared vertices.

    ``forward`` is the least L with d_first(x, y) <= L * d_second(x, y) for
    all pairs, ``backward`` the least L for the opposite direction.  A value
    of INFINITE means some edge of one graph joins vertices that are
    disconnected in the other.  Finite constants are tight: each is realized
    by an edge of the dominating graph.
    """

    forward: float
    backward: float
    verified_indices: tuple = ()

    @property
    def both_finite(self) -> bool:
        return self.forward != INFINITE and self.backward != INFINITE


def build_graph(vertex_count: int, edge_pairs) -> Graph:
    """Build a simple graph, assigning edge ids in input order.

    Loops, duplicate edges and out-of-range endpoints are rejected with the
    index of the offending pair.
    """
    if vertex_count < 0:
        raise GraphError("vertex_count must be nonnegative")
    edges = []
    edge_index = {}
    adjacency = [[] for _ in range(vertex_count)]
    for i, (u, v) in enumerate(edge_pairs):
        if not (0 <= u < vertex_count and 0 <= v < vertex_count):
            raise GraphError(f"edge {i}: endpoint out of range: ({u}, {v})")
        if u == v:
            raise GraphError(f"edge {i}: loop at vertex {u}")
        lo, hi = (u, v) if u < v else (v, u)
        if (lo, hi) in edge_index:
            raise GraphError(f"edge {i}: duplicate of edge {edge_index[(lo, hi)]}: ({u}, {v})")
        eid = len(edges)
        edge_index[(lo, hi)] = eid
        edges.append((lo, hi))
        adjacency[lo].append((hi, eid, 1))
        adjacency[hi].append((lo, eid, -1))
    max_degree = max((len(a) for a in adjacency), default=0)
    return Graph(
        vertex_count=vertex_count,
        edges=tuple(edges),
        adjacency=tuple(tuple(a) for a in adjacency),
        max_degree=max_degree,
        _edge_index=edge_index,
    )


def read_edge_list(lines) -> Graph:
    """Parse the plain edge-list format: first line ``v m``, then m lines ``u w``.

    ``lines`` is an iterable of text lines (an open file works).  Malformed
    input is rejected with a 1-based line number.
    """
    it = iter(lines)
    try:
        header = next(it)
    except StopIteration:
        raise GraphError("line 1: missing header 'v m'") from None
    parts = header.split()
    if len(parts) != 2:
        raise GraphError(f"line 1: expected 'v m', got {header.strip()!r}")
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise GraphError(f"line 1: expected integers, got {header.strip()!r}") from None
    pairs = []
    lineno = 1
    for raw in it:
        lineno += 1
        if raw.strip() == "" and len(pairs) == m:
            continue  # tolerate trailing blank line
        parts = raw.split()
        if len(parts) != 2:
            raise GraphError(f"line {lineno}: expected 'u w', got {raw.strip()!r}")
        try:
            u, w = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphError(f"line {lineno}: expected integers, got {raw.strip()!r}") from None
        if len(pairs) == m:
            raise GraphError(f"line {lineno}: more than {m} edges")
        pairs.append((u, w))
    if len(pairs) != m:
        raise GraphError(f"line {lineno + 1}: expected {m} edges, got {len(pairs)}")
    try:
        return build_graph(n, pairs)
    except GraphError as exc:
        raise GraphError(f"edge list invalid: {exc}") from None


def read_edge_list_path(path) -> Graph:
    with open(path, "r", encoding="ascii") as fh:
        return read_edge_list(fh)


def write_edge_list(G: Graph, fh) -> None:
    fh.write(f"{G.vertex_count} {G.edge_count}\n")
    for u, v in G.edges:
        fh.write(f"{u} {v}\n")


def write_edge_list_path(G: Graph, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        write_edge_list(G, fh)


def bfs_distance(G: Graph, source: int, cap) -> dict:
    """Exact shortest-path distances from ``source``, omitting those > cap."""
    if not 0 <= source < G.vertex_count:
        raise GraphError(f"source {source} out of range")
    if cap < 0:
        raise GraphError("cap must be nonnegative")
    dist = {source: 0}
    queue = deque([source])
    adj = G.adjacency
    while queue:
        x = queue.popleft()
        d = dist[x]
        if d == cap:
            continue
        for y, _, _ in adj[x]:
            if y not in dist:
                dist[y] = d + 1
                queue.append(y)
    return dist


def _bfs_array(G: Graph, source: int):
    """Distance array with -1 for unreachable; internal, uncapped."""
    dist = [-1] * G.vertex_count
    dist[source] = 0
    queue = deque([source])
    adj = G.adjacency
    while queue:
        x = queue.popleft()
        d = dist[x] + 1
        for y, _, _ in adj[x]:
            if dist[y] < 0:
                dist[y] = d
                queue.append(y)
    return dist


def connected_components(G: Graph):
    """Vertex lists of the connected components, by ascending smallest id."""
    seen = [False] * G.vertex_count
    components = []
    for root in range(G.vertex_count):
        if seen[root]:
            continue
        seen[root] = True
        comp = [root]
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y, _, _ in G.adjacency[x]:
                if not seen[y]:
                    seen[y] = True
                    comp.append(y)
                    queue.append(y)
        components.append(comp)
    return components


def girth(G: Graph):
    """Length of a shortest cycle, or INFINITE for forests.

    One BFS per start vertex; each non-tree edge seen at depth d closes a
    cycle of length 2d+1 (same level) or 2d+2 (next level).  The running
    minimum bounds the BFS depth, so later scans are cheap.
    """
    best = INFINITE
    n = G.vertex_count
    adj = G.adjacency
    for root in range(n):
        depth = {root: 0}
        parent_edge = {root: -1}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            dx = depth[x]
            # a non-tree edge at depth dx closes a cycle of length >= 2*dx+1
            if 2 * dx + 1 >= best:
                break
            for y, eid, _ in adj[x]:
                if y not in depth:
                    depth[y] = dx + 1
                    parent_edge[y] = eid
                    queue.append(y)
                elif eid != parent_edge[x]:
                    length = dx + depth[y] + 1
                    if length < best:
                        best = length
        if best == 3:
            return 3
    return best


def spanning_forest(G: Graph) -> set:
    """Edge ids of a BFS spanning forest, rooted at each component's lowest id."""
    forest = set()
    seen = [False] * G.vertex_count
    for root in range(G.vertex_count):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y, eid, _ in G.adjacency[x]:
                if not seen[y]:
                    seen[y] = True
                    forest.add(eid)
                    queue.append(y)
    return forest


def graph_union(G: Graph, H: Graph) -> Graph:
    """Union of edge sets on a shared vertex set; G's edge ids come first."""
    if G.vertex_count != H.vertex_count:
        raise GraphError(
            f"vertex count mismatch: {G.vertex_count} != {H.vertex_count}"
        )
    pairs = list(G.edges)
    present = set(G.edges)
    for u, v in H.edges:
        key = (u, v) if u < v else (v, u)
        if key not in present:
            present.add(key)
            pairs.append(key)
    return build_graph(G.vertex_count, pairs)


def domination_detail(G: Graph, H: Graph):
    """(L, witness_edge): least L with every H-edge at G-distance <= L.

    By the triangle inequality this L satisfies d_G <= L * d_H for all
    vertex pairs, so it certifies domination of H.  L is INFINITE when some
    H-edge joins vertices in different components of G; the witness edge
    realizes L (or the disconnection).
    """
    if G.vertex_count != H.vertex_count:
        raise GraphError(
            f"vertex count mismatch: {G.vertex_count} != {H.vertex_count}"
        )
    targets = {}
    for u, v in H.edges:
        targets.setdefault(u, []).append(v)
    best = 0
    witness = None
    for x in sorted(targets):
        ys = targets[x]
        wanted = set(ys)
        dist = {x: 0}
        queue = deque([x])
        found = {x} & wanted
        while queue and len(found) < len(wanted):
            a = queue.popleft()
            for b, _, _ in G.adjacency[a]:
                if b not in dist:
                    dist[b] = dist[a] + 1
                    if b in wanted:
                        found.add(b)
                    queue.append(b)
        for y in sorted(ys):
            if y not in dist:
                return INFINITE, (x, y)
            if dist[y] > best:
                best = dist[y]
                witness = (x, y)
    if H.edge_count == 0:
        return 1, None
    return max(best, 1), witness


def domination_constant(G: Graph, H: Graph):
    """Least L certifying domination of H by G; see ``domination_detail``."""
    return domination_detail(G, H)[0]


def max_q_net(G: Graph, q: int):
    """Greedy maximal q-net: pairwise distances >= q, every vertex within q.

    Scans vertices in ascending id, adding one whenever it is at distance
    >= q from the net built so far; deterministic.  The graph must be
    connected.
    """
    if q < 1:
        raise GraphError("q must be >= 1")
    if G.vertex_count == 0:
        raise GraphError("empty graph has no net")
    if len(connected_components(G)) != 1:
        raise GraphError("graph must be connected")
    n = G.vertex_count
    # dist_to_net[v] = min distance to a chosen net point, capped at q
    dist_to_net = [q] * n
    net = []
    for v in range(n):
        if dist_to_net[v] < q:
            continue
        net.append(v)
        dist_to_net[v] = 0
        queue = deque([v])
        while queue:
            x = queue.popleft()
            d = dist_to_net[x] + 1
            if d >= q:
                continue
            for y, _, _ in G.adjacency[x]:
                if dist_to_net[y] > d:
                    dist_to_net[y] = d
                    queue.append(y)
    return net
