"""Graph families indexed by size, used as finite windows of sequences.

A sequence is a family name plus parameters plus an index window; graphs are
rebuilt on demand from that descriptor, so windows stay cheap to pass around
(and to worker processes).  All builders are deterministic functions of
(family, params, index).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .graphs import Graph, GraphError, build_graph, girth, read_edge_list_path
from . import towers


class SequenceError(ValueError):
    """Unknown family or invalid parameters/window."""


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle needs n >= 3")
    return build_graph(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return build_graph(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> Graph:
    return build_graph(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def torus_coordinates(n: int):
    """Vertex id i*n + j  <->  coordinate (i, j) on the n x n torus."""
    return [(v // n, v % n) for v in range(n * n)]


def torus_graph(n: int, diagonal: bool = False) -> Graph:
    """(Z/n)^2 grid torus; with ``diagonal`` also the (+1,+1) step.

    Vertex (i, j) has id i*n + j.  Steps +-e1, +-e2 give the 4-regular
    torus; adding +-(e1+e2) gives the 6-regular diagonal variant.  Needs
    n >= 3 so that no step collapses to a loop or duplicate.
    """
    if n < 3:
        raise GraphError("torus needs n >= 3")
    pairs = []
    for i in range(n):
        for j in range(n):
            v = i * n + j
            pairs.append((v, i * n + (j + 1) % n))
            pairs.append((v, ((i + 1) % n) * n + j))
            if diagonal:
                pairs.append((v, ((i + 1) % n) * n + (j + 1) % n))
    canonical = []
    seen = set()
    for u, v in pairs:
        key = (u, v) if u < v else (v, u)
        if key not in seen:
            seen.add(key)
            canonical.append(key)
    return build_graph(n * n, canonical)


def high_girth_regular(n: int, degree: int, girth_floor: int, seed) -> Graph:
    """A d-regular graph on n vertices with verified girth > girth_floor.

    Progressive edge growth: repeatedly connect the lowest-id vertex with
    missing edges to a uniformly chosen partner among those maximising the
    current distance (preferring unreachable ones), rejecting partners that
    would close a cycle of length <= girth_floor.  The result's girth is
    verified, and construction restarts with a derived seed on failure.
    """
    if degree < 1 or n <= degree:
        raise SequenceError("need 0 < degree < n")
    if (n * degree) % 2 != 0:
        raise SequenceError("n * degree must be even")
    for attempt in range(64):
        rng = random.Random(f"girth-regular:{seed}:{n}:{degree}:{girth_floor}:{attempt}")
        G = _try_high_girth(n, degree, girth_floor, rng)
        if G is not None and girth(G) > girth_floor:
            return G
    raise SequenceError(
        f"could not reach girth > {girth_floor} for {degree}-regular on {n} vertices"
    )


def _try_high_girth(n, degree, girth_floor, rng):
    adj = [set() for _ in range(n)]
    pairs = []

    def bfs_near(u):
        # vertices within distance girth_floor - 1 of u in the partial graph;
        # connecting u to anything else closes no cycle of length <= girth_floor
        dist = {u: 0}
        frontier = [u]
        d = 0
        while frontier and d < girth_floor - 1:
            d += 1
            nxt = []
            for x in frontier:
                for y in adj[x]:
                    if y not in dist:
                        dist[y] = d
                        nxt.append(y)
            frontier = nxt
        return dist

    for _ in range(n * degree // 2):
        u = next((v for v in range(n) if len(adj[v]) < degree), None)
        if u is None:
            break
        near = bfs_near(u)
        candidates = [
            v for v in range(n)
            if v != u and len(adj[v]) < degree and v not in near
        ]
        if candidates:
            v = rng.choice(candidates)
        else:
            # every free stub sits too close to u; a fresh attempt reshuffles
            return None
        adj[u].add(v)
        adj[v].add(u)
        pairs.append((u, v) if u < v else (v, u))
    if any(len(a) != degree for a in adj):
        return None
    pairs.sort()
    return build_graph(n, pairs)


@dataclass(frozen=True)
class GraphSequence:
    """A finite window of a graph family.

    ``indices`` are the window's n values in increasing order; the builder
    is resolved from the family registry, so the descriptor stays picklable.
    Vertex counts must strictly increase across the window and every graph
    must respect ``degree_bound``.
    """

    family: str
    params: dict
    indices: tuple
    degree_bound: int

    def graph(self, n: int) -> Graph:
        return build_family_graph(self.family, self.params, n)

    def graphs(self):
        for n in self.indices:
            yield n, self.graph(n)

    def check_window(self) -> None:
        last = -1
        for n, G in self.graphs():
            if G.vertex_count <= last:
                raise SequenceError(
                    f"vertex counts must strictly increase (index {n})"
                )
            last = G.vertex_count
            if G.max_degree > self.degree_bound:
                raise SequenceError(
                    f"degree bound {self.degree_bound} violated at index {n}"
                )


def build_family_graph(family: str, params: dict, n: int) -> Graph:
    if family == "cycle":
        return cycle_graph(n)
    if family == "torus2":
        return torus_graph(n)
    if family == "torus2diag":
        return torus_graph(n, diagonal=True)
    if family == "regular-girth":
        return high_girth_regular(
            n,
            int(params.get("degree", 3)),
            int(params.get("girth_floor", 8)),
            params.get("seed", 0),
        )
    if family == "files":
        paths = params["paths"]
        try:
            return read_edge_list_path(paths[n])
        except (KeyError, IndexError):
            raise SequenceError(f"no file for index {n}") from None
    if family.startswith("tower:"):
        tower = towers.make_tower(family.split(":", 1)[1])
        return towers.cayley_graph(tower, n).graph
    raise SequenceError(f"unknown family {family!r}")


def family_degree_bound(family: str, params: dict) -> int:
    if family == "cycle":
        return 2
    if family == "torus2":
        return 4
    if family == "torus2diag":
        return 6
    if family == "regular-girth":
        return int(params.get("degree", 3))
    if family.startswith("tower:"):
        tower = towers.make_tower(family.split(":", 1)[1])
        return 2 * len(tower.generator_labels)
    return 0  # unknown; caller must supply


def make_sequence(family: str, indices, params: dict | None = None,
                  degree_bound: int | None = None) -> GraphSequence:
    params = dict(params or {})
    if family == "files":
        paths = params.get("paths")
        if not paths:
            raise SequenceError("files family needs params['paths']")
        params["paths"] = {i: p for i, p in zip(indices, paths)} if isinstance(paths, list) else paths
    if degree_bound is None:
        degree_bound = family_degree_bound(family, params)
        if degree_bound == 0 and family == "files":
            degree_bound = max(
                read_edge_list_path(p).max_degree for p in params["paths"].values()
            )
    return GraphSequence(
        family=family,
        params=params,
        indices=tuple(sorted(indices)),
        degree_bound=degree_bound,
    )
