"""Partitions with bounded blocks and small cut, and exact expansion search.

Three partitioners: the q-net partition of a tree, coordinate boxes on a
torus, and the private-part refinement of an ingested covering family.  A
validator recomputes every statistic from the raw assignment.  The expansion
search exhaustively minimises |boundary F| / |F| over connected sets of
bounded size, which is exact because a disconnected set never beats its best
component.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .graphs import Graph, GraphError, connected_components, max_q_net


class PartitionError(ValueError):
    """Invalid partition input or rejected covering family."""


@dataclass(frozen=True)
class Partition:
    """Vertex partition with its cut statistics.

    ``assignment[v]`` is the block id of v (ids dense, 0..block_count-1);
    ``cut_edge_ids`` are exactly the edges whose endpoints lie in different
    blocks, and ``cut_ratio`` is |cut| / |V| as an exact rational.
    """

    assignment: tuple
    block_count: int
    max_block_size: int
    cut_edge_ids: tuple
    cut_ratio: Fraction

    @staticmethod
    def from_assignment(G: Graph, assignment) -> "Partition":
        assignment = tuple(assignment)
        if len(assignment) != G.vertex_count:
            raise PartitionError("assignment length != vertex count")
        labels = sorted(set(assignment))
        if labels != list(range(len(labels))):
            relabel = {b: i for i, b in enumerate(labels)}
            assignment = tuple(relabel[b] for b in assignment)
        sizes = [0] * (len(set(assignment)) or 1)
        for b in assignment:
            sizes[b] += 1
        cut = tuple(
            eid for eid, (u, v) in enumerate(G.edges)
            if assignment[u] != assignment[v]
        )
        denom = max(G.vertex_count, 1)
        return Partition(
            assignment=assignment,
            block_count=len(sizes),
            max_block_size=max(sizes) if sizes else 0,
            cut_edge_ids=cut,
            cut_ratio=Fraction(len(cut), denom),
        )

    def blocks(self):
        out = [[] for _ in range(self.block_count)]
        for v, b in enumerate(self.assignment):
            out[b].append(v)
        return out

    def to_jsonable(self) -> dict:
        return {
            "assignment": list(self.assignment),
            "block_count": self.block_count,
            "max_block_size": self.max_block_size,
            "cut_edge_ids": list(self.cut_edge_ids),
            "cut_ratio": {"num": str(self.cut_ratio.numerator),
                          "den": str(self.cut_ratio.denominator)},
        }


def tree_partition(T: Graph, q: int) -> Partition:
    """Partition a tree into the preimages of a greedy maximal q-net.

    Each vertex joins the net point closest to it, ties resolved toward the
    smaller net-point id; on a tree every block is then a connected subtree,
    so the cut has exactly block_count - 1 edges.
    """
    if q < 2:
        raise PartitionError("q must be >= 2")
    if T.edge_count != T.vertex_count - 1 or len(connected_components(T)) != 1:
        raise PartitionError("input is not a tree")
    net = max_q_net(T, q)
    block_of_net = {v: i for i, v in enumerate(net)}
    # layered multi-source BFS; per layer take the least owner among the
    # already-assigned neighbors, which realises min-id among closest net points
    owner = [-1] * T.vertex_count
    for v in net:
        owner[v] = block_of_net[v]
    frontier = sorted(net)
    while frontier:
        nxt = {}
        for x in frontier:
            for y, _, _ in T.adjacency[x]:
                if owner[y] < 0:
                    cand = owner[x]
                    if y not in nxt or cand < nxt[y]:
                        nxt[y] = cand
        for y, b in nxt.items():
            owner[y] = b
        frontier = sorted(nxt)
    return Partition.from_assignment(T, owner)


def box_partition(G: Graph, coordinates, s: int) -> Partition:
    """Partition lattice-coordinate vertices into s x ... x s boxes.

    ``coordinates[v]`` is the lattice point of vertex v; the side length n
    is taken from the coordinate range and s must divide it.
    """
    if s < 1:
        raise PartitionError("s must be >= 1")
    if len(coordinates) != G.vertex_count:
        raise PartitionError("coordinates length != vertex count")
    n = 0
    for c in coordinates:
        n = max(n, max(c) + 1)
    if n % s != 0:
        raise PartitionError(f"box size {s} does not divide side {n}")
    keys = {}
    assignment = []
    for c in coordinates:
        key = tuple(x // s for x in c)
        if key not in keys:
            keys[key] = len(keys)
        assignment.append(keys[key])
    return Partition.from_assignment(G, assignment)


@dataclass(frozen=True)
class CoveringFamily:
    """Almost-disjoint small-boundary vertex sets covering most of a graph.

    Invariants checked on ingestion, for slack ``omega`` and size cap:
    every set has at most ``size_cap`` vertices; at least a (1-omega)
    fraction of each set is private to it; each set's edge boundary is at
    most omega * |set|; the union covers at least (1-omega) |V|.
    """

    subsets: tuple
    omega: Fraction
    size_cap: int
    coverage_fraction: Fraction

    @staticmethod
    def ingest(G: Graph, subsets, omega=None, size_cap=None) -> "CoveringFamily":
        """Validate a declared (omega, cap) or measure the tightest ones."""
        sets = [tuple(sorted(set(s))) for s in subsets]
        if not sets:
            raise PartitionError("covering family is empty")
        for s in sets:
            if not s:
                raise PartitionError("covering family contains an empty set")
            if s[0] < 0 or s[-1] >= G.vertex_count:
                raise PartitionError("covering family subset out of vertex range")
        multiplicity = [0] * G.vertex_count
        for s in sets:
            for v in s:
                multiplicity[v] += 1
        covered = sum(1 for m in multiplicity if m)
        coverage = Fraction(covered, G.vertex_count)
        max_size = max(len(s) for s in sets)
        omega_needed = Fraction(0)
        for s in sets:
            inside = set(s)
            private = sum(1 for v in s if multiplicity[v] == 1)
            boundary = sum(
                1 for v in s for y, _, _ in G.adjacency[v] if y not in inside
            )
            omega_needed = max(
                omega_needed,
                Fraction(len(s) - private, len(s)),
                Fraction(boundary, len(s)),
            )
        omega_needed = max(omega_needed, 1 - coverage)
        if omega is None:
            omega = omega_needed
            if omega >= 1:
                raise PartitionError(
                    f"family needs slack {omega} >= 1; no usable covering"
                )
        else:
            omega = Fraction(omega)
            if not 0 <= omega < 1:
                raise PartitionError("omega must lie in [0, 1)")
            for s in sets:
                if size_cap is not None and len(s) > size_cap:
                    raise PartitionError(
                        f"size invariant failed: |W|={len(s)} > cap {size_cap}"
                    )
            if omega_needed > omega:
                # name the first failing invariant for the error message
                for s in sets:
                    inside = set(s)
                    private = sum(1 for v in s if multiplicity[v] == 1)
                    if Fraction(len(s) - private, len(s)) > omega:
                        raise PartitionError(
                            f"private-fraction invariant failed on a set of size {len(s)}"
                        )
                    boundary = sum(
                        1 for v in s for y, _, _ in G.adjacency[v] if y not in inside
                    )
                    if Fraction(boundary, len(s)) > omega:
                        raise PartitionError(
                            f"boundary invariant failed on a set of size {len(s)}"
                        )
                raise PartitionError(
                    f"coverage invariant failed: covered {coverage} < 1 - omega"
                )
        if size_cap is None:
            size_cap = max_size
        return CoveringFamily(
            subsets=tuple(sets),
            omega=omega,
            size_cap=size_cap,
            coverage_fraction=coverage,
        )

    @staticmethod
    def from_json_path(G: Graph, path) -> "CoveringFamily":
        """Read a covering family: a bare list of vertex-id lists, or an
        object {"subsets": [...], "omega": {"num","den"}?, "size_cap": int?}."""
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        omega = None
        size_cap = None
        if isinstance(data, dict):
            subsets = data["subsets"]
            if "omega" in data:
                om = data["omega"]
                omega = Fraction(int(om["num"]), int(om["den"]))
            size_cap = data.get("size_cap")
        else:
            subsets = data
        return CoveringFamily.ingest(G, subsets, omega=omega, size_cap=size_cap)


def covering_cut_bound(G: Graph, omega: Fraction) -> Fraction:
    """Exact cut-ratio bound for the covering-family partition.

    Reads the generating-set size as half the degree bound, so the leading
    factor is the degree bound itself.
    """
    om = Fraction(omega)
    return G.max_degree * ((1 - (1 - om) ** 2) + 2 * om / (1 - om))


@dataclass(frozen=True)
class CoveringPartitionResult:
    partition: Partition
    cut_bound: Fraction


def partition_from_covering(G: Graph, family: CoveringFamily) -> CoveringPartitionResult:
    """Blocks are the private parts of the family; leftovers are chopped
    into connected BFS chunks of size at most the family's cap.

    The resulting cut ratio provably stays below ``covering_cut_bound``.
    """
    multiplicity = [0] * G.vertex_count
    for s in family.subsets:
        for v in s:
            multiplicity[v] += 1
    owner = [-1] * G.vertex_count
    blocks = 0
    for s in family.subsets:
        private = [v for v in s if multiplicity[v] == 1]
        if not private:
            continue
        for v in private:
            owner[v] = blocks
        blocks += 1
    # leftover: uncovered vertices and overlap vertices; BFS chunks of <= cap
    cap = family.size_cap
    for start in range(G.vertex_count):
        if owner[start] >= 0:
            continue
        chunk = [start]
        owner[start] = blocks
        queue = deque([start])
        while queue and len(chunk) < cap:
            x = queue.popleft()
            for y, _, _ in G.adjacency[x]:
                if owner[y] < 0:
                    owner[y] = blocks
                    chunk.append(y)
                    queue.append(y)
                    if len(chunk) == cap:
                        break
        blocks += 1
    partition = Partition.from_assignment(G, owner)
    bound = covering_cut_bound(G, family.omega)
    if partition.cut_ratio > bound:
        raise PartitionError(
            f"cut ratio {partition.cut_ratio} exceeds bound {bound}"
        )
    return CoveringPartitionResult(partition=partition, cut_bound=bound)


@dataclass(frozen=True)
class ValidationResult:
    passed: bool
    block_count: int
    max_block_size: int
    cut_edge_count: int
    cut_ratio: Fraction


def validate_partition(G: Graph, partition: Partition, epsilon, block_cap: int) -> ValidationResult:
    """Recompute all statistics from the raw assignment and check the
    (epsilon, block_cap) contract: blocks of size <= cap, cut ratio <= epsilon."""
    fresh = Partition.from_assignment(G, partition.assignment)
    eps = Fraction(epsilon)
    passed = fresh.max_block_size <= block_cap and fresh.cut_ratio <= eps
    return ValidationResult(
        passed=passed,
        block_count=fresh.block_count,
        max_block_size=fresh.max_block_size,
        cut_edge_count=len(fresh.cut_edge_ids),
        cut_ratio=fresh.cut_ratio,
    )


def edge_boundary_size(G: Graph, vertices) -> int:
    """Number of edges with exactly one endpoint in ``vertices``."""
    inside = set(vertices)
    return sum(
        1 for v in inside for y, _, _ in G.adjacency[v] if y not in inside
    )


@dataclass(frozen=True)
class ExpansionReport:
    """Exact minimum of |boundary F| / |F| over nonempty F with |F| <= m."""

    m: int
    delta: Fraction
    argmin: tuple
    sets_examined: int

    def to_jsonable(self) -> dict:
        return {
            "m": self.m,
            "delta": {"num": str(self.delta.numerator),
                      "den": str(self.delta.denominator)},
            "argmin": list(self.argmin),
            "sets_examined": self.sets_examined,
        }


def min_small_set_expansion(G: Graph, m: int, cap: int = 10,
                            vertex_cap: int = 5000) -> ExpansionReport:
    """Exhaustive small-set expansion minimum over connected sets.

    Connected sets suffice: a disconnected F has no internal edges between
    its parts, so |bd F|/|F| is a mediant of the per-component ratios and
    cannot beat the best component.  Enumeration expands each set only from
    exclusive neighborhoods above the root vertex, so every connected set
    appears exactly once; ties take the lexicographically smallest set.
    """
    if m < 1:
        raise PartitionError("m must be >= 1")
    if m > cap:
        raise PartitionError(f"m={m} exceeds the search cap {cap}")
    if G.vertex_count > vertex_cap:
        raise PartitionError(
            f"graph has {G.vertex_count} > {vertex_cap} vertices"
        )
    if G.vertex_count == 0:
        raise PartitionError("empty graph")
    adj_sets = [frozenset(y for y, _, _ in G.adjacency[v]) for v in range(G.vertex_count)]
    best_num = None   # boundary
    best_den = None   # size
    best_set = None
    examined = 0

    def consider(members, boundary):
        nonlocal best_num, best_den, best_set, examined
        examined += 1
        size = len(members)
        if best_num is None or boundary * best_den < best_num * size or (
            boundary * best_den == best_num * size and tuple(sorted(members)) < best_set
        ):
            best_num = boundary
            best_den = size
            best_set = tuple(sorted(members))

    def extend(members, ext, boundary, root):
        consider(members, boundary)
        if len(members) == m:
            return
        ext = list(ext)
        while ext:
            w = ext.pop(0)
            inside = sum(1 for y in adj_sets[w] if y in members)
            new_members = members | {w}
            new_boundary = boundary + G.degree(w) - 2 * inside
            closed = members | set(ext)  # already reachable candidates stay excluded
            new_ext = ext + sorted(
                y for y in adj_sets[w]
                if y > root and y not in closed and not (adj_sets[y] & members)
            )
            extend(new_members, new_ext, new_boundary, root)

    for root in range(G.vertex_count):
        extend(
            frozenset([root]),
            sorted(y for y in adj_sets[root] if y > root),
            G.degree(root),
            root,
        )
    return ExpansionReport(
        m=m, delta=Fraction(best_num, best_den), argmin=best_set,
        sets_examined=examined,
    )
