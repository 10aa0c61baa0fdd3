"""Short-cycle enumeration and exact ranks of their span over Q or F_p.

Rank arithmetic is exact everywhere: prime-field rows live in Z/p, rational
ranks use fraction-free integer elimination on gcd-normalised sparse rows.
No floating point enters any computation.
"""

from __future__ import annotations

import time
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .graphs import Graph, GraphError, connected_components


class CellTimeout(Exception):
    """A rank computation exceeded its deadline."""


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """Coefficient field for rank computations: rationals (p=None) or F_p."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None and not _is_prime(self.p):
            raise GraphError(f"not a prime: {self.p}")

    @staticmethod
    def rationals() -> "FieldSpec":
        return FieldSpec(None)

    @staticmethod
    def prime(p: int) -> "FieldSpec":
        return FieldSpec(p)

    @staticmethod
    def parse(text: str) -> "FieldSpec":
        t = text.strip()
        if t in ("Q", "q"):
            return FieldSpec(None)
        if t and t[0] in "Ff" and t[1:].isdigit():
            return FieldSpec(int(t[1:]))
        raise GraphError(f"unknown field {text!r} (expected Q or F<p>)")

    @property
    def name(self) -> str:
        return "Q" if self.p is None else f"F{self.p}"

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class CycleVector:
    """Signed edge-incidence vector of a simple cycle.

    ``entries`` holds (edge_id, coefficient) pairs with coefficients in
    {+1, -1}, sorted by edge id; the cycle length equals the support size.
    """

    entries: tuple
    length: int


def walk_chain(G: Graph, walk) -> dict:
    """Signed edge counts of a closed walk given as a vertex sequence.

    The walk may repeat vertices and edges; opposite traversals cancel.
    Entries with coefficient zero are dropped.
    """
    if len(walk) < 2 or walk[0] != walk[-1]:
        raise GraphError("walk must start and end at the same vertex")
    chain: dict = {}
    for x, y in zip(walk, walk[1:]):
        eid = G.edge_id(x, y)
        if eid is None:
            raise GraphError(f"walk uses a non-edge ({x}, {y})")
        sign = 1 if x < y else -1
        c = chain.get(eid, 0) + sign
        if c:
            chain[eid] = c
        else:
            chain.pop(eid, None)
    return chain


class CycleAccumulator:
    """Incremental echelon form of sparse integer rows over a field.

    Rows are dicts edge_id -> coefficient.  Over F_p each stored row has its
    pivot (smallest edge id in support) normalised to 1; over the rationals
    rows keep integer entries, divided by their gcd, pivot positive.  The
    rank can never exceed ``saturation_cap`` (the ambient cycle-space
    dimension), so accumulation can stop early once it is reached.
    """

    def __init__(self, field: FieldSpec, saturation_cap: int):
        self.field = field
        self.saturation_cap = saturation_cap
        self.rank = 0
        self._rows: dict = {}  # pivot edge id -> row

    @property
    def saturated(self) -> bool:
        return self.rank >= self.saturation_cap

    def add(self, vector) -> bool:
        """Reduce a vector against the echelon rows; True if rank grew."""
        p = self.field.p
        if isinstance(vector, CycleVector):
            items = vector.entries
        else:
            items = vector.items()
        if p is None:
            v = {e: c for e, c in items if c}
        else:
            v = {}
            for e, c in items:
                c %= p
                if c:
                    v[e] = c
        rows = self._rows
        while v:
            j = min(v)
            row = rows.get(j)
            if row is None:
                if p is None:
                    g = 0
                    for c in v.values():
                        g = gcd(g, c)
                    if v[j] < 0:
                        g = -g
                    if g not in (0, 1):
                        v = {e: c // g for e, c in v.items()}
                else:
                    inv = pow(v[j], -1, p)
                    if inv != 1:
                        v = {e: (c * inv) % p for e, c in v.items()}
                rows[j] = v
                self.rank += 1
                return True
            if p is None:
                a, b = row[j], v[j]
                new = {}
                for e, c in v.items():
                    new[e] = a * c
                for e, c in row.items():
                    t = new.get(e, 0) - b * c
                    if t:
                        new[e] = t
                    else:
                        new.pop(e, None)
                v = new
            else:
                f = v[j]  # row pivot is 1
                new = dict(v)
                for e, c in row.items():
                    t = (new.get(e, 0) - f * c) % p
                    if t:
                        new[e] = t
                    else:
                        new.pop(e, None)
                v = new
        return False


def cyclomatic_number(G: Graph) -> int:
    """|E| - |V| + number of components: the full cycle-space dimension."""
    return G.edge_count - G.vertex_count + len(connected_components(G))


def _distances_within(G: Graph, root: int, cap: int):
    """BFS distances from root in the subgraph induced on vertices >= root."""
    dist = {root: 0}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        d = dist[x]
        if d == cap:
            continue
        for y, _, _ in G.adjacency[x]:
            if y >= root and y not in dist:
                dist[y] = d + 1
                queue.append(y)
    return dist


def _cycles_of_length(G: Graph, length: int, deadline=None):
    """All simple cycles of exactly ``length``, each once, in canonical form.

    A cycle is rooted at its minimum vertex and oriented so that the second
    vertex is smaller than the last; enumeration is a DFS over paths of
    vertices > root, cut when the remaining budget cannot reach the root.
    """
    n = G.vertex_count
    adj = G.adjacency
    for root in range(n):
        if deadline is not None and time.monotonic() > deadline:
            raise CellTimeout(f"cycle enumeration at length {length}")
        dist = _distances_within(G, root, length)
        if len(dist) <= 2:
            continue
        # path holds vertices; in_path for O(1) membership
        path = [root]
        in_path = bytearray(n)
        in_path[root] = 1
        stack = [iter(adj[root])]
        while stack:
            advanced = False
            for y, _, _ in stack[-1]:
                if y <= root or in_path[y]:
                    continue
                k = len(path)  # vertices so far; edges used after adding y: k
                dy = dist.get(y)
                if dy is None or k + dy > length or k + 1 > length:
                    continue
                if k + 1 == length:
                    # close the cycle: y must neighbor the root, and the
                    # orientation is canonical only when path[1] < y
                    if G.edge_id(y, root) is not None and path[1] < y:
                        verts = path + [y, root]
                        ent = []
                        for a, b in zip(verts, verts[1:]):
                            ent.append((G.edge_id(a, b), 1 if a < b else -1))
                        ent.sort()
                        yield CycleVector(entries=tuple(ent), length=length)
                    continue
                path.append(y)
                in_path[y] = 1
                stack.append(iter(adj[y]))
                advanced = True
                break
            if not advanced:
                stack.pop()
                last = path.pop()
                in_path[last] = 0


def enumerate_short_cycles(G: Graph, q: int, deadline=None):
    """Every simple cycle of length <= q, exactly once, shortest first.

    Lengths below 3 contribute nothing on a simple graph, so q < 3 yields an
    empty stream.  Consumers may stop early.
    """
    for length in range(3, q + 1):
        yield from _cycles_of_length(G, length, deadline)


def cycle_rank_profile_partial(G: Graph, q_max: int, field: FieldSpec, deadline=None):
    """(profile, timed_out): ranks for the q values completed by the deadline.

    One incremental pass: cycles are consumed in nondecreasing length order
    and accumulation stops as soon as the rank reaches the cyclomatic
    number, after which all longer lengths inherit the saturated rank.
    """
    cap = cyclomatic_number(G)
    acc = CycleAccumulator(field, cap)
    profile = {q: 0 for q in range(0, min(3, q_max + 1))}
    for length in range(3, q_max + 1):
        if not acc.saturated:
            try:
                for vec in _cycles_of_length(G, length, deadline):
                    acc.add(vec)
                    if acc.saturated:
                        break
            except CellTimeout:
                return profile, True
            if deadline is not None and time.monotonic() > deadline:
                return profile, True
        profile[length] = acc.rank
    return profile, False


def cycle_rank_profile(G: Graph, q_max: int, field: FieldSpec, deadline=None) -> dict:
    """Rank of the span of cycles of length <= q, for every q in 0..q_max."""
    profile, timed_out = cycle_rank_profile_partial(G, q_max, field, deadline)
    if timed_out:
        raise CellTimeout(f"rank profile up to q={q_max}")
    return profile


def cycle_rank(G: Graph, q: int, field: FieldSpec, deadline=None) -> int:
    """Dimension over ``field`` of the span of all cycles of length <= q."""
    if q < 0:
        return 0
    return cycle_rank_profile(G, q, field, deadline)[q]


def s_q(G: Graph, q: int, field: FieldSpec, deadline=None) -> Fraction:
    """(|E| - dim of the length-<=q cycle span) / |V|  -  1, exactly."""
    if G.vertex_count < 1:
        raise GraphError("graph must have at least one vertex")
    rank = cycle_rank(G, q, field, deadline)
    return Fraction(G.edge_count - rank, G.vertex_count) - 1


def s_q_profile(G: Graph, q_max: int, field: FieldSpec, deadline=None) -> dict:
    """s_q for every q in 3..q_max from a single rank profile."""
    if G.vertex_count < 1:
        raise GraphError("graph must have at least one vertex")
    ranks = cycle_rank_profile(G, q_max, field, deadline)
    return {
        q: Fraction(G.edge_count - ranks[q], G.vertex_count) - 1
        for q in range(3, q_max + 1)
    }
