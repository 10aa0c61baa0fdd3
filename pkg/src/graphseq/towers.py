"""Cayley graphs of finite quotients and their homology-flavoured invariants.

A tower is a finitely generated group given by a family of concrete finite
quotients (tuples with explicit multiplication), a generating set of formal
labels, and optionally a list of relator words presenting the group.  From a
quotient we build the simple Cayley graph, compute the dimension of first
homology over a prime field from relator-lift cycle vectors, and carry out
the subgroup/forest compression that certifies cost upper bounds.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction

from .cyclespace import CycleAccumulator, FieldSpec, walk_chain
from .graphs import Graph, build_graph, connected_components, domination_constant
from .graphs import EquivalenceWitness, _bfs_array

DEFAULT_ELEMENT_CAP = 200_000


class TowerError(ValueError):
    """Invalid tower descriptor, quotient, or compression input."""


# ---------------------------------------------------------------------------
# words over a symmetric generating alphabet


def parse_word(text: str):
    """Parse a word like ``"a b a^-1 b^2"`` into ((label, exponent-sign) ...).

    Tokens are separated by whitespace; ``x^k`` repeats ``x`` (k may be
    negative).  The returned tuple lists single letters, each with sign +-1,
    applied left to right.
    """
    letters = []
    for token in text.split():
        if "^" in token:
            label, _, power = token.partition("^")
            try:
                k = int(power)
            except ValueError:
                raise TowerError(f"bad exponent in token {token!r}") from None
        else:
            label, k = token, 1
        if not label:
            raise TowerError(f"empty generator label in token {token!r}")
        sign = 1 if k >= 0 else -1
        letters.extend([(label, sign)] * abs(k))
    return tuple(letters)


def format_word(word) -> str:
    return " ".join(lbl if s > 0 else f"{lbl}^-1" for lbl, s in word)


# ---------------------------------------------------------------------------
# concrete finite groups; elements are hashable tuples/ints in canonical form


class AbelianQuotient:
    """Z^d modulo coordinatewise moduli; elements are integer tuples."""

    def __init__(self, moduli):
        if any(m < 1 for m in moduli):
            raise TowerError("moduli must be >= 1")
        self.moduli = tuple(moduli)
        self.identity = tuple(0 for _ in moduli)

    def mul(self, a, b):
        return tuple((x + y) % m for x, y, m in zip(a, b, self.moduli))

    def inv(self, a):
        return tuple((-x) % m for x, m in zip(a, self.moduli))

    @property
    def order(self):
        n = 1
        for m in self.moduli:
            n *= m
        return n


class HeisenbergQuotient:
    """Upper unitriangular 3x3 matrices over Z/n; elements (a, b, c)."""

    def __init__(self, n):
        if n < 1:
            raise TowerError("modulus must be >= 1")
        self.n = n
        self.identity = (0, 0, 0)

    def mul(self, g, h):
        n = self.n
        a1, b1, c1 = g
        a2, b2, c2 = h
        return ((a1 + a2) % n, (b1 + b2) % n, (c1 + c2 + a1 * b2) % n)

    def inv(self, g):
        n = self.n
        a, b, c = g
        return ((-a) % n, (-b) % n, (a * b - c) % n)

    @property
    def order(self):
        return self.n ** 3


class SL2Quotient:
    """SL(2, p) for prime p; elements are row-major 4-tuples mod p."""

    def __init__(self, p):
        if p < 2:
            raise TowerError("p must be a prime >= 2")
        self.p = p
        self.identity = (1, 0, 0, 1)

    def mul(self, g, h):
        p = self.p
        a, b, c, d = g
        e, f, x, y = h
        return (
            (a * e + b * x) % p,
            (a * f + b * y) % p,
            (c * e + d * x) % p,
            (c * f + d * y) % p,
        )

    def inv(self, g):
        p = self.p
        a, b, c, d = g
        return (d % p, (-b) % p, (-c) % p, a % p)

    @property
    def order(self):
        return self.p * (self.p * self.p - 1)


# ---------------------------------------------------------------------------
# tower families


@dataclass(frozen=True)
class TowerSpec:
    """A group tower: generator labels, quotient family, optional relators.

    ``relators`` is a tuple of words (empty tuple = free group on the
    generators, None = no presentation supplied).  ``quotient(n)`` returns
    the concrete finite group at index n together with the map from labels
    to group elements.
    """

    family_name: str
    generator_labels: tuple
    relators: tuple | None
    params: dict

    def quotient(self, n: int):
        family = _FAMILIES.get(self.family_name)
        if family is None:
            raise TowerError(f"unknown tower family {self.family_name!r}")
        return family["quotient"](n)

    def expected_order(self, n: int):
        return _FAMILIES[self.family_name]["order"](n)

    def subgroup_index(self, k: int):
        fn = _FAMILIES[self.family_name].get("subgroup_index")
        return None if fn is None else fn(k)

    def rank_formula(self):
        return _FAMILIES[self.family_name].get("rank_formula")


def _quotient_cyclic(n):
    if n < 1:
        raise TowerError("cyclic quotient needs n >= 1")
    g = AbelianQuotient((n,))
    return g, {"a": (1 % n,)}


def _quotient_torus2(n):
    if n < 1:
        raise TowerError("torus quotient needs n >= 1")
    g = AbelianQuotient((n, n))
    return g, {"a": (1 % n, 0), "b": (0, 1 % n)}


def _quotient_torus2diag(n):
    g, images = _quotient_torus2(n)
    images["c"] = (1 % n, 1 % n)
    return g, images


def _quotient_heis(n):
    g = HeisenbergQuotient(n)
    return g, {"x": (1 % n, 0, 0), "y": (0, 1 % n, 0)}


def _quotient_sl2(p):
    g = SL2Quotient(p)
    images = {"a": (1, 1 % p, 0, 1), "b": (1, 0, 1 % p, 1)}
    for m in images.values():
        if (m[0] * m[3] - m[1] * m[2]) % p != 1:
            raise TowerError("generator image not in SL(2, p)")
    return g, images


_COMMUTATOR = "a b a^-1 b^-1"
# Heisenberg group: both generators commute with their commutator
_HEIS_RELATORS = (
    "x x y x^-1 y^-1 x^-1 y x y^-1 x^-1",
    "y x y x^-1 y^-1 y^-1 y x y^-1 x^-1",
)

_FAMILIES = {
    "cyclic": {
        "labels": ("a",),
        "relators": (),
        "quotient": _quotient_cyclic,
        "order": lambda n: n,
        "subgroup_index": lambda k: k,
        "rank_formula": ("free", 1),
    },
    "torus2": {
        "labels": ("a", "b"),
        "relators": (_COMMUTATOR,),
        "quotient": _quotient_torus2,
        "order": lambda n: n * n,
        "subgroup_index": lambda k: k * k,
        "rank_formula": ("abelian", 2),
    },
    "torus2diag": {
        "labels": ("a", "b", "c"),
        "relators": (_COMMUTATOR, "c b^-1 a^-1"),
        "quotient": _quotient_torus2diag,
        "order": lambda n: n * n,
        "subgroup_index": lambda k: k * k,
        "rank_formula": ("abelian", 2),
    },
    "heis": {
        "labels": ("x", "y"),
        "relators": _HEIS_RELATORS,
        "quotient": _quotient_heis,
        "order": lambda n: n ** 3,
        "rank_formula": None,
    },
    "freeF2-sl2": {
        "labels": ("a", "b"),
        "relators": (),
        "quotient": _quotient_sl2,
        "order": lambda p: p * (p * p - 1),
        "rank_formula": ("free", 2),
    },
}


def make_tower(family_name: str, relators_override=None) -> TowerSpec:
    """TowerSpec for a built-in family; relators may be overridden."""
    family = _FAMILIES.get(family_name)
    if family is None:
        raise TowerError(
            f"unknown tower family {family_name!r}; known: {sorted(_FAMILIES)}"
        )
    if relators_override is None:
        relators = tuple(parse_word(w) for w in family["relators"])
    else:
        relators = tuple(
            parse_word(w) if isinstance(w, str) else tuple(w) for w in relators_override
        )
    return TowerSpec(
        family_name=family_name,
        generator_labels=tuple(family["labels"]),
        relators=relators,
        params={},
    )


def load_tower_descriptor(path) -> tuple:
    """Read a tower descriptor JSON: family, optional relators, index list.

    Schema: {"family": str, "indices": [int, ...], "relators": [word, ...]?,
    "params": {...}?}.  Returns (TowerSpec, indices).
    """
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, dict) or "family" not in data or "indices" not in data:
        raise TowerError(f"{path}: descriptor needs 'family' and 'indices'")
    indices = data["indices"]
    if not isinstance(indices, list) or not all(isinstance(i, int) for i in indices):
        raise TowerError(f"{path}: 'indices' must be a list of integers")
    tower = make_tower(data["family"], data.get("relators"))
    return tower, indices


# ---------------------------------------------------------------------------
# Cayley graph generation


@dataclass(frozen=True)
class CayleyGraph:
    """A quotient Cayley graph plus its vertex labelling by group elements."""

    graph: Graph
    elements: tuple          # vertex id -> group element
    index_of: dict           # group element -> vertex id
    group: object
    images: dict             # generator label -> group element


def _symmetric_generators(tower: TowerSpec, group, images):
    """Generator elements followed by the inverses of non-involutions."""
    gens = []
    seen = set()
    for label in tower.generator_labels:
        if label not in images:
            raise TowerError(f"no image for generator {label!r}")
        g = images[label]
        if g not in seen:
            gens.append(g)
            seen.add(g)
    for label in tower.generator_labels:
        g = group.inv(images[label])
        if g not in seen:
            gens.append(g)
            seen.add(g)
    return gens


def word_element(group, images, word):
    """Evaluate a word by successive left multiplication from the identity."""
    g = group.identity
    for label, sign in word:
        if label not in images:
            raise TowerError(f"no image for generator {label!r}")
        s = images[label] if sign > 0 else group.inv(images[label])
        g = group.mul(s, g)
    return g


def cayley_graph(tower: TowerSpec, n: int, element_cap: int = DEFAULT_ELEMENT_CAP) -> CayleyGraph:
    """Simple Cayley graph of quotient ``n``: edges {g, s*g}, loops dropped.

    Vertices are discovered by BFS from the identity over the symmetrised
    generating set, so the labelling is deterministic.  Relator words are
    checked to land on the identity.
    """
    group, images = tower.quotient(n)
    if tower.relators:
        for word in tower.relators:
            if word_element(group, images, word) != group.identity:
                raise TowerError(
                    f"relator {format_word(word)!r} is not trivial in quotient {n}"
                )
    gens = _symmetric_generators(tower, group, images)
    identity = group.identity
    index_of = {identity: 0}
    elements = [identity]
    pairs = []
    seen_pairs = set()
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        gi = index_of[g]
        for s in gens:
            h = group.mul(s, g)
            hi = index_of.get(h)
            if hi is None:
                hi = len(elements)
                if hi >= element_cap:
                    raise TowerError(
                        f"quotient {n} exceeds element cap {element_cap}"
                    )
                index_of[h] = hi
                elements.append(h)
                queue.append(h)
            if hi != gi:
                key = (gi, hi) if gi < hi else (hi, gi)
                if key not in seen_pairs:
                    seen_pairs.add(key)
                    pairs.append(key)
    expected = tower.expected_order(n)
    if expected is not None and len(elements) != expected:
        raise TowerError(
            f"quotient {n}: enumerated {len(elements)} elements, expected {expected}"
        )
    graph = build_graph(len(elements), pairs)
    return CayleyGraph(
        graph=graph,
        elements=tuple(elements),
        index_of=index_of,
        group=group,
        images=images,
    )


def relator_lift_chain(cay: CayleyGraph, word, start: int) -> dict:
    """Edge chain of the closed walk tracing ``word`` from vertex ``start``."""
    group = cay.group
    walk = [start]
    g = cay.elements[start]
    for label, sign in word:
        s = cay.images[label] if sign > 0 else group.inv(cay.images[label])
        g = group.mul(s, g)
        walk.append(cay.index_of[g])
    if walk[-1] != start:
        raise TowerError(f"word {format_word(word)!r} does not close at vertex {start}")
    return walk_chain(cay.graph, walk)


@dataclass(frozen=True)
class HomologyReport:
    """Mod-p first-homology dimension of one quotient in a tower."""

    n: int
    index: int               # |G : G_n| = quotient order
    p: int
    dim_p: int
    gradient_term: Fraction  # dim_p / index
    degenerate: bool = False


def schreier_homology_dim(
    tower: TowerSpec, n: int, p: int, element_cap: int = DEFAULT_ELEMENT_CAP
) -> HomologyReport:
    """dim over F_p of H_1 of the index-n subgroup, from relator lifts.

    The quotient Cayley graph has cycle space of dimension |E| - |V| + 1;
    subtracting the F_p-rank of the relator-lift cycle vectors taken at
    every vertex gives the homology dimension.  An empty relator tuple means
    the group is free, so nothing is subtracted.  A presentation is
    required: relators=None is an error.  The one-vertex quotient has no
    edges and is reported as degenerate with dimension 0.
    """
    if tower.relators is None:
        raise TowerError("homology needs a presentation (relators missing)")
    cay = cayley_graph(tower, n, element_cap)
    G = cay.graph
    index = G.vertex_count
    if G.edge_count == 0:
        return HomologyReport(
            n=n, index=index, p=p, dim_p=0,
            gradient_term=Fraction(0, max(index, 1)), degenerate=True,
        )
    if len(connected_components(G)) != 1:
        raise TowerError(f"quotient {n}: Cayley graph is not connected")
    cyc = G.edge_count - G.vertex_count + 1
    field = FieldSpec.prime(p)
    acc = CycleAccumulator(field, cyc)
    for word in tower.relators:
        if acc.saturated:
            break
        for v in range(G.vertex_count):
            chain = relator_lift_chain(cay, word, v)
            if chain:
                acc.add(chain)
                if acc.saturated:
                    break
    dim = cyc - acc.rank
    return HomologyReport(
        n=n, index=index, p=p, dim_p=dim, gradient_term=Fraction(dim, index)
    )


def known_rank_gradient_term(tower: TowerSpec, n: int):
    """d(G_n) / index for families with a known closed form, else None.

    Free groups of rank r: the index-i subgroup is free of rank
    1 + i*(r - 1).  Z^d towers: every finite-index subgroup is again Z^d,
    needing d generators.  Anything else returns None; no estimates.
    """
    formula = tower.rank_formula()
    if formula is None:
        return None
    kind, r = formula
    index = tower.expected_order(n)
    if kind == "free":
        d = 1 + index * (r - 1)
    elif kind == "abelian":
        d = r
    else:
        return None
    return Fraction(d, index)


# ---------------------------------------------------------------------------
# subgroup/forest compression


@dataclass(frozen=True)
class CompressionResult:
    """Compressed companion graph of one quotient plus its certificates.

    ``graph`` keeps the Cayley edges of the subgroup image (under the word
    generators) and, for every outside vertex, the edges of its
    lexicographically minimal shortest path into the subgroup.  Those path
    edges form a forest with exactly |V| - |subgroup| edges.
    """

    graph: Graph
    witness: EquivalenceWitness
    subgroup_vertices: tuple
    forest_edge_count: int
    reach: int              # max distance from any vertex to the subgroup
    subgroup_lipschitz: int  # least L with d_sub <= L * d_ambient on the subgroup
    edge_ratio: Fraction


def coset_compression(
    tower: TowerSpec,
    k: int,
    n: int,
    subgroup_words,
    element_cap: int = DEFAULT_ELEMENT_CAP,
) -> CompressionResult:
    """Compress quotient ``n`` through the index-``k`` subgroup generated by
    ``subgroup_words`` (words over the tower's generators).

    Requires n > k.  The word images must generate exactly the expected
    subgroup image (order = quotient order / subgroup index), otherwise the
    input is rejected.
    """
    if n <= k:
        raise TowerError(f"need n > k, got n={n}, k={k}")
    cay = cayley_graph(tower, n, element_cap)
    G = cay.graph
    group = cay.group
    words = [parse_word(w) if isinstance(w, str) else tuple(w) for w in subgroup_words]
    if not words:
        raise TowerError("subgroup generating words must be nonempty")
    t_elems = []
    seen = set()
    for w in words:
        g = word_element(group, cay.images, w)
        if g not in seen:
            seen.add(g)
            t_elems.append(g)
    for g in list(t_elems):
        gi = group.inv(g)
        if gi not in seen:
            seen.add(gi)
            t_elems.append(gi)

    # closure of the word images: the subgroup image and its Cayley edges
    identity = group.identity
    sub = {cay.index_of[identity]}
    sub_pairs = []
    seen_pairs = set()
    queue = deque([identity])
    while queue:
        g = queue.popleft()
        gi = cay.index_of[g]
        for t in t_elems:
            h = group.mul(t, g)
            hi = cay.index_of[h]
            if hi not in sub:
                sub.add(hi)
                queue.append(h)
            if hi != gi:
                key = (gi, hi) if gi < hi else (hi, gi)
                if key not in seen_pairs:
                    seen_pairs.add(key)
                    sub_pairs.append(key)
    expected_index = tower.subgroup_index(k)
    if expected_index is not None:
        if G.vertex_count % expected_index != 0 or len(sub) != G.vertex_count // expected_index:
            raise TowerError(
                f"words generate a subgroup image of order {len(sub)}, expected "
                f"{G.vertex_count} / {expected_index}"
            )

    # multi-source BFS distance to the subgroup
    INF = -1
    dist = [INF] * G.vertex_count
    frontier = sorted(sub)
    for v in frontier:
        dist[v] = 0
    queue = deque(frontier)
    while queue:
        x = queue.popleft()
        for y, _, _ in G.adjacency[x]:
            if dist[y] == INF:
                dist[y] = dist[x] + 1
                queue.append(y)
    if any(d == INF for d in dist):
        raise TowerError("subgroup image does not reach every vertex")
    reach = max(dist)

    # lexicographically minimal shortest paths = follow the least closer
    # neighbor; one parent edge per outside vertex, hence a forest
    forest_pairs = []
    for x in range(G.vertex_count):
        if dist[x] == 0:
            continue
        parent = min(y for y, _, _ in G.adjacency[x] if dist[y] == dist[x] - 1)
        forest_pairs.append((x, parent) if x < parent else (parent, x))

    pairs = sub_pairs + sorted(forest_pairs)
    H = build_graph(G.vertex_count, pairs)
    H_sub = build_graph(G.vertex_count, sub_pairs)

    forward = domination_constant(G, H)   # d_G <= forward * d_H over H-edges
    backward = domination_constant(H, G)  # d_H <= backward * d_G over G-edges
    witness = EquivalenceWitness(
        forward=forward, backward=backward, verified_indices=(n,)
    )

    lipschitz = _subgroup_lipschitz(G, H_sub, sorted(sub), cay)
    return CompressionResult(
        graph=H,
        witness=witness,
        subgroup_vertices=tuple(sorted(sub)),
        forest_edge_count=len(forest_pairs),
        reach=reach,
        subgroup_lipschitz=lipschitz,
        edge_ratio=Fraction(H.edge_count, H.vertex_count),
    )


def _subgroup_lipschitz(G: Graph, H_sub: Graph, sub_vertices, cay: CayleyGraph) -> int:
    """Least integer L with d_sub(e, z) <= L * d_G(e, z) on the subgroup image.

    ``H_sub`` carries only the subgroup Cayley edges.  Right translations
    act as automorphisms of both graphs, so distances from the identity
    vertex determine all subgroup pairs.
    """
    e = cay.index_of[cay.group.identity]
    if len(sub_vertices) <= 1:
        return 1
    dH = _bfs_array(H_sub, e)
    dG = _bfs_array(G, e)
    best = 1
    for z in sub_vertices:
        if z == e:
            continue
        if dH[z] < 0 or dG[z] <= 0:
            raise TowerError("subgroup image disconnected in compression")
        need = -(-dH[z] // dG[z])  # ceil division
        if need > best:
            best = need
    return best
