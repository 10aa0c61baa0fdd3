"""Sequence-level invariants: edge numbers, beta proxies, equivalence
certificates, cost upper bounds, and the rank sandwich report.

Limit quantities (liminf over n, inf over q) are replaced by explicitly
labelled window statistics: a per-index table, the window minimum, the
minimum over the tail half of the window, and a monotonicity flag.  Nothing
is extrapolated; every reported bound travels with a recheckable witness.
"""

from __future__ import annotations

import time
from collections import deque
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .cyclespace import FieldSpec, cycle_rank_profile_partial
from .graphs import (
    Graph,
    GraphError,
    EquivalenceWitness,
    INFINITE,
    build_graph,
    domination_detail,
)
from .hyperfinite import Partition, box_partition, tree_partition
from .sequences import GraphSequence, build_family_graph, torus_coordinates
from . import towers


class InvariantError(ValueError):
    """Inapplicable strategy or inconsistent sequence pair."""


def _map_tasks(fn, tasks, jobs: int):
    """Deterministic map over picklable tasks, optionally multi-process."""
    tasks = list(tasks)
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks, chunksize=1))


def trend(values) -> str:
    """"decreasing", "increasing", "constant" or "mixed" for a series."""
    vals = [v for v in values if v is not None]
    if len(vals) <= 1:
        return "constant"
    down = all(b <= a for a, b in zip(vals, vals[1:]))
    up = all(b >= a for a, b in zip(vals, vals[1:]))
    if down and up:
        return "constant"
    if down:
        return "decreasing"
    if up:
        return "increasing"
    return "mixed"


def tail_indices(indices) -> tuple:
    """The larger half of the window; stand-in domain for liminf."""
    indices = sorted(indices)
    return tuple(indices[len(indices) // 2:])


# ---------------------------------------------------------------------------
# edge number


@dataclass(frozen=True)
class EdgeNumberFragment:
    per_n: dict                 # n -> Fraction |E|/|V|
    window_min: Fraction
    trend: str

    def to_jsonable(self):
        from .reports import rational
        return {
            "per_n": {str(n): rational(v) for n, v in sorted(self.per_n.items())},
            "window_min": rational(self.window_min),
            "trend": self.trend,
        }


def edge_number_estimate(seq: GraphSequence) -> EdgeNumberFragment:
    """Exact |E|/|V| per index plus the window minimum."""
    per_n = {}
    for n, G in seq.graphs():
        per_n[n] = Fraction(G.edge_count, G.vertex_count)
    if not per_n:
        raise InvariantError("empty window")
    series = [per_n[n] for n in sorted(per_n)]
    return EdgeNumberFragment(
        per_n=per_n, window_min=min(series), trend=trend(series)
    )


# ---------------------------------------------------------------------------
# beta estimates


@dataclass(frozen=True)
class SqCell:
    n: int
    q: int
    field: str
    value: Fraction | None
    status: str                 # "ok" | "timeout"


@dataclass(frozen=True)
class BetaFragment:
    """s_q table over the window plus the beta proxy per field.

    The proxy is min over q of the minimum of s_q over the tail half of the
    window, a finite stand-in for inf_q liminf_n; ``partial`` marks that
    some cell timed out and was skipped rather than guessed.
    """

    q_max: int
    fields: tuple
    cells: tuple                # SqCell, ordered by (n, field, q)
    beta_proxy: dict            # field name -> Fraction | None
    tail: tuple
    partial: bool

    def cell_value(self, n, q, field):
        for c in self.cells:
            if c.n == n and c.q == q and c.field == field:
                return c.value
        return None

    def to_jsonable(self):
        from .reports import rational
        return {
            "q_max": self.q_max,
            "fields": list(self.fields),
            "tail_indices": list(self.tail),
            "partial": self.partial,
            "beta_proxy": {
                f: (rational(v) if v is not None else None)
                for f, v in sorted(self.beta_proxy.items())
            },
            "cells": [
                {
                    "n": c.n, "q": c.q, "field": c.field,
                    "value": rational(c.value) if c.value is not None else None,
                    "status": c.status,
                }
                for c in self.cells
            ],
        }


def _profile_task(args):
    """One (index, field) rank-profile cell group; top-level for pickling."""
    family, params, n, field_name, q_max, timeout = args
    G = build_family_graph(family, params, n)
    field = FieldSpec.parse(field_name)
    deadline = None if timeout is None else time.monotonic() + timeout
    start = time.perf_counter()
    profile, timed_out = cycle_rank_profile_partial(G, q_max, field, deadline)
    elapsed = time.perf_counter() - start
    rows = []
    for q in range(3, q_max + 1):
        if q in profile:
            value = Fraction(G.edge_count - profile[q], G.vertex_count) - 1
            rows.append((n, q, field_name, value, "ok"))
        else:
            rows.append((n, q, field_name, None, "timeout"))
    return rows, (n, field_name, elapsed), timed_out


def beta_estimate(seq: GraphSequence, field_names, q_max: int,
                  timeout=None, jobs: int = 1):
    """(BetaFragment, timings) for the window; cells that time out are
    recorded as absent, never guessed."""
    if q_max < 3:
        raise InvariantError("q_max must be >= 3")
    field_names = [FieldSpec.parse(f).name for f in field_names]
    tasks = [
        (seq.family, seq.params, n, f, q_max, timeout)
        for n in seq.indices
        for f in field_names
    ]
    results = _map_tasks(_profile_task, tasks, jobs)
    cells = []
    timings = {}
    partial = False
    for rows, (n, fname, elapsed), timed_out in results:
        partial = partial or timed_out
        timings[f"n={n},field={fname}"] = elapsed
        for row in rows:
            cells.append(SqCell(*row))
    cells.sort(key=lambda c: (c.n, field_names.index(c.field), c.q))
    tail = tail_indices(seq.indices)
    proxy = {}
    for f in field_names:
        candidates = [
            c.value for c in cells
            if c.field == f and c.n in tail and c.value is not None
        ]
        proxy[f] = min(candidates) if candidates else None
    fragment = BetaFragment(
        q_max=q_max,
        fields=tuple(field_names),
        cells=tuple(cells),
        beta_proxy=proxy,
        tail=tail,
        partial=partial,
    )
    return fragment, timings


# ---------------------------------------------------------------------------
# equivalence certification


@dataclass(frozen=True)
class CounterExample:
    """An edge whose endpoints are disconnected in the other sequence."""

    index: int
    edge: tuple
    direction: str              # "forward" = d_A <= L d_B failed, "backward" opposite


def certify_equivalence(seq_a: GraphSequence, seq_b: GraphSequence):
    """Uniform two-sided domination constants over the window.

    Returns an EquivalenceWitness whose ``forward`` is the least L with
    d_A <= L * d_B on every index (and ``backward`` for the other
    direction), or a CounterExample naming the first disconnection.
    The sequences must live on identical vertex sets per index.
    """
    forward = 1
    backward = 1
    indices = []
    for n in seq_a.indices:
        A = seq_a.graph(n)
        B = seq_b.graph(n)
        if A.vertex_count != B.vertex_count:
            raise InvariantError(
                f"vertex mismatch at index {n}: {A.vertex_count} vs {B.vertex_count}"
            )
        L_f, edge_f = domination_detail(A, B)
        if L_f == INFINITE:
            return CounterExample(index=n, edge=edge_f, direction="forward")
        L_b, edge_b = domination_detail(B, A)
        if L_b == INFINITE:
            return CounterExample(index=n, edge=edge_b, direction="backward")
        forward = max(forward, L_f)
        backward = max(backward, L_b)
        indices.append(n)
    return EquivalenceWitness(
        forward=forward, backward=backward, verified_indices=tuple(indices)
    )


# ---------------------------------------------------------------------------
# cost upper bounds


@dataclass(frozen=True)
class CostStrategy:
    """Picklable descriptor: identity, box:s, treenet:q, or coset:k,words."""

    kind: str
    params: dict

    @staticmethod
    def parse(text: str) -> "CostStrategy":
        head, _, rest = text.partition(":")
        params = {}
        if rest:
            for item in rest.split(","):
                key, _, val = item.partition("=")
                params[key] = val
        if head == "identity":
            return CostStrategy("identity", {})
        if head == "box":
            return CostStrategy("box", {"s": int(params["s"])})
        if head == "treenet":
            return CostStrategy("treenet", {"q": int(params["q"])})
        if head == "coset":
            words = params["words"].split(";")
            return CostStrategy("coset", {"k": int(params["k"]), "words": words})
        raise InvariantError(f"unknown strategy {text!r}")

    def label(self) -> str:
        if self.kind == "identity":
            return "identity"
        if self.kind == "box":
            return f"box:s={self.params['s']}"
        if self.kind == "treenet":
            return f"treenet:q={self.params['q']}"
        if self.kind == "coset":
            return f"coset:k={self.params['k']},words={';'.join(self.params['words'])}"
        return self.kind


def compression_graph(G: Graph, partition: Partition) -> Graph:
    """Cut edges plus a BFS spanning forest inside every block.

    The result's edges are a subset of G's, so it dominates G with
    constant 1; within a block any two vertices stay connected through the
    block's forest.
    """
    pairs = [G.edges[eid] for eid in partition.cut_edge_ids]
    seen = [False] * G.vertex_count
    assign = partition.assignment
    forest_pairs = []
    for root in range(G.vertex_count):
        if seen[root]:
            continue
        seen[root] = True
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for y, _, _ in G.adjacency[x]:
                if not seen[y] and assign[y] == assign[x]:
                    seen[y] = True
                    forest_pairs.append((x, y) if x < y else (y, x))
                    queue.append(y)
    return build_graph(G.vertex_count, pairs + sorted(forest_pairs))


@dataclass(frozen=True)
class CostFragment:
    """Edge ratios of the constructed companion sequence plus certificates.

    ``bound`` is the window minimum of e(H_n) and is only set when the
    equivalence witness is finite uniformly over the window.
    """

    strategy: str
    per_n: dict                 # n -> Fraction e(H_n)
    witness: EquivalenceWitness | None
    bound: Fraction | None
    details: dict

    def to_jsonable(self):
        from .reports import rational
        return {
            "strategy": self.strategy,
            "per_n": {str(n): rational(v) for n, v in sorted(self.per_n.items())},
            "bound": rational(self.bound) if self.bound is not None else None,
            "witness": None if self.witness is None else {
                "forward": _enc_l(self.witness.forward),
                "backward": _enc_l(self.witness.backward),
                "verified_indices": list(self.witness.verified_indices),
            },
            "details": self.details,
        }


def _enc_l(value):
    return "unbounded" if value == INFINITE else int(value)


def cost_upper_bound(seq: GraphSequence, strategy: CostStrategy) -> CostFragment:
    """Certified cost upper bound via an explicit compression per index."""
    per_n = {}
    forward = 1
    backward = 1
    details = {}
    indices = []
    for n in seq.indices:
        G = seq.graph(n)
        if strategy.kind == "identity":
            H = G
            w_f, w_b = 1, 1
        elif strategy.kind == "box":
            if seq.family not in ("torus2", "torus2diag"):
                raise InvariantError("box strategy needs a torus family")
            side = int(round(G.vertex_count ** 0.5))
            partition = box_partition(G, torus_coordinates(side), strategy.params["s"])
            H = compression_graph(G, partition)
            w_f, _ = domination_detail(G, H)
            w_b, _ = domination_detail(H, G)
        elif strategy.kind == "treenet":
            partition = tree_partition(G, strategy.params["q"])
            H = compression_graph(G, partition)
            w_f, _ = domination_detail(G, H)
            w_b, _ = domination_detail(H, G)
        elif strategy.kind == "coset":
            if not seq.family.startswith("tower:"):
                raise InvariantError("coset strategy needs a tower-backed family")
            tower = towers.make_tower(seq.family.split(":", 1)[1])
            res = towers.coset_compression(
                tower, strategy.params["k"], n, strategy.params["words"]
            )
            H = res.graph
            w_f, w_b = res.witness.forward, res.witness.backward
            details[str(n)] = {
                "forest_edges": res.forest_edge_count,
                "subgroup_size": len(res.subgroup_vertices),
                "reach": res.reach,
                "subgroup_lipschitz": res.subgroup_lipschitz,
            }
        else:
            raise InvariantError(f"unknown strategy kind {strategy.kind!r}")
        if w_f == INFINITE or w_b == INFINITE:
            raise InvariantError(f"strategy produced a non-equivalent graph at {n}")
        per_n[n] = Fraction(H.edge_count, H.vertex_count)
        forward = max(forward, w_f)
        backward = max(backward, w_b)
        indices.append(n)
    witness = EquivalenceWitness(
        forward=forward, backward=backward, verified_indices=tuple(indices)
    )
    bound = min(per_n.values()) if witness.both_finite else None
    return CostFragment(
        strategy=strategy.label(),
        per_n=per_n,
        witness=witness,
        bound=bound,
        details=details,
    )


# ---------------------------------------------------------------------------
# sandwich report


@dataclass(frozen=True)
class SandwichReport:
    """beta_Q <= beta_{F_p} <= (cost bound - 1), with the per-cell evidence.

    ``violations`` lists any cell where s_q over Q exceeded s_q over F_p;
    it must be empty (integer cycle matrices can only lose rank mod p).
    """

    beta: BetaFragment
    cost: tuple                 # CostFragment per strategy
    gap_rows: tuple             # (field, beta_proxy, best_bound-1, gap)
    violations: tuple
    notes: str

    def to_jsonable(self):
        from .reports import rational

        def opt(v):
            return rational(v) if v is not None else None

        return {
            "beta": self.beta.to_jsonable(),
            "cost": [c.to_jsonable() for c in self.cost],
            "gap_rows": [
                {"field": f, "beta_proxy": opt(b), "cost_minus_one": opt(c),
                 "gap": opt(g)}
                for f, b, c, g in self.gap_rows
            ],
            "violations": [
                {"n": n, "q": q, "field": f} for n, q, f in self.violations
            ],
            "notes": self.notes,
        }


_SANDWICH_NOTE = (
    "rank over F_p of an integer cycle matrix never exceeds its rank over Q, "
    "so s_q over Q is <= s_q over F_p cell-wise; the per-field beta proxies "
    "are tail-window minima, not limits"
)


def sandwich_report(seq: GraphSequence, primes, q_max: int,
                    strategies=None, timeout=None, jobs: int = 1):
    """Beta proxies over Q and each F_p against certified cost bounds."""
    fields = ["Q"] + [FieldSpec.prime(p).name for p in primes]
    beta, timings = beta_estimate(seq, fields, q_max, timeout=timeout, jobs=jobs)
    if strategies is None:
        strategies = [CostStrategy("identity", {})]
    cost = tuple(cost_upper_bound(seq, st) for st in strategies)
    bounds = [c.bound for c in cost if c.bound is not None]
    best = min(bounds) if bounds else None
    violations = []
    by_key = {(c.n, c.q, c.field): c.value for c in beta.cells}
    for n in seq.indices:
        for q in range(3, q_max + 1):
            vq = by_key.get((n, q, "Q"))
            if vq is None:
                continue
            for p in primes:
                vp = by_key.get((n, q, f"F{p}"))
                if vp is not None and vq > vp:
                    violations.append((n, q, f"F{p}"))
    gap_rows = []
    for f in fields:
        proxy = beta.beta_proxy.get(f)
        cm1 = best - 1 if best is not None else None
        gap = cm1 - proxy if (cm1 is not None and proxy is not None) else None
        gap_rows.append((f, proxy, cm1, gap))
    report = SandwichReport(
        beta=beta,
        cost=cost,
        gap_rows=tuple(gap_rows),
        violations=tuple(violations),
        notes=_SANDWICH_NOTE,
    )
    return report, timings


# ---------------------------------------------------------------------------
# finite-index rank inequalities for nested pairs


@dataclass(frozen=True)
class InequalityRow:
    n: int
    field: str
    q: int
    s_q_sub: Fraction           # s_q of the sparse (dominated) graph
    s_q_full: Fraction          # s_q of the edge-richer graph
    s_qL_sub: Fraction
    ok_first: bool              # s_q_sub >= s_q_full
    ok_second: bool             # s_q_full >= s_qL_sub


@dataclass(frozen=True)
class InequalityReport:
    L: int
    q: int
    rows: tuple
    passed: bool

    def to_jsonable(self):
        from .reports import rational
        return {
            "L": self.L,
            "q": self.q,
            "passed": self.passed,
            "rows": [
                {
                    "n": r.n, "field": r.field, "q": r.q,
                    "s_q_sub": rational(r.s_q_sub),
                    "s_q_full": rational(r.s_q_full),
                    "s_qL_sub": rational(r.s_qL_sub),
                    "ok_first": r.ok_first,
                    "ok_second": r.ok_second,
                }
                for r in self.rows
            ],
        }


def equivalence_rank_inequalities(seq_full: GraphSequence, seq_sub: GraphSequence,
                                  q: int, field_names=("Q",), jobs: int = 1) -> InequalityReport:
    """For nested edge sets (sub inside full) with uniform constant L
    (every full-edge spans a sub-path of length <= L), check per index and
    field that s_q(sub) >= s_q(full) and s_q(full) >= s_{qL}(sub) when q > L.
    """
    L = 1
    for n in seq_full.indices:
        F = seq_full.graph(n)
        S = seq_sub.graph(n)
        if F.vertex_count != S.vertex_count:
            raise InvariantError(f"vertex mismatch at index {n}")
        sub_edges = set(S.edges)
        if not sub_edges.issubset(set(F.edges)):
            raise InvariantError(f"edge sets not nested at index {n}")
        Ln, edge = domination_detail(S, F)
        if Ln == INFINITE:
            raise InvariantError(f"no finite constant at index {n} (edge {edge})")
        L = max(L, Ln)
    if q <= L:
        raise InvariantError(f"need q > L = {L}, got q = {q}")
    field_names = [FieldSpec.parse(f).name for f in field_names]
    tasks = []
    for n in seq_full.indices:
        for f in field_names:
            tasks.append((seq_full.family, seq_full.params, n, f, q, None))
            tasks.append((seq_sub.family, seq_sub.params, n, f, q * L, None))
    results = _map_tasks(_profile_task, tasks, jobs)
    # tasks alternate full(q) / sub(qL) in a fixed order
    rows_out = []
    passed = True
    idx = 0
    for n in seq_full.indices:
        for f in field_names:
            full_rows = results[idx][0]
            sub_rows = results[idx + 1][0]
            idx += 2
            full_map = {qq: v for (_, qq, _, v, _) in full_rows}
            sub_map = {qq: v for (_, qq, _, v, _) in sub_rows}
            row = InequalityRow(
                n=n, field=f, q=q,
                s_q_sub=sub_map[q],
                s_q_full=full_map[q],
                s_qL_sub=sub_map[q * L],
                ok_first=sub_map[q] >= full_map[q],
                ok_second=full_map[q] >= sub_map[q * L],
            )
            passed = passed and row.ok_first and row.ok_second
            rows_out.append(row)
    return InequalityReport(L=L, q=q, rows=tuple(rows_out), passed=passed)
