"""Batch command-line front end.

Every subcommand validates its configuration, runs the pipeline, and writes
a JSON report that embeds the configuration verbatim, the tool version, a
determinism hash over the semantic content, and per-cell timings in a
volatile block.  Exit codes: 0 success, 1 invalid configuration,
2 computation failure (a partial report is still written when possible),
3 I/O failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import reports, towers
from .graphs import (
    GraphError,
    INFINITE,
    girth,
    read_edge_list_path,
    write_edge_list_path,
)
from .hyperfinite import (
    CoveringFamily,
    PartitionError,
    box_partition,
    min_small_set_expansion,
    partition_from_covering,
    tree_partition,
    validate_partition,
)
from .invariants import (
    CostStrategy,
    CounterExample,
    InvariantError,
    beta_estimate,
    cost_upper_bound,
    certify_equivalence,
    edge_number_estimate,
    equivalence_rank_inequalities,
    sandwich_report,
)
from .sequences import SequenceError, make_sequence, torus_coordinates
from .towers import TowerError

_ERRORS = (GraphError, InvariantError, PartitionError, SequenceError, TowerError,
           ValueError, KeyError)


def parse_window(text: str):
    """Window syntax: 'lo:hi', 'lo:hi:step', or a comma list of indices."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
            step = 1
        elif len(parts) == 3:
            lo, hi, step = int(parts[0]), int(parts[1]), int(parts[2])
        else:
            raise ValueError(f"bad window {text!r}")
        if step < 1 or hi < lo:
            raise ValueError(f"bad window {text!r}")
        return list(range(lo, hi + 1, step))
    return [int(t) for t in text.split(",") if t.strip()]


def parse_fraction(text: str) -> Fraction:
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(text))


def _default_jobs() -> int:
    env = os.environ.get("GRAPHSEQ_JOBS", "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def _sequence_from_args(args, family_attr="family"):
    family = getattr(args, family_attr)
    params = {}
    if family == "regular-girth":
        params = {
            "degree": args.degree,
            "girth_floor": args.girth_floor,
            "seed": args.seed,
        }
    if family == "files":
        paths = getattr(args, "graphs", None)
        if not paths:
            raise SequenceError("files family needs --graphs")
        indices = list(range(len(paths)))
        return make_sequence("files", indices, {"paths": list(paths)})
    window = parse_window(args.window)
    return make_sequence(family, window, params)


def _config_dict(args, keys):
    config = {}
    for key in keys:
        config[key] = getattr(args, key.replace("-", "_"), None)
    return config


def _finish(args, command, config, results, timings=None):
    envelope = reports.build_envelope(command, config, results, timings)
    out = getattr(args, "out", None)
    if out:
        reports.write_report(out, envelope)
    else:
        import json

        sys.stdout.write(json.dumps(envelope, sort_keys=True, indent=2) + "\n")
    return envelope


# ---------------------------------------------------------------------------
# subcommands


def cmd_gen(args) -> int:
    seq = _sequence_from_args(args)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = []
    for n, G in seq.graphs():
        name = f"{args.family}-{n}.edges"
        write_edge_list_path(G, out_dir / name)
        files.append({
            "index": n,
            "file": name,
            "vertices": G.vertex_count,
            "edges": G.edge_count,
            "max_degree": G.max_degree,
        })
    config = _config_dict(args, ["family", "window", "seed", "degree",
                                 "girth_floor", "out_dir"])
    results = {"files": files}
    args.out = str(out_dir / "manifest.json")
    _finish(args, "gen", config, results)
    return 0


def cmd_beta(args) -> int:
    seq = _sequence_from_args(args)
    fields = [f.strip() for f in args.fields.split(",") if f.strip()]
    fragment, timings = beta_estimate(
        seq, fields, args.qmax, timeout=args.timeout, jobs=args.jobs
    )
    edge = edge_number_estimate(seq)
    results = {
        "family": seq.family,
        "indices": list(seq.indices),
        "edge_number": edge.to_jsonable(),
        "beta": fragment.to_jsonable(),
    }
    config = _config_dict(args, ["family", "window", "qmax", "fields", "seed",
                                 "degree", "girth_floor", "timeout", "jobs",
                                 "out", "csv"])
    _finish(args, "beta", config, results, timings)
    if args.csv:
        rows = list(reports.cell_rows_from_edge_numbers(seq.family, results["edge_number"]))
        rows += list(reports.cell_rows_from_beta(seq.family, results["beta"]))
        reports.write_cells_csv(args.csv, rows)
    return 2 if fragment.partial else 0


def cmd_cost(args) -> int:
    seq = _sequence_from_args(args)
    strategy = CostStrategy.parse(args.strategy)
    fragment = cost_upper_bound(seq, strategy)
    results = {
        "family": seq.family,
        "indices": list(seq.indices),
        "cost": fragment.to_jsonable(),
    }
    config = _config_dict(args, ["family", "window", "strategy", "jobs", "out"])
    _finish(args, "cost", config, results)
    return 0


def cmd_equiv(args) -> int:
    seq_a = _sequence_from_args(args, "family_a")
    seq_b = _sequence_from_args(args, "family_b")
    outcome = certify_equivalence(seq_a, seq_b)
    if isinstance(outcome, CounterExample):
        results = {
            "equivalent": False,
            "counterexample": {
                "index": outcome.index,
                "edge": list(outcome.edge),
                "direction": outcome.direction,
            },
        }
    else:
        results = {
            "equivalent": True,
            "witness": {
                "forward": int(outcome.forward),
                "backward": int(outcome.backward),
                "verified_indices": list(outcome.verified_indices),
            },
        }
    config = _config_dict(args, ["family_a", "family_b", "window", "out"])
    _finish(args, "equiv", config, results)
    return 0


def cmd_hyperfinite(args) -> int:
    if args.graph:
        G = read_edge_list_path(args.graph)
        label = args.graph
    else:
        seq = _sequence_from_args(args)
        if len(seq.indices) != 1:
            raise SequenceError("hyperfinite runs one index; use --window n:n")
        G = seq.graph(seq.indices[0])
        label = f"{args.family}:{seq.indices[0]}"
    kind, _, rest = args.partitioner.partition(":")
    params = dict(item.split("=", 1) for item in rest.split(",") if item)
    bound = None
    if kind == "treenet":
        partition = tree_partition(G, int(params["q"]))
    elif kind == "box":
        side = int(round(G.vertex_count ** 0.5))
        partition = box_partition(G, torus_coordinates(side), int(params["s"]))
    elif kind == "covering":
        family = CoveringFamily.from_json_path(G, params["file"])
        result = partition_from_covering(G, family)
        partition = result.partition
        bound = result.cut_bound
    else:
        raise PartitionError(f"unknown partitioner {args.partitioner!r}")
    results = {
        "graph": label,
        "partitioner": args.partitioner,
        "partition": partition.to_jsonable(),
    }
    if bound is not None:
        results["cut_bound"] = reports.rational(bound)
    if args.epsilon is not None and args.block_cap is not None:
        validation = validate_partition(
            G, partition, parse_fraction(args.epsilon), args.block_cap
        )
        results["validation"] = {
            "passed": validation.passed,
            "block_count": validation.block_count,
            "max_block_size": validation.max_block_size,
            "cut_edge_count": validation.cut_edge_count,
            "cut_ratio": reports.rational(validation.cut_ratio),
        }
    config = _config_dict(args, ["graph", "family", "window", "partitioner",
                                 "epsilon", "block_cap", "out"])
    _finish(args, "hyperfinite", config, results)
    return 0


def cmd_expansion(args) -> int:
    G = read_edge_list_path(args.graph)
    report = min_small_set_expansion(G, args.m, cap=args.cap)
    results = {"graph": args.graph, "expansion": report.to_jsonable()}
    config = _config_dict(args, ["graph", "m", "cap", "out"])
    _finish(args, "expansion", config, results)
    return 0


def cmd_tower(args) -> int:
    if args.descriptor:
        tower, indices = towers.load_tower_descriptor(args.descriptor)
        family = tower.family_name
    else:
        family = args.family
        tower = towers.make_tower(family)
        indices = parse_window(args.window)
    primes = [int(p) for p in args.p.split(",") if p.strip()]
    rows = []
    timings = {}
    import time as _time

    for n in indices:
        start = _time.perf_counter()
        cay = towers.cayley_graph(tower, n, args.element_cap)
        G = cay.graph
        row = {
            "n": n,
            "index": G.vertex_count,
            "edges": G.edge_count,
            "degree": G.max_degree,
            "girth": "infinite" if girth(G) == INFINITE else int(girth(G)),
            "homology": [],
        }
        for p in primes:
            rep = towers.schreier_homology_dim(tower, n, p, args.element_cap)
            row["homology"].append({
                "p": p,
                "dim": rep.dim_p,
                "gradient_term": reports.rational(rep.gradient_term),
                "degenerate": rep.degenerate,
            })
        term = towers.known_rank_gradient_term(tower, n)
        row["known_rank_gradient_term"] = (
            reports.rational(term) if term is not None else None
        )
        rows.append(row)
        timings[f"n={n}"] = _time.perf_counter() - start
    results = {"family": family, "rows": rows}
    config = _config_dict(args, ["family", "descriptor", "window", "p",
                                 "element_cap", "out"])
    _finish(args, "tower", config, results, timings)
    return 0


def cmd_sandwich(args) -> int:
    seq = _sequence_from_args(args)
    primes = [int(p) for p in args.primes.split(",") if p.strip()]
    strategies = [CostStrategy.parse(s) for s in (args.strategy or ["identity"])]
    report, timings = sandwich_report(
        seq, primes, args.qmax, strategies=strategies,
        timeout=args.timeout, jobs=args.jobs,
    )
    results = {
        "family": seq.family,
        "indices": list(seq.indices),
        "sandwich": report.to_jsonable(),
    }
    config = _config_dict(args, ["family", "window", "primes", "qmax",
                                 "strategy", "timeout", "jobs", "out", "csv"])
    _finish(args, "sandwich", config, results, timings)
    if args.csv:
        rows = list(reports.cell_rows_from_beta(seq.family, results["sandwich"]["beta"]))
        reports.write_cells_csv(args.csv, rows)
    if report.violations:
        return 2
    return 0


def cmd_report_merge(args) -> int:
    envelopes = [reports.read_report(p) for p in args.inputs]
    merged = reports.merge_reports(envelopes)
    reports.write_report(args.out, merged)
    return 0


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphseq",
        description="Exact invariants of bounded-degree graph sequences.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_family(p, attr="--family"):
        p.add_argument(attr, default="torus2",
                       help="cycle | torus2 | torus2diag | regular-girth | "
                            "files | tower:<name>")
        p.add_argument("--window", default="4:8",
                       help="index window: lo:hi[:step] or comma list")
        p.add_argument("--seed", type=int, default=0, help="family seed")
        p.add_argument("--degree", type=int, default=3,
                       help="regular-girth: vertex degree")
        p.add_argument("--girth-floor", type=int, default=8, dest="girth_floor",
                       help="regular-girth: required girth excess")
        p.add_argument("--graphs", nargs="*", default=None,
                       help="files family: edge-list paths in window order")

    p = sub.add_parser("gen", help="generate a family window as edge-list files")
    add_family(p)
    p.add_argument("--out-dir", required=True, dest="out_dir")
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("beta", help="s_q table and beta proxy over a window")
    add_family(p)
    p.add_argument("--qmax", type=int, default=8)
    p.add_argument("--fields", default="Q,F2")
    p.add_argument("--timeout", type=float, default=None,
                   help="per-cell timeout in seconds")
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.add_argument("--out", default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(fn=cmd_beta)

    p = sub.add_parser("cost", help="certified cost upper bound via a strategy")
    add_family(p)
    p.add_argument("--strategy", default="identity",
                   help="identity | box:s=8 | treenet:q=4 | coset:k=4,words=a^4")
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_cost)

    p = sub.add_parser("equiv", help="certify equivalence of two families")
    p.add_argument("--family-a", required=True, dest="family_a")
    p.add_argument("--family-b", required=True, dest="family_b")
    p.add_argument("--window", default="4:8")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--girth-floor", type=int, default=8, dest="girth_floor")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_equiv)

    p = sub.add_parser("hyperfinite", help="partition a graph and validate")
    add_family(p)
    p.add_argument("--graph", default=None, help="edge-list file instead of a family")
    p.add_argument("--partitioner", required=True,
                   help="treenet:q=3 | box:s=8 | covering:file=fam.json")
    p.add_argument("--epsilon", default=None, help="cut-ratio bound, e.g. 1/4")
    p.add_argument("--block-cap", type=int, default=None, dest="block_cap")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_hyperfinite)

    p = sub.add_parser("expansion", help="exact small-set expansion minimum")
    p.add_argument("--graph", required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--cap", type=int, default=10)
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_expansion)

    p = sub.add_parser("tower", help="Cayley tower homology and gradients")
    p.add_argument("--family", default=None,
                   help="cyclic | torus2 | torus2diag | heis | freeF2-sl2")
    p.add_argument("--descriptor", default=None, help="tower descriptor JSON")
    p.add_argument("--window", default="4:8")
    p.add_argument("--p", default="2,3", help="comma list of primes")
    p.add_argument("--element-cap", type=int, default=towers.DEFAULT_ELEMENT_CAP,
                   dest="element_cap")
    p.add_argument("--out", default=None)
    p.set_defaults(fn=cmd_tower)

    p = sub.add_parser("sandwich", help="beta proxies vs cost bounds with gaps")
    add_family(p)
    p.add_argument("--primes", default="2,3")
    p.add_argument("--qmax", type=int, default=6)
    p.add_argument("--strategy", action="append", default=None,
                   help="repeatable; as in cost")
    p.add_argument("--timeout", type=float, default=None)
    p.add_argument("--jobs", type=int, default=_default_jobs())
    p.add_argument("--out", default=None)
    p.add_argument("--csv", default=None)
    p.set_defaults(fn=cmd_sandwich)

    p = sub.add_parser("report-merge", help="merge report JSONs")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_report_merge)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags and 0 on --help; fold into our codes
        return 0 if exc.code == 0 else 1
    try:
        return args.fn(args)
    except _ERRORS as exc:
        sys.stderr.write(f"graphseq: invalid input: {exc}\n")
        return 1
    except OSError as exc:
        sys.stderr.write(f"graphseq: i/o error: {exc}\n")
        return 3
    except Exception as exc:  # computation failure
        sys.stderr.write(f"graphseq: computation failed: {exc}\n")
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
