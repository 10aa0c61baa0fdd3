"""Report envelopes: exact-rational JSON, determinism hashing, CSV flattening.

Rationals are serialized as {"num": str, "den": str, "approx": float}; the
string fields are authoritative, the float is a convenience only.  A
report's determinism hash covers the command, the semantic configuration
(execution details like worker counts and output paths are excluded) and the
results; timestamps and timings live in a separate volatile block outside
the hash.
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from fractions import Fraction

SCHEMA = "graphseq-report/1"
TOOL_VERSION = "0.1.0"

# config keys that do not influence results
_NON_SEMANTIC_CONFIG = {"jobs", "out", "csv", "out_dir"}


def rational(value) -> dict:
    fr = Fraction(value)
    return {
        "num": str(fr.numerator),
        "den": str(fr.denominator),
        "approx": float(fr),
    }


def parse_rational(data) -> Fraction:
    return Fraction(int(data["num"]), int(data["den"]))


def canonical_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"))


def determinism_hash(command: str, config: dict, results) -> str:
    semantic = {k: v for k, v in sorted(config.items())
                if k not in _NON_SEMANTIC_CONFIG}
    payload = {
        "schema": SCHEMA,
        "tool_version": TOOL_VERSION,
        "command": command,
        "config": semantic,
        "results": results,
    }
    digest = hashlib.sha256(canonical_json(payload).encode("utf-8")).hexdigest()
    return f"sha256:{digest}"


def build_envelope(command: str, config: dict, results, timings=None) -> dict:
    return {
        "schema": SCHEMA,
        "tool_version": TOOL_VERSION,
        "command": command,
        "config": config,
        "results": results,
        "determinism_hash": determinism_hash(command, config, results),
        "volatile": {
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
            "timings_seconds": timings or {},
        },
    }


def write_report(path, envelope: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(envelope, fh, sort_keys=True, indent=2)
        fh.write("\n")


def read_report(path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


CSV_HEADER = ["kind", "family", "n", "q", "field", "num", "den", "approx", "status"]


def cell_rows_from_beta(family: str, beta_jsonable: dict):
    for cell in beta_jsonable["cells"]:
        value = cell["value"]
        yield {
            "kind": "s_q",
            "family": family,
            "n": cell["n"],
            "q": cell["q"],
            "field": cell["field"],
            "num": value["num"] if value else "",
            "den": value["den"] if value else "",
            "approx": value["approx"] if value else "",
            "status": cell["status"],
        }


def cell_rows_from_edge_numbers(family: str, fragment_jsonable: dict):
    for n, value in fragment_jsonable["per_n"].items():
        yield {
            "kind": "edge_ratio",
            "family": family,
            "n": n,
            "q": "",
            "field": "",
            "num": value["num"],
            "den": value["den"],
            "approx": value["approx"],
            "status": "ok",
        }


def write_cells_csv(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_HEADER)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def merge_reports(envelopes) -> dict:
    """Combine several reports; the merged hash folds the component hashes."""
    parts = sorted(
        (env["determinism_hash"] for env in envelopes),
    )
    digest = hashlib.sha256(canonical_json(parts).encode("utf-8")).hexdigest()
    return {
        "schema": SCHEMA,
        "tool_version": TOOL_VERSION,
        "command": "report-merge",
        "component_hashes": parts,
        "determinism_hash": f"sha256:{digest}",
        "reports": [
            {k: v for k, v in env.items() if k != "volatile"} for env in envelopes
        ],
        "volatile": {
            "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S", time.gmtime()),
            "timings_seconds": {},
        },
    }
