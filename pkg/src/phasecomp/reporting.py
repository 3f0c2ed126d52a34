"""Serialized experiment reports.

A report is a JSON document with five top-level keys:

    schema_version  report format version, currently "1"
    command         the subcommand that produced it
    config          every parameter of the run, including the seed, so the
                    payload can be reproduced bit-exactly from this echo
    results         command-specific payload
    provenance      {"artifact_version": ..., "seed": ...}

Serialization is canonical (sorted keys, two-space indent, trailing newline),
so identical config + seed + artifact version yields byte-identical files.
Wall-clock timing is deliberately kept out of the document for that reason;
the CLI prints it to stderr instead. Complex numbers appear as {"re", "im"}
pairs, and fidelity tables can additionally be exported as CSV.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from pathlib import Path

from .states import StateVector

SCHEMA_VERSION = "1"


@dataclass(frozen=True)
class Report:
    schema_version: str
    command: str
    config: dict
    results: dict
    provenance: dict

    def to_dict(self) -> dict:
        return {
            "schema_version": self.schema_version,
            "command": self.command,
            "config": self.config,
            "results": self.results,
            "provenance": self.provenance,
        }


def complex_pair(value) -> dict:
    """{"re", "im"} encoding of one complex number."""
    z = complex(value)
    return {"re": z.real, "im": z.imag}


def complex_list(values) -> list:
    return [complex_pair(z) for z in values]


def state_payload(state: StateVector) -> dict:
    return {
        "dim_per_site": state.dim_per_site,
        "num_sites": state.num_sites,
        "amplitudes": complex_list(state.amplitudes),
    }


def render_report(report: Report) -> str:
    """Canonical text form; byte-identical for identical content."""
    return json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n"


def write_report(report: Report, path) -> None:
    Path(path).write_text(render_report(report), encoding="utf-8")


def read_report(path) -> Report:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    version = data.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ValueError(f"unsupported report schema_version {version!r}")
    return Report(
        schema_version=data["schema_version"],
        command=data["command"],
        config=data["config"],
        results=data["results"],
        provenance=data["provenance"],
    )


def write_csv(path, header: list, rows: list) -> None:
    """Comma-separated table with full-precision (repr) float formatting."""
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
