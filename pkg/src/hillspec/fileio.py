"""Artifact readers and writers for the command-line front end.

Artifacts are flat tables (a list of column names plus rows) with a small
metadata mapping.  CSV output is locale-independent with '.' as the
decimal separator and 12 significant digits; JSON output serializes
floats through repr, so numbers round-trip bit-identically through
`read_json_artifact`.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

from .potentials import PeriodicPotential, step_potential


@dataclass
class Artifact:
    """One tabular result: metadata, column names, and rows."""

    command: str
    columns: tuple[str, ...]
    rows: list[tuple]
    meta: dict = field(default_factory=dict)


def load_potential(path: str) -> PeriodicPotential:
    """Load a step potential from a JSON file.

    Expected layout::

        {"name": "optional", "period": 6.283...,
         "breakpoints": [0.0, ..., period], "values": [q_1, ..., q_N]}

    with len(breakpoints) == len(values) + 1.
    """
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    try:
        period = float(data["period"])
        breakpoints = [float(x) for x in data["breakpoints"]]
        values = [float(x) for x in data["values"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed potential file {path}: {exc}") from exc
    return step_potential(period, breakpoints, values,
                          name=str(data.get("name", path)))


def _as_plain(value):
    """Numpy scalars -> native Python types, so both writers treat them
    uniformly."""
    return value.item() if hasattr(value, "item") else value


def _csv_cell(value) -> str:
    value = _as_plain(value)
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return format(value, ".12g")
    return str(value)


def write_csv(fh, artifact: Artifact) -> None:
    """Write the artifact as CSV; metadata goes into leading '#' comments."""
    for key in sorted(artifact.meta):
        fh.write(f"# {key} = {_csv_cell(artifact.meta[key])}\n")
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(artifact.columns)
    for row in artifact.rows:
        writer.writerow([_csv_cell(v) for v in row])


def _json_cell(value):
    value = _as_plain(value)
    if isinstance(value, float) and math.isnan(value):
        return None  # JSON has no NaN literal
    return value


def write_json(fh, artifact: Artifact) -> None:
    json.dump({"command": artifact.command,
               "meta": artifact.meta,
               "columns": list(artifact.columns),
               "rows": [[_json_cell(v) for v in row]
                        for row in artifact.rows]},
              fh, indent=1)
    fh.write("\n")


def read_json_artifact(path: str) -> Artifact:
    """Read back an artifact written by `write_json` (bit-exact floats)."""
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return Artifact(command=data["command"],
                    columns=tuple(data["columns"]),
                    rows=[tuple(row) for row in data["rows"]],
                    meta=dict(data["meta"]))
