"""Result records shared by the measure and experiment layers.

An ExperimentResult is a named, parameterized table of metrics plus the
fitted quantities a pass criterion looks at. Saving produces a pair of
files, <name>.result.json and <name>.rows.csv, with a schema version so
downstream readers can detect format changes.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


def linear_fit(x, y):
    """Least squares line fit, returning (slope, intercept, r_squared)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        raise ValueError("need at least two points to fit a line")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    total = np.sum((y - np.mean(y)) ** 2)
    r_squared = 1.0 if total == 0 else 1.0 - float(np.sum(resid**2)) / float(total)
    return float(slope), float(intercept), float(r_squared)


def _json_ready(value):
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, np.ndarray):
        return [_json_ready(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {k: _json_ready(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_ready(v) for v in value]
    if isinstance(value, complex):
        return {"re": value.real, "im": value.imag}
    return value


@dataclass
class ExperimentResult:
    name: str
    params: dict
    rows: list  # list of dicts with a common key set
    fitted: dict = field(default_factory=dict)
    passed: bool = False
    runtime_seconds: float = 0.0

    def __post_init__(self):
        if not self.rows:
            raise ValueError("rows must be non-empty")

    def row_columns(self) -> list:
        return list(self.rows[0].keys())

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "name": self.name,
            "params": _json_ready(self.params),
            "fitted": _json_ready(self.fitted),
            "passed": bool(self.passed),
            "runtime_seconds": float(self.runtime_seconds),
            "row_columns": self.row_columns(),
            "row_count": len(self.rows),
        }

    def save(self, output_dir) -> tuple:
        out = Path(output_dir)
        out.mkdir(parents=True, exist_ok=True)
        json_path = out / f"{self.name}.result.json"
        csv_path = out / f"{self.name}.rows.csv"
        with open(json_path, "w") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        columns = self.row_columns()
        with open(csv_path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=columns)
            writer.writeheader()
            for row in self.rows:
                writer.writerow({k: _json_ready(v) for k, v in row.items()})
        return json_path, csv_path


def load_result_json(path) -> dict:
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported result schema {doc.get('schema_version')!r}")
    return doc
