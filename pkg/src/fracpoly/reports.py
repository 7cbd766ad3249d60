"""Report serialization and delimited output.

A solver run is summarized in two forms: a JSON report carrying the
headline numbers plus tool metadata, and flat CSV files carrying the
per-iteration trace, the energy-efficiency grid surface, and the
per-iteration relative error against an oracle. Everything is written
deterministically: JSON keys are sorted, floats are formatted with
repr, and no timestamps are embedded, so rerunning a command on the
same input produces byte-identical files.

Non-finite floats are not representable in strict JSON, so the writer
maps nan and inf to null before validation. CSV cells keep them as
``nan``/``inf`` literal text.
"""

import json
import math
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__

TRACE_COLUMNS = ("k", "lambda", "F", "ratio", "bound", "rank_ratio",
                 "certified", "inner_iterations")
GRID_COLUMNS = ("K", "M", "EE", "feasible")
ERROR_COLUMNS = ("k", "epsilon")

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["metadata", "problem", "result"],
    "additionalProperties": False,
    "properties": {
        "metadata": {
            "type": "object",
            "required": ["tool", "version"],
            "additionalProperties": False,
            "properties": {
                "tool": {"const": "fracpoly"},
                "version": {"type": "string"},
            },
        },
        "problem": {
            "type": "object",
            "required": ["kind", "n"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["polynomial", "fractional", "energy", "sos"]},
                "n": {"type": "integer", "minimum": 1},
                "sense": {"enum": ["min", "max"]},
                "source": {"type": "string"},
            },
        },
        "result": {
            "type": "object",
            "required": ["status", "certified"],
            "additionalProperties": False,
            "properties": {
                "status": {"type": "string"},
                "certified": {"type": "boolean"},
                "order": {"type": "integer", "minimum": 1},
                "bound": {"type": ["number", "null"]},
                "value": {"type": ["number", "null"]},
                "point": {
                    "type": ["array", "null"],
                    "items": {"type": "number"},
                },
                "lambda": {"type": ["number", "null"]},
                "trace_summary": {
                    "type": "object",
                    "required": ["rows"],
                    "additionalProperties": False,
                    "properties": {
                        "rows": {"type": "integer", "minimum": 0},
                        "final_F": {"type": ["number", "null"]},
                        "final_ratio": {"type": ["number", "null"]},
                        "all_inner_certified": {"type": "boolean"},
                    },
                },
                "rounded_point": {
                    "type": ["array", "null"],
                    "items": {"type": "integer"},
                },
                "rounded_value": {"type": ["number", "null"]},
                "rounded_feasible": {"type": "boolean"},
                "oracle_point": {
                    "type": ["array", "null"],
                    "items": {"type": "number"},
                },
                "oracle_value": {"type": ["number", "null"]},
                "epsilon": {"type": ["number", "null"]},
                "reason": {"type": ["string", "null"]},
                "num_squares": {"type": "integer", "minimum": 0},
                "basis_size": {"type": "integer", "minimum": 0},
                "residual": {"type": ["number", "null"]},
                "notes": {"type": "array", "items": {"type": "string"}},
            },
        },
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(REPORT_SCHEMA)


def validate_report(report):
    """Raise jsonschema.ValidationError if the report dict is malformed."""
    _VALIDATOR.validate(report)


def _sanitize(value):
    # JSON has no nan/inf; collapse them to null so reports stay strict.
    if isinstance(value, dict):
        return {k: _sanitize(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_sanitize(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    return value


def report_metadata():
    return {"tool": "fracpoly", "version": __version__}


def write_report(path, report):
    """Validate and write a report as deterministic, newline-terminated JSON."""
    clean = _sanitize(report)
    validate_report(clean)
    text = json.dumps(clean, sort_keys=True, indent=2, allow_nan=False)
    Path(path).write_text(text + "\n", encoding="utf-8")
    return clean


def _cell(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_rows(path, header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_cell(v) for v in row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def emit_trace_csv(path, trace):
    """Write the outer-iteration trace; one row per iteration."""
    rows = [
        (rec.k, rec.lam, rec.F, rec.ratio, rec.bound, rec.rank_ratio,
         rec.certified, rec.inner_iterations)
        for rec in trace
    ]
    _write_rows(path, TRACE_COLUMNS, rows)


def emit_grid_csv(path, values):
    """Write the integer-grid objective surface; one row per (K, M) pair."""
    _write_rows(path, GRID_COLUMNS, values)


def emit_error_csv(path, pairs):
    """Write per-iteration relative error against an oracle value."""
    _write_rows(path, ERROR_COLUMNS, pairs)
