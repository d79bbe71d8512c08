"""JSON input format for user-supplied coefficient systems.

The matrices describe the operator

    sum_jk A2[j][k] d_j d_k u  -  sum_j A1[j] d_j u  -  A0 u,

with the lower-order terms subtracted (so, for example, the scalar real
equation u'' - u = 0 has A0 = [[1.0]] and satisfies the principle, while
u'' + u = 0 has A0 = [[-1.0]] and does not).

A document describes one system, either with a single set of coefficient
matrices or with a list of sample points each carrying its own matrices
(for variable coefficients):

    {
      "m": 2, "n": 2, "field": "real",
      "A2": [[M, M], [M, M]],      # n x n array of m x m matrices, A2[j][k]
      "A1": [M, M],                # optional, n entries; zero if omitted
      "A0": M                      # optional; zero if omitted
    }

or

    {
      "m": 1, "n": 2, "field": "complex",
      "points": [
        {"x": [0, 0], "A2": ..., "A1": ..., "A0": ...},
        {"x": [1, 0], "A2": ...}
      ]
    }

Every matrix M is a nested list of numbers; in a complex document an entry
may also be a two-element list [re, im].  Parse errors carry the position:
syntax errors report line and column, semantic errors report the offending
field path (e.g. "points[1].A2[0][1]").
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np

from .criteria import CoefficientSystem

__all__ = ["SchemaError", "load_criteria_document", "parse_criteria_document"]


class SchemaError(ValueError):
    """Input document rejected; `anchor` points at the offending field."""

    def __init__(self, anchor: str, message: str):
        super().__init__(f"{anchor}: {message}")
        self.anchor = anchor


def _require(obj: dict, key: str, anchor: str) -> Any:
    if key not in obj:
        raise SchemaError(anchor, f"missing required field {key!r}")
    return obj[key]


def _entry(value: Any, field: str, anchor: str) -> complex:
    if isinstance(value, bool):
        raise SchemaError(anchor, "matrix entries must be numbers, got a boolean")
    if isinstance(value, (int, float)):
        return complex(value, 0.0)
    if isinstance(value, list):
        if field == "real":
            raise SchemaError(
                anchor, "[re, im] entries are only allowed when field is 'complex'"
            )
        if len(value) != 2 or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in value
        ):
            raise SchemaError(anchor, "complex entries must be [re, im] number pairs")
        return complex(value[0], value[1])
    raise SchemaError(anchor, f"matrix entries must be numbers, got {type(value).__name__}")


def _matrix(value: Any, m: int, field: str, anchor: str) -> np.ndarray:
    if not isinstance(value, list) or len(value) != m:
        raise SchemaError(anchor, f"expected an {m}x{m} matrix (list of {m} rows)")
    out = np.zeros((m, m), dtype=complex)
    for i, row in enumerate(value):
        if not isinstance(row, list) or len(row) != m:
            raise SchemaError(f"{anchor}[{i}]", f"expected a row of {m} entries")
        for j, v in enumerate(row):
            out[i, j] = _entry(v, field, f"{anchor}[{i}][{j}]")
    return out


def _system_from_fields(
    obj: dict, m: int, n: int, field: str, anchor: str, label: str
) -> CoefficientSystem:
    raw_a2 = _require(obj, "A2", anchor)
    if not isinstance(raw_a2, list) or len(raw_a2) != n:
        raise SchemaError(f"{anchor}.A2", f"expected {n} rows of {n} matrices")
    A2 = np.zeros((n, n, m, m), dtype=complex)
    for j, row in enumerate(raw_a2):
        if not isinstance(row, list) or len(row) != n:
            raise SchemaError(f"{anchor}.A2[{j}]", f"expected {n} matrices")
        for k, mat in enumerate(row):
            A2[j, k] = _matrix(mat, m, field, f"{anchor}.A2[{j}][{k}]")

    A1 = None
    if "A1" in obj and obj["A1"] is not None:
        raw_a1 = obj["A1"]
        if not isinstance(raw_a1, list) or len(raw_a1) != n:
            raise SchemaError(f"{anchor}.A1", f"expected {n} matrices")
        A1 = np.zeros((n, m, m), dtype=complex)
        for j, mat in enumerate(raw_a1):
            A1[j] = _matrix(mat, m, field, f"{anchor}.A1[{j}]")

    A0 = None
    if "A0" in obj and obj["A0"] is not None:
        A0 = _matrix(obj["A0"], m, field, f"{anchor}.A0")

    if field == "real":
        A2 = A2.real
        A1 = None if A1 is None else A1.real
        A0 = None if A0 is None else A0.real
    try:
        return CoefficientSystem(m=m, n=n, field=field, A2=A2, A1=A1, A0=A0, label=label)
    except ValueError as exc:
        raise SchemaError(anchor, str(exc)) from exc


def parse_criteria_document(doc: Any, source: str = "document") -> list[CoefficientSystem]:
    """Validate a parsed JSON document and build the coefficient systems.

    Returns one system per sample point (a single-system document yields a
    one-element list).  Raises SchemaError with a field-path anchor on any
    violation.
    """
    if not isinstance(doc, dict):
        raise SchemaError("$", f"top level must be an object, got {type(doc).__name__}")
    m = _require(doc, "m", "$")
    n = _require(doc, "n", "$")
    field = _require(doc, "field", "$")
    if not isinstance(m, int) or isinstance(m, bool) or m < 1:
        raise SchemaError("$.m", f"m must be a positive integer, got {m!r}")
    if not isinstance(n, int) or isinstance(n, bool) or n < 2:
        raise SchemaError("$.n", f"n must be an integer >= 2, got {n!r}")
    if field not in ("real", "complex"):
        raise SchemaError("$.field", f"field must be 'real' or 'complex', got {field!r}")

    if "points" in doc:
        pts = doc["points"]
        if not isinstance(pts, list) or not pts:
            raise SchemaError("$.points", "points must be a non-empty list")
        if "A2" in doc:
            raise SchemaError("$", "give either top-level matrices or points, not both")
        systems = []
        for idx, entry in enumerate(pts):
            anchor = f"$.points[{idx}]"
            if not isinstance(entry, dict):
                raise SchemaError(anchor, "each point must be an object")
            label = f"point {idx}"
            if "x" in entry:
                x = entry["x"]
                if not isinstance(x, list) or len(x) != n or not all(
                    isinstance(v, (int, float)) and not isinstance(v, bool) for v in x
                ):
                    raise SchemaError(f"{anchor}.x", f"x must be a list of {n} numbers")
                label = "x=(" + ", ".join(repr(float(v)) for v in x) + ")"
            systems.append(_system_from_fields(entry, m, n, field, anchor, label))
        return systems

    return [_system_from_fields(doc, m, n, field, "$", "system")]


def load_criteria_document(path: str | Path) -> list[CoefficientSystem]:
    """Read and validate a criteria input file.

    JSON syntax errors are re-raised as SchemaError with the line and
    column; semantic errors carry the field path.
    """
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(
            f"{path}:{exc.lineno}:{exc.colno}", f"invalid JSON: {exc.msg}"
        ) from exc
    return parse_criteria_document(doc, source=str(path))
