"""Structured run reports for the command-line front end.

One report per invocation: echo of the command and inputs, the computed
results, cross-check rows, criteria verdicts, notes, and paths of files
written.  Two renderings:

* text (human-readable, includes wall time),
* JSON (``--json``): sorted keys, shortest-roundtrip floats, no wall time,
  so identical invocations produce byte-identical output.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

REPORT_VERSION = 1

__all__ = ["RunReport", "REPORT_VERSION"]


def _jsonable(obj):
    """Convert numpy scalars to the matching Python scalar."""
    if isinstance(obj, (np.bool_, np.integer, np.floating)):
        return obj.item()
    raise TypeError(f"Object of type {type(obj).__name__} is not JSON serializable")


@dataclass
class RunReport:
    command: str
    inputs: dict = field(default_factory=dict)
    results: list = field(default_factory=list)  # dicts: name, value, err_est, method
    cross_checks: list = field(default_factory=list)  # dicts: pair, abs_diff, tol, ok
    verdicts: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    artifacts: dict = field(default_factory=dict)  # label -> file path
    wall_time_s: float = 0.0

    def to_json_dict(self) -> dict:
        return {
            "report_version": REPORT_VERSION,
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "cross_checks": self.cross_checks,
            "verdicts": self.verdicts,
            "notes": self.notes,
            "artifacts": self.artifacts,
        }

    def to_json(self) -> str:
        return (
            json.dumps(self.to_json_dict(), sort_keys=True, indent=2, default=_jsonable)
            + "\n"
        )

    def to_text(self) -> str:
        lines = [f"command: {self.command}"]
        if self.inputs:
            pairs = " ".join(f"{k}={v}" for k, v in self.inputs.items())
            lines.append(f"inputs: {pairs}")
        if self.results:
            lines.append("results:")
            width = max(len(str(r.get("name", ""))) for r in self.results)
            for r in self.results:
                extra = "".join(
                    f"  {k}={v}"
                    for k, v in r.items()
                    if k not in ("name", "value", "err_est", "method")
                )
                lines.append(
                    f"  {str(r.get('name','')):<{width}}  value={r['value']!r}"
                    f"  err_est={r['err_est']:.3e}  method={r['method']}{extra}"
                )
        if self.cross_checks:
            lines.append("cross-checks:")
            for c in self.cross_checks:
                status = "ok" if c["ok"] else "FAIL"
                lines.append(
                    f"  {c['pair']}: |diff|={c['abs_diff']:.3e} tol={c['tol']:.3e}  {status}"
                )
        if self.verdicts:
            lines.append("verdicts:")
            for v in self.verdicts:
                lines.append(f"  {json.dumps(v, sort_keys=True, default=_jsonable)}")
        for label, path in self.artifacts.items():
            lines.append(f"wrote {label}: {path}")
        for note in self.notes:
            lines.append(f"note: {note}")
        lines.append(f"wall time: {self.wall_time_s:.3f} s")
        return "\n".join(lines) + "\n"
