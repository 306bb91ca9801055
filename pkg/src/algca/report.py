"""JSON reports written by the command-line tool.

Every report has the same top-level shape::

    {
      "schema_version": "1",
      "command": "...",
      "inputs": [{"path": ..., "sha256": ...}],
      "inputs_digest": "<sha256 over the input digests>",
      "parameters": {...},
      "verdict": "...",
      "mode": "exhaustive" | "symbolic" | "verified-on-samples" | "inconclusive at bound",
      "conclusive": true | false,
      "result": {...}
    }

``result`` holds the command-specific payload: witnesses, certificates and
transcripts are stored as plain JSON values so they can be re-checked
against the rule files alone.
"""

from __future__ import annotations

import hashlib
import json

SCHEMA_VERSION = "1"
MODES = ("exhaustive", "symbolic", "verified-on-samples", "inconclusive at bound")


def digest_text(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def make_report(command, inputs, verdict, mode, result, parameters=None, conclusive=None) -> dict:
    """``inputs`` is a list of (path, text) pairs."""
    if mode not in MODES:
        raise ValueError(f"unknown verification mode {mode!r}")
    entries = [{"path": str(path), "sha256": digest_text(text)} for path, text in inputs]
    combined = hashlib.sha256("".join(e["sha256"] for e in entries).encode()).hexdigest()
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": entries,
        "inputs_digest": combined,
        "parameters": parameters or {},
        "verdict": verdict,
        "mode": mode,
        "conclusive": mode != "inconclusive at bound" if conclusive is None else conclusive,
        "result": result,
    }


def dumps(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False, default=str)


def validate(report: dict) -> list[str]:
    """Problems with a report's top-level structure (empty when valid)."""
    problems = []
    for key in ("schema_version", "command", "inputs", "inputs_digest", "verdict", "mode", "conclusive", "result"):
        if key not in report:
            problems.append(f"missing {key}")
    if report.get("schema_version") != SCHEMA_VERSION:
        problems.append("unsupported schema version")
    if report.get("mode") not in MODES:
        problems.append("unknown mode")
    return problems
