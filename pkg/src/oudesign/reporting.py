"""Deterministic CSV/JSON rendering and run manifests.

All numeric output is formatted to 12 significant digits, CSV uses
comma separators, '.' decimals and LF line endings.  The manifest
records the command, its parameters, the library version, the seed,
wall time and a SHA-256 digest per emitted file; wall time lives only
in the manifest so the data files stay byte-reproducible.
"""

from __future__ import annotations

import hashlib
import json

SCHEMA_VERSION = 1


def fmt(value) -> str:
    """12-significant-digit rendering of a number."""
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, int):
        return str(value)
    return f"{float(value):.12g}"


def csv_text(header, rows) -> str:
    """Comma-separated table with an LF-terminated header row."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) if isinstance(v, (int, float)) else str(v) for v in row))
    return "\n".join(lines) + "\n"


def _round12(obj):
    if isinstance(obj, float):
        return float(fmt(obj))
    if isinstance(obj, dict):
        return {k: _round12(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round12(v) for v in obj]
    return obj


def json_text(payload: dict) -> str:
    """Deterministic JSON: sorted keys, 12-significant-digit floats."""
    return json.dumps(_round12(payload), sort_keys=True, indent=2) + "\n"


def sha256_hex(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def manifest_text(command: str, parameters: dict, version: str, seed, wall_time_s: float, outputs: dict) -> str:
    """Run manifest; ``outputs`` maps file names to their content digests."""
    return json_text(
        {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "parameters": parameters,
            "library_version": version,
            "seed": seed,
            "wall_time_s": wall_time_s,
            "output_digests": outputs,
        }
    )
