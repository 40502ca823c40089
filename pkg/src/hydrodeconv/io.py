"""CSV and JSON serialization for series, kernels, and run manifests.

Time-series files carry a ``t,value`` header with ``t`` counted from 0;
kernel files carry ``lag,value`` with signed lags so causality is visible
in the output.  Values are printed with 17 significant digits, which
round-trips float64 exactly.
"""

from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .signals import kernel_lags


def fmt17(v):
    """Render a float with enough digits to round-trip exactly."""
    return format(float(v), ".17g")


def write_series_csv(path, values):
    values = np.asarray(values, dtype=float)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t,value\n")
        for t, v in enumerate(values):
            fh.write(f"{t},{fmt17(v)}\n")


def write_kernel_csv(path, values):
    values = np.asarray(values, dtype=float)
    lags = kernel_lags(values.size)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("lag,value\n")
        for lag, v in zip(lags, values):
            fh.write(f"{lag},{fmt17(v)}\n")


def _read_two_column_csv(path, expected_header):
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            if lineno == 1:
                if line != expected_header:
                    raise ValueError(
                        f"{path}:1: expected header {expected_header!r}, got {line!r}"
                    )
                continue
            parts = line.split(",")
            if len(parts) != 2:
                raise ValueError(
                    f"{path}:{lineno}: expected 2 comma-separated fields, "
                    f"got {len(parts)}"
                )
            try:
                values.append(float(parts[1]))
            except ValueError as exc:
                raise ValueError(
                    f"{path}:{lineno}: cannot parse value {parts[1]!r}"
                ) from exc
    if not values:
        raise ValueError(f"{path}: no data rows")
    return np.asarray(values)


def read_series_csv(path):
    """Read a ``t,value`` CSV; parse errors report the offending line."""
    return _read_two_column_csv(path, "t,value")


def read_kernel_csv(path):
    """Read a ``lag,value`` CSV; parse errors report the offending line."""
    return _read_two_column_csv(path, "lag,value")


def write_json(path, obj):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


@dataclass
class RunManifest:
    """Provenance of one output set: enough to reproduce it bit-exactly
    (given the same tool version).  The timestamp is metadata only."""

    command: str
    inputs: dict = field(default_factory=dict)
    out_dir: str = ""
    seed: int | None = None
    overrides: dict = field(default_factory=dict)
    version: str = __version__
    timestamp: str = ""


def write_manifest(out_dir, command, inputs=None, seed=None, overrides=None):
    manifest = RunManifest(
        command=command,
        inputs=dict(inputs or {}),
        out_dir=str(out_dir),
        seed=seed,
        overrides=dict(overrides or {}),
        timestamp=datetime.now(timezone.utc).isoformat(),
    )
    write_json(os.path.join(out_dir, "manifest.json"), asdict(manifest))
    return manifest
