"""CSV tables with a '#'-prefixed provenance header."""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from . import __version__


def provenance(config_hash: str | None = None, seed=None, **extra) -> dict:
    meta = {"artifact": "trellis_isac", "version": __version__}
    if config_hash is not None:
        meta["config_hash"] = config_hash
    if seed is not None:
        meta["seed"] = seed
    meta.update(extra)
    return meta


def _fmt(v):
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def format_csv(columns, rows, meta: dict | None = None) -> str:
    buf = io.StringIO()
    for key, value in (meta or {}).items():
        buf.write(f"# {key}: {json.dumps(value, sort_keys=True, default=str)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, columns, rows, meta: dict | None = None) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_csv(columns, rows, meta), encoding="utf-8")
    return path


def read_csv(path) -> tuple[dict, dict[str, np.ndarray]]:
    """Return (meta, columns). Numeric columns come back as float arrays."""
    meta, body = {}, []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(":")
            meta[key.strip()] = json.loads(value)
        elif line:
            body.append(line)
    reader = csv.reader(body)
    header = next(reader)
    raw = list(zip(*reader)) if body[1:] else [() for _ in header]
    cols = {}
    for name, values in zip(header, raw):
        try:
            cols[name] = np.array([float(v) for v in values])
        except ValueError:
            cols[name] = np.array(values)
    return meta, cols
