"""Deterministic artifact emission: CSV/JSON writers with fixed float
formatting, content-addressed run directories, and run manifests."""

from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np

from . import __version__

FLOAT_FORMAT = "%.17g"
OUTPUT_ROOT_ENV = "NLSPROBE_OUT"


def fmt_float(x) -> str:
    """17 significant digits: round-trip exact for doubles, byte-stable."""
    return FLOAT_FORMAT % float(x)


def _plain(obj):
    """Recursively convert numpy containers to json-friendly builtins."""
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    return obj


def write_json(path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(_plain(obj), sort_keys=True, indent=2) + "\n")


def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(str(h) for h in header)]
    for row in rows:
        cells = []
        for cell in row:
            if isinstance(cell, (float, np.floating)):
                cells.append(fmt_float(cell))
            else:
                cells.append(str(cell))
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_file(path) -> str:
    return sha256_bytes(Path(path).read_bytes())


def output_root(override=None) -> Path:
    if override is not None:
        return Path(override)
    return Path(os.environ.get(OUTPUT_ROOT_ENV, "runs"))


def run_directory(root, command: str, config: dict) -> Path:
    """Content-addressed run directory under the output root."""
    payload = json.dumps({"command": command, "config": _plain(config)}, sort_keys=True)
    digest = sha256_bytes(payload.encode())[:12]
    out = Path(root) / f"{command}-{digest}"
    out.mkdir(parents=True, exist_ok=True)
    return out


def write_manifest(outdir, command: str, config: dict, input_hashes=None) -> None:
    write_json(
        Path(outdir) / "run.json",
        {
            "command": command,
            "config": config,
            "version": __version__,
            "input_hashes": input_hashes or {},
        },
    )
