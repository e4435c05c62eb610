"""Deterministic CSV/JSON writers and the run manifest."""

from __future__ import annotations

import csv
import hashlib
import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

from . import __version__


def fmt(x) -> str:
    """Ten significant digits; integers and strings pass through."""
    if isinstance(x, bool) or x is None:
        return "" if x is None else str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return format(x, ".10g")
    return str(x)


def json_number(x):
    """Round floats to ten significant digits for JSON output."""
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, Fraction):
        return json_number(float(x))
    if isinstance(x, complex):
        return {"re": json_number(x.real), "im": json_number(x.imag)}
    if isinstance(x, float):
        if not math.isfinite(x):
            return str(x)
        return float(format(x, ".10g"))
    if isinstance(x, dict):
        return {str(k): json_number(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [json_number(v) for v in x]
    return x


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([fmt(v) for v in row])
    return path


def write_json(path: Path, payload) -> Path:
    with open(path, "w") as fh:
        json.dump(json_number(payload), fh, indent=2)
        fh.write("\n")
    return path


def sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_dir: Path, command: str, settings: dict, files: Sequence[Path], diagnostics: Sequence[str] = ()) -> Path:
    payload = {
        "command": command,
        "code_version": __version__,
        "settings": settings,
        "files": {Path(p).name: sha256(p) for p in files},
        "diagnostics": list(diagnostics),
    }
    return write_json(Path(out_dir) / "manifest.json", payload)
