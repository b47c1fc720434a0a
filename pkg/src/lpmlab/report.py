"""JSON report documents and CSV plot tables.

A report is a mapping with the sections ``model_params``, ``theoretical``,
``observed`` and ``diagnostics`` plus a ``schema`` version string. Numbers
that are not finite are replaced by ``null`` and listed under
``diagnostics.non_finite`` so every emitted number is finite.
"""
from __future__ import annotations

import csv
import json
import math
import os

import numpy as np

SCHEMA = "lpmlab/1"

__all__ = ["SCHEMA", "new_report", "finalize", "dumps", "write_json", "write_csv"]


def new_report(command: str) -> dict:
    return {
        "schema": SCHEMA,
        "command": command,
        "model_params": {},
        "theoretical": {},
        "observed": {},
        "diagnostics": {},
    }


def _clean(obj, path, bad):
    if isinstance(obj, dict):
        return {str(k): _clean(v, f"{path}.{k}" if path else str(k), bad) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_clean(v, f"{path}[{i}]", bad) for i, v in enumerate(list(obj))]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not math.isfinite(x):
            bad.append(path)
            return None
        return x
    return obj


def finalize(report: dict) -> dict:
    """Convert numpy scalars and arrays and null out non-finite numbers."""
    bad: list[str] = []
    out = _clean(report, "", bad)
    if bad:
        out["diagnostics"].setdefault("non_finite", []).extend(bad)
    return out


def dumps(report: dict) -> str:
    return json.dumps(finalize(report), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(path, report: dict) -> None:
    text = dumps(report)
    if path is None or path == "-":
        print(text, end="")
        return
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)


def write_csv(directory, name: str, header, rows) -> str:
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, name)
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(x)) if isinstance(x, (float, np.floating)) else x for x in row])
    return path
