"""Report files: ``{"meta": ..., "results": [...]}`` JSON or CSV with a ``#`` header block."""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Any

import numpy as np
import pandas as pd

from qjw.config import TOOL_NAME, VERSION, tolerance_table

FORMATS = ("json", "csv")


def report_meta(command: str, seed: int, tolerance: float) -> dict:
    return {
        "tool": TOOL_NAME,
        "version": VERSION,
        "command": command,
        "seed": int(seed),
        "tolerance": float(tolerance),
        "tolerances": tolerance_table(),
    }


def to_jsonable(obj: Any) -> Any:
    """Plain Python values for numpy scalars, arrays and complex numbers."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    return obj


def render_json(meta: dict, results: list) -> str:
    body = {"meta": to_jsonable(meta), "results": to_jsonable(results)}
    return json.dumps(body, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


def render_csv(meta: dict, rows: list[dict]) -> str:
    header = "".join(f"# {k}: {json.dumps(to_jsonable(v), sort_keys=True)}\n" for k, v in sorted(meta.items()))
    frame = pd.json_normalize(to_jsonable(rows)) if rows else pd.DataFrame()
    return header + frame.to_csv(index=False, lineterminator="\n")


def write_atomic(path: Path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text)
        fh.flush()
        os.fsync(fh.fileno())
    os.replace(tmp, path)


def infer_format(path: Path, fmt: str | None) -> str:
    if fmt is not None:
        if fmt not in FORMATS:
            raise ValueError(f"unknown report format {fmt!r}; expected one of {FORMATS}")
        return fmt
    return "csv" if Path(path).suffix.lower() == ".csv" else "json"


def write_report(path: Path, meta: dict, results: list, fmt: str | None = None) -> str:
    fmt = infer_format(path, fmt)
    text = render_csv(meta, results) if fmt == "csv" else render_json(meta, results)
    write_atomic(Path(path), text)
    return fmt


def read_json(path: Path) -> Any:
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"{path} is not valid JSON: {exc}") from exc


def read_csv_report(path: Path) -> tuple[dict, pd.DataFrame]:
    meta = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("# "):
                break
            key, _, value = line[2:].partition(": ")
            meta[key] = json.loads(value)
    return meta, pd.read_csv(path, comment="#")
