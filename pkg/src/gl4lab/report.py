"""JSON-lines report records with a stable byte layout."""

from __future__ import annotations

import dataclasses
import json
import math
from pathlib import Path

import numpy as np

SCHEMA_VERSION = 1


def _plain(obj):
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return [_plain(float(obj.real)), _plain(float(obj.imag))]
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(record: dict) -> str:
    return json.dumps(_plain(record), sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def make_record(kind: str, payload: dict, config: dict | None = None) -> dict:
    return {"schema": SCHEMA_VERSION, "kind": kind, "config": config or {}, "result": payload}


def append_jsonl(path: str | Path, record: dict) -> None:
    with open(path, "a", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(record) + "\n")


def read_jsonl(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8") as fh:
        return [json.loads(line) for line in fh if line.strip()]
