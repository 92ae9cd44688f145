"""Canonical JSON helpers.

All serialized engine outputs use sorted keys and compact separators so
that identical inputs produce byte-identical documents, which the golden
and determinism tests rely on.
"""

from __future__ import annotations

import json
from pathlib import Path


def canonical_dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), ensure_ascii=True)


def canonical_bytes(obj) -> bytes:
    return canonical_dumps(obj).encode("utf-8")


def dump_json_file(path: Path, obj, *, pretty: bool = True) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if pretty:
        text = json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=True) + "\n"
    else:
        text = canonical_dumps(obj)
    path.write_text(text, encoding="utf-8")


def load_json_file(path: Path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)
