"""JSON result reports.

A report is a versioned document with a fixed top-level key order::

    schema, version, method, seed, parameters, input_fingerprint, payload

Floats are written with Python's shortest round-trip representation, so
reading a report back yields bit-identical values. Non-finite floats use the
``NaN``/``Infinity`` tokens understood by Python's json module. Arrays become
(nested) lists.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field, is_dataclass
from pathlib import Path
from typing import Any

import numpy as np

SCHEMA = 1


def _version() -> str:
    from . import __version__

    return __version__


@dataclass(eq=False)
class Report:
    method: str
    parameters: dict = field(default_factory=dict)
    payload: dict = field(default_factory=dict)
    seed: int | None = None
    input_fingerprint: str | None = None
    version: str = field(default_factory=_version)
    schema: int = SCHEMA

    def to_dict(self) -> dict:
        return {
            "schema": self.schema,
            "version": self.version,
            "method": self.method,
            "seed": self.seed,
            "parameters": to_jsonable(self.parameters),
            "input_fingerprint": self.input_fingerprint,
            "payload": to_jsonable(self.payload),
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "Report":
        missing = {"schema", "version", "method"} - set(doc)
        if missing:
            raise ValueError(f"report is missing fields {sorted(missing)}")
        if doc["schema"] != SCHEMA:
            raise ValueError(f"unsupported report schema {doc['schema']!r}")
        return cls(
            method=doc["method"],
            parameters=doc.get("parameters", {}),
            payload=doc.get("payload", {}),
            seed=doc.get("seed"),
            input_fingerprint=doc.get("input_fingerprint"),
            version=doc["version"],
            schema=doc["schema"],
        )

    def dumps(self) -> str:
        return dumps(self.to_dict())


def to_jsonable(obj: Any) -> Any:
    """Convert numpy values, dataclasses and tuples into plain JSON types."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if is_dataclass(obj):
        return {k: to_jsonable(getattr(obj, k)) for k in obj.__dataclass_fields__}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, allow_nan=True, ensure_ascii=False) + "\n"


def write_report_json(report: Report, path) -> None:
    """Write atomically: the document goes to a temporary file in the target
    directory, which is then renamed over ``path``."""
    path = Path(path)
    text = report.dumps()
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", suffix=".tmp", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_report_json(path) -> Report:
    with open(path, encoding="utf-8") as fh:
        return Report.from_dict(json.load(fh))
