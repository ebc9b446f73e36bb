"""JSON and CSV formats for shapes, discretizations and result tables.

Shape JSON::

    {"kind": "fourier", "max_mode": K, "a0": 0.0, "a": [...], "b": [...]}
    {"kind": "support", "max_mode": K, "h0": 1.0, "a": [...], "b": [...]}

``a[k-1]``/``b[k-1]`` multiply cos(k theta)/sin(k theta).  Unknown keys (for
example an embedded ``config`` record) are ignored on load.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .geometry import BoundaryDiscretization, FourierShape, ShapeError, SupportShape


class ShapeFileError(ValueError):
    pass


def shape_to_dict(shape) -> dict:
    if isinstance(shape, FourierShape):
        return {"kind": "fourier", "max_mode": shape.max_mode, "a0": shape.a0, "a": shape.a.tolist(), "b": shape.b.tolist()}
    if isinstance(shape, SupportShape):
        return {"kind": "support", "max_mode": shape.max_mode, "h0": shape.h0, "a": shape.a.tolist(), "b": shape.b.tolist()}
    raise TypeError(type(shape).__name__)


def shape_from_dict(d: dict):
    try:
        kind = d["kind"]
        k = int(d["max_mode"])
        if kind == "fourier":
            return FourierShape(k, float(d.get("a0", 0.0)), d.get("a", []), d.get("b", []))
        if kind == "support":
            return SupportShape(k, float(d.get("h0", 1.0)), d.get("a", []), d.get("b", []))
    except (KeyError, TypeError) as exc:
        raise ShapeFileError(f"malformed shape record: {exc!r}") from exc
    raise ShapeFileError(f"unknown shape kind {d.get('kind')!r}")


def dumps_shape(shape, **extra) -> str:
    return json.dumps({**shape_to_dict(shape), **extra}, indent=2)


def loads_shape(text: str, source: str = "<string>"):
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ShapeFileError(f"{source}: line {exc.lineno} column {exc.colno}: {exc.msg}") from exc
    if not isinstance(d, dict):
        raise ShapeFileError(f"{source}: line 1: expected a JSON object")
    try:
        return shape_from_dict(d)
    except ShapeError as exc:
        raise ShapeFileError(f"{source}: {exc}") from exc


def load_shape(path) -> FourierShape | SupportShape:
    path = Path(path)
    return loads_shape(path.read_text(), str(path))


def save_shape(shape, path, **extra) -> None:
    Path(path).write_text(dumps_shape(shape, **extra) + "\n")


DISCRETIZATION_COLUMNS = ("theta", "x", "y", "nx", "ny", "H", "speed")


def discretization_rows(disc: BoundaryDiscretization):
    return np.column_stack([disc.theta, disc.x, disc.y, disc.normal, disc.curvature, disc.speed]).tolist()


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def to_csv(columns, rows, config: dict | None = None) -> str:
    """CSV text; a leading ``# config: {...}`` comment line records the run."""
    buf = io.StringIO()
    if config is not None:
        buf.write("# config: " + json.dumps(config, sort_keys=True, default=str) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def read_csv(text: str) -> tuple[dict | None, list[dict]]:
    config = None
    lines = text.splitlines()
    if lines and lines[0].startswith("# config: "):
        config = json.loads(lines[0][len("# config: "):])
        lines = lines[1:]
    return config, list(csv.DictReader(lines))


def discretization_csv(disc: BoundaryDiscretization, config: dict | None = None) -> str:
    return to_csv(DISCRETIZATION_COLUMNS, discretization_rows(disc), config)


def to_json(record, config: dict | None = None) -> str:
    if config is not None:
        record = {"config": config, **record}
    return json.dumps(record, indent=2, default=_json_default)


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(type(o).__name__)
