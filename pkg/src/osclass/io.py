"""JSON dialect shared by the CLI: parsing of inputs and canonical reports.

Complex numbers are two-element arrays [re, im]; matrices are {"rows": [...]};
reports are rendered with sorted keys and 17-significant-digit floats so that
identical inputs produce byte-identical output.
"""

from __future__ import annotations

import json

import numpy as np

from .degree1 import PointSet
from .errors import InputFormatError
from .metric import FiniteStructure
from .opsys import OperatorSystemSpan, build_system


def parse_complex(obj) -> complex:
    if isinstance(obj, (int, float)):
        return complex(obj)
    if isinstance(obj, list) and len(obj) == 2 and all(isinstance(t, (int, float)) for t in obj):
        return complex(obj[0], obj[1])
    raise InputFormatError(f"expected a complex number as [re, im], got {obj!r}")


def parse_matrix(obj) -> np.ndarray:
    if not isinstance(obj, dict) or "rows" not in obj:
        raise InputFormatError('expected a matrix object with a "rows" key')
    rows = obj["rows"]
    if not isinstance(rows, list) or not rows:
        raise InputFormatError('"rows" must be a nonempty list')
    data = [[parse_complex(e) for e in row] for row in rows]
    widths = {len(r) for r in data}
    if len(widths) != 1:
        raise InputFormatError("matrix rows have unequal lengths")
    return np.array(data, dtype=np.complex128)


def parse_system(obj) -> OperatorSystemSpan:
    if not isinstance(obj, dict) or "generators" not in obj:
        raise InputFormatError('expected a system object with a "generators" key')
    gens = [parse_matrix(g) for g in obj["generators"]]
    include_identity = bool(obj.get("include_identity", True))
    system = build_system(gens, include_identity=include_identity)
    if "ambient_dim" in obj and int(obj["ambient_dim"]) != system.ambient_dim:
        raise InputFormatError(
            f'declared ambient_dim {obj["ambient_dim"]} does not match generators'
        )
    return system


def parse_point_set(obj) -> PointSet:
    if not isinstance(obj, dict) or "points" not in obj:
        raise InputFormatError('expected a point set object with a "points" key')
    pts = obj["points"]
    if not isinstance(pts, list) or not pts:
        raise InputFormatError('"points" must be a nonempty list')
    data = [[parse_complex(c) for c in p] for p in pts]
    dim = int(obj.get("dim", len(data[0])))
    return PointSet(ambient=dim, points=np.array(data, dtype=np.complex128))


def _parse_table(spec, arity: int, size: int) -> np.ndarray:
    if isinstance(spec, list):
        arr = np.asarray(spec, dtype=np.float64)
        if arr.shape != (size,) * arity:
            raise InputFormatError(f"relation table has shape {arr.shape}, expected {(size,) * arity}")
        return arr
    if isinstance(spec, dict):
        arr = np.zeros((size,) * arity)
        for key, value in spec.items():
            idx = tuple(int(t) for t in str(key).split(","))
            if len(idx) != arity:
                raise InputFormatError(f"table key {key!r} does not match arity {arity}")
            arr[idx] = float(value)
        return arr
    raise InputFormatError("relation table must be a nested list or an index-keyed object")


def parse_structure(obj) -> FiniteStructure:
    if not isinstance(obj, dict) or "metric" not in obj:
        raise InputFormatError('expected a structure object with a "metric" key')
    metric = np.asarray(obj["metric"], dtype=np.float64)
    size = metric.shape[0] if metric.ndim == 2 else 0
    relations = {}
    for name, rel in (obj.get("relations") or {}).items():
        if not isinstance(rel, dict) or "arity" not in rel or "table" not in rel:
            raise InputFormatError(f'relation {name!r} needs "arity" and "table" keys')
        relations[name] = _parse_table(rel["table"], int(rel["arity"]), size)
    domains = tuple(tuple(int(i) for i in d) for d in obj.get("domains") or [])
    return FiniteStructure(metric=metric, relations=relations, domains=domains)


def load_json(path: str):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputFormatError(f"cannot read JSON from {path}: {exc}") from exc


def jsonable(value):
    """Convert numpy scalars/arrays, complex values and dataclasses for output."""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.complexfloating, complex)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, (np.integer, int)):
        return int(value)
    if value is None or isinstance(value, str):
        return value
    if hasattr(value, "__dict__"):
        return jsonable(vars(value))
    return str(value)


def _render(value, parts: list):
    if isinstance(value, dict):
        parts.append("{")
        for i, key in enumerate(sorted(value)):
            if i:
                parts.append(",")
            parts.append(json.dumps(str(key)))
            parts.append(":")
            _render(value[key], parts)
        parts.append("}")
    elif isinstance(value, list):
        parts.append("[")
        for i, v in enumerate(value):
            if i:
                parts.append(",")
            _render(v, parts)
        parts.append("]")
    elif isinstance(value, bool):
        parts.append("true" if value else "false")
    elif isinstance(value, float):
        parts.append(format(value, ".17g"))
    elif isinstance(value, int):
        parts.append(str(value))
    elif value is None:
        parts.append("null")
    else:
        parts.append(json.dumps(str(value)))


def canonical_report(report: dict) -> str:
    """Canonical JSON text: sorted keys, 17-significant-digit floats."""
    parts: list = []
    _render(jsonable(report), parts)
    return "".join(parts)
