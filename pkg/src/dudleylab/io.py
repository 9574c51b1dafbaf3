"""JSON file formats for spaces, measures and tabulated functions.

Space::

    {"points": ["a", "b"], "metric": {"type": "matrix", "d": [[0, 1], [1, 0]]}}
    {"points": [0.0, 1.5], "metric": {"type": "real_line"}}

Measure (``space`` may be inlined or a path relative to the measure file)::

    {"kind": "prob", "space": <space | "space.json">, "mass": [0.5, 0.5]}

Function::

    {"space": <space | path>, "values": [0.0, 1.0]}
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .errors import InputError
from .lipschitz import TabulatedFunction
from .measure import ProbabilityMeasure, SignedMeasure
from .metric_space import FILE_TOLERANCE, FiniteMetricSpace, from_matrix, from_real_points, validate_metric


class SchemaError(InputError):
    """The file is not valid JSON or does not follow the expected layout."""


def read_json(path) -> object:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise SchemaError(f"{path}: cannot read: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def _require(obj, key, where):
    if not isinstance(obj, dict) or key not in obj:
        raise SchemaError(f"{where}: missing key {key!r}")
    return obj[key]


def _number_list(values, where) -> list[float]:
    if not isinstance(values, list) or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        raise SchemaError(f"{where}: expected a list of numbers")
    return [float(v) for v in values]


def file_kind(obj) -> str:
    """``space``, ``measure`` or ``function``."""
    if isinstance(obj, dict):
        if "mass" in obj:
            return "measure"
        if "values" in obj:
            return "function"
        if "points" in obj:
            return "space"
    raise SchemaError("unrecognised file: expected a space, measure or function object")


def raw_space(obj, where="space") -> tuple[list, np.ndarray, str]:
    """Labels, distance matrix and metric type, without checking the axioms."""
    points = _require(obj, "points", where)
    metric = _require(obj, "metric", where)
    if not isinstance(points, list) or not points:
        raise SchemaError(f"{where}: 'points' must be a nonempty list")
    mtype = _require(metric, "type", f"{where}.metric")
    if mtype == "real_line":
        xs = _number_list(points, f"{where}.points")
        arr = np.array(xs)
        return xs, np.abs(arr[:, None] - arr[None, :]), mtype
    if mtype == "matrix":
        rows = _require(metric, "d", f"{where}.metric")
        if not isinstance(rows, list) or len(rows) != len(points):
            raise SchemaError(f"{where}.metric.d: expected {len(points)} rows")
        mat = [_number_list(r, f"{where}.metric.d[{i}]") for i, r in enumerate(rows)]
        if any(len(r) != len(points) for r in mat):
            raise SchemaError(f"{where}.metric.d: rows must have {len(points)} entries")
        if not all(isinstance(p, (str, int, float)) for p in points):
            raise SchemaError(f"{where}.points: labels must be strings or numbers")
        return list(points), np.array(mat), mtype
    raise SchemaError(f"{where}.metric.type: unknown metric type {mtype!r}")


def space_from_obj(obj, where="space") -> FiniteMetricSpace:
    labels, mat, mtype = raw_space(obj, where)
    if mtype == "real_line":
        return from_real_points(labels)
    return from_matrix(labels, mat)


def _resolve_space(ref, base: Path | None, where: str):
    """Return the space object and the description of where it came from."""
    if isinstance(ref, str):
        path = Path(ref) if base is None else base / ref
        return read_json(path), str(path)
    if isinstance(ref, dict):
        return ref, where
    raise SchemaError(f"{where}: 'space' must be an object or a path")


def space_ref_obj(obj, base: Path | None = None, where="measure"):
    return _resolve_space(_require(obj, "space", where), base, f"{where}.space")


def measure_from_obj(obj, base: Path | None = None, where="measure") -> SignedMeasure:
    kind = obj.get("kind", "prob") if isinstance(obj, dict) else None
    if kind not in ("prob", "signed"):
        raise SchemaError(f"{where}.kind: expected 'prob' or 'signed', got {kind!r}")
    sobj, swhere = space_ref_obj(obj, base, where)
    space = space_from_obj(sobj, swhere)
    mass = _number_list(_require(obj, "mass", where), f"{where}.mass")
    if kind == "prob":
        return ProbabilityMeasure(space, mass)
    return SignedMeasure(space, mass)


def function_from_obj(obj, base: Path | None = None, where="function") -> TabulatedFunction:
    sobj, swhere = space_ref_obj(obj, base, where)
    space = space_from_obj(sobj, swhere)
    values = _number_list(_require(obj, "values", where), f"{where}.values")
    return TabulatedFunction(space, values)


def load_space(path) -> FiniteMetricSpace:
    return space_from_obj(read_json(path), str(path))


def load_measure(path) -> SignedMeasure:
    path = Path(path)
    return measure_from_obj(read_json(path), path.parent, str(path))


def load_function(path) -> TabulatedFunction:
    path = Path(path)
    return function_from_obj(read_json(path), path.parent, str(path))


def space_to_obj(space: FiniteMetricSpace) -> dict:
    if space.is_real_line:
        return {"points": [float(x) for x in space.coordinates], "metric": {"type": "real_line"}}
    return {"points": list(space.labels), "metric": {"type": "matrix", "d": space.dist.tolist()}}


def measure_to_obj(mu: SignedMeasure) -> dict:
    kind = "prob" if isinstance(mu, ProbabilityMeasure) else "signed"
    return {"kind": kind, "space": space_to_obj(mu.space), "mass": mu.mass.tolist()}


def function_to_obj(f: TabulatedFunction) -> dict:
    return {"space": space_to_obj(f.space), "values": f.values.tolist()}


def validate_file(path) -> dict:
    """Check a space/measure/function file; schema problems raise :class:`SchemaError`.

    Returns ``{"kind", "ok", "violations"}`` where violations carry witnesses.
    """
    path = Path(path)
    obj = read_json(path)
    kind = file_kind(obj)
    violations: list[dict] = []
    if kind == "space":
        _, mat, mtype = raw_space(obj, str(path))
        report = validate_metric(mat, tol=FILE_TOLERANCE)
        violations += [v.to_dict() for v in report.violations]
        if len(set(obj["points"])) != len(obj["points"]):
            violations.append({"axiom": "distinct_points", "indices": [], "detail": "duplicate point labels"})
        return {"kind": kind, "ok": not violations, "violations": _dedupe(violations)}

    sobj, swhere = space_ref_obj(obj, path.parent, str(path))
    _, mat, _ = raw_space(sobj, swhere)
    violations += [v.to_dict() for v in validate_metric(mat, tol=FILE_TOLERANCE).violations]
    key = "mass" if kind == "measure" else "values"
    values = _number_list(_require(obj, key, str(path)), f"{path}.{key}")
    if len(values) != mat.shape[0]:
        violations.append(
            {"axiom": "length", "indices": [], "detail": f"{len(values)} entries for a {mat.shape[0]}-point space"}
        )
    if kind == "measure":
        mkind = obj.get("kind", "prob")
        if mkind not in ("prob", "signed"):
            raise SchemaError(f"{path}.kind: expected 'prob' or 'signed', got {mkind!r}")
        if mkind == "prob":
            neg = [i for i, m in enumerate(values) if m < 0]
            for i in neg:
                violations.append({"axiom": "nonnegative", "indices": [i], "detail": f"mass[{i}] = {values[i]!r}"})
            total = math.fsum(values)
            if abs(total - 1.0) > 1e-9:
                violations.append({"axiom": "normalized", "indices": [], "detail": f"masses sum to {total!r}"})
    return {"kind": kind, "ok": not violations, "violations": _dedupe(violations)}


def _dedupe(violations: list[dict]) -> list[dict]:
    seen, out = set(), []
    for v in violations:
        key = (v["axiom"], tuple(v["indices"]))
        if key not in seen:
            seen.add(key)
            out.append(v)
    return out
