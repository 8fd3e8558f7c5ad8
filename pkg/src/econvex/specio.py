"""File formats: function specs, kernel specs, tables, and operator samples.

All JSON payloads serialize extended reals as numbers or the strings
"inf" / "-inf"; floats are written in shortest round-trip form so a
sampled function written out and re-read evaluates identically at every
node.  CSV tables carry a "slope,value" header; sampled functions use
"x,value"; operator samples are ingested as "x,xstar".
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np

from .extreal import ext_to_json, format_ext, parse_ext
from .funcmodel import AnyFunction, ClosedFormFunction, Grid, SampledFunction
from .errorfn import (
    ErrorFunction,
    ExpError,
    ProductError,
    QuadraticError,
    SampledMatrixError,
    ScaledDistanceError,
    ZeroError,
    product_error,
    sampled_matrix_error,
)
from .transform import ConjugateTable
from .subdiff import OperatorSample

__all__ = [
    "load_json",
    "function_from_spec",
    "function_to_spec",
    "error_from_spec",
    "error_to_spec",
    "write_table_csv",
    "table_to_json",
    "write_sampled_csv",
    "read_operator_csv",
]


def load_json(path: Union[str, Path]) -> Any:
    """Parse a JSON file, reporting line/column on malformed input."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise ValueError(f"malformed spec {path}: line {err.lineno}, column {err.colno}: {err.msg}") from err


def _require(d: Dict[str, Any], field: str, where: str) -> Any:
    if field not in d:
        raise ValueError(f"malformed spec: missing field {field!r} in {where}")
    return d[field]


def function_from_spec(spec: Union[str, Path, Dict[str, Any]]) -> AnyFunction:
    """Build a function from a spec dict or a path to a JSON spec file."""
    d = load_json(spec) if isinstance(spec, (str, Path)) else spec
    if not isinstance(d, dict):
        raise ValueError("malformed spec: function spec must be a JSON object")
    kind = _require(d, "kind", "function spec")
    if kind == "sampled":
        grid = Grid.from_points(np.asarray(_require(d, "grid", "function spec"), dtype=float))
        values = np.array([parse_ext(v) for v in _require(d, "values", "function spec")])
        return SampledFunction(grid=grid, values=values)
    if kind == "closed-form":
        return ClosedFormFunction(name=_require(d, "name", "function spec"), params=d.get("params", {}))
    raise ValueError(f"malformed spec: unknown function kind {kind!r}")


def function_to_spec(f: AnyFunction) -> Dict[str, Any]:
    if isinstance(f, SampledFunction):
        return {
            "kind": "sampled",
            "grid": [float(x) for x in f.grid.points],
            "values": [ext_to_json(v) for v in f.values],
        }
    return {"kind": "closed-form", "name": f.name, "params": dict(f.params)}


def error_from_spec(spec: Union[str, Path, Dict[str, Any]], grid: Optional[Grid] = None) -> ErrorFunction:
    """Build a kernel from a spec dict or JSON file.

    Product kernels validate their convexity preconditions against `grid`,
    which is therefore required for them.
    """
    d = load_json(spec) if isinstance(spec, (str, Path)) else spec
    if not isinstance(d, dict):
        raise ValueError("malformed spec: error spec must be a JSON object")
    kind = _require(d, "kind", "error spec")
    if kind == "zero":
        return ZeroError()
    if kind == "quadratic":
        return QuadraticError(scale=float(_require(d, "scale", "quadratic error spec")))
    if kind == "scaled_distance":
        return ScaledDistanceError(L=float(_require(d, "L", "scaled_distance error spec")))
    if kind == "exp_kernel":
        return ExpError()
    if kind == "product":
        if grid is None:
            raise ValueError("malformed spec: product kernel needs a grid to validate against")
        f = function_from_spec(_require(d, "f", "product error spec"))
        g = function_from_spec(_require(d, "g", "product error spec"))
        return product_error(f, g, grid)
    if kind == "sampled_matrix":
        mgrid = Grid.from_points(np.asarray(_require(d, "grid", "sampled_matrix error spec"), dtype=float))
        rows = _require(d, "values", "sampled_matrix error spec")
        matrix = np.array([[parse_ext(v) for v in row] for row in rows])
        return sampled_matrix_error(mgrid, matrix)
    raise ValueError(f"malformed spec: unknown error kind {kind!r}")


def error_to_spec(e: ErrorFunction) -> Dict[str, Any]:
    if isinstance(e, ZeroError):
        return {"kind": "zero"}
    if isinstance(e, QuadraticError):
        return {"kind": "quadratic", "scale": e.scale}
    if isinstance(e, ScaledDistanceError):
        return {"kind": "scaled_distance", "L": e.L}
    if isinstance(e, ExpError):
        return {"kind": "exp_kernel"}
    if isinstance(e, ProductError):
        return {"kind": "product", "f": function_to_spec(e.f), "g": function_to_spec(e.g)}
    if isinstance(e, SampledMatrixError):
        return {
            "kind": "sampled_matrix",
            "grid": [float(x) for x in e.grid.points],
            "values": [[ext_to_json(v) for v in row] for row in e.matrix],
        }
    raise ValueError(f"kernel kind {e.kind!r} has no serialized form")


def write_table_csv(table: ConjugateTable, path: Union[str, Path]) -> None:
    lines = ["slope,value"]
    for s, v in zip(table.dual_grid.points, table.values):
        lines.append(f"{format_ext(float(s))},{format_ext(float(v))}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def table_to_json(table: ConjugateTable) -> Dict[str, Any]:
    return {
        "slopes": [float(s) for s in table.dual_grid.points],
        "values": [ext_to_json(v) for v in table.values],
        "provenance": {
            "algorithm": table.algorithm,
            "anchor_y": table.anchor_y,
            "primal_grid": [float(x) for x in table.primal_grid.points],
        },
    }


def write_sampled_csv(f: SampledFunction, path: Union[str, Path]) -> None:
    lines = ["x,value"]
    for x, v in zip(f.grid.points, f.values):
        lines.append(f"{format_ext(float(x))},{format_ext(float(v))}")
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_operator_csv(path: Union[str, Path]) -> OperatorSample:
    """Operator sample from "x,xstar" rows (a header line is optional)."""
    xs, duals = [], []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or (lineno == 1 and line.lower().replace(" ", "") in ("x,xstar", "x,x*")):
            continue
        parts = line.split(",")
        if len(parts) != 2:
            raise ValueError(f"malformed spec {path}: line {lineno}: expected two columns")
        xs.append(parse_ext(parts[0]))
        duals.append(parse_ext(parts[1]))
    return OperatorSample(points=np.array(xs), duals=np.array(duals))
