"""JSON file formats for grids, fundamental-data bundles, seeds and reports.

A grid file is one JSON object:

    {"kind": "vertex"|"uedge"|"vedge"|"face",
     "domain": [u_min, u_max, v_min, v_max],
     "components": 1|3,
     "values": [...row-major numbers...]}

Numbers are written with 17 significant digits, so round trips are exact and
repeated writes are byte-identical.  The forms bundle stores F as a face
grid and the cubic coefficients as full vertex grids padded with nulls where
their stencil does not reach.
"""

import json

import numpy as np

from .compatibility import FundamentalData
from .grids import GRID_KINDS, FaceGrid, Grid, GridDomain, VertexGrid

__all__ = [
    "dumps_json",
    "write_json",
    "grid_to_obj",
    "grid_from_obj",
    "write_grid",
    "read_grid",
    "write_forms",
    "read_forms",
    "write_seed",
    "read_seed",
]


def _format_number(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


def dumps_json(obj, indent: int = 0) -> str:
    """Serialize with deterministic 17-significant-digit floats."""
    pad = " " * indent
    inner = " " * (indent + 2)
    if obj is None:
        return "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (bool, int, float, np.integer, np.floating)):
        return _format_number(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [
            f"{inner}{json.dumps(str(k))}: {dumps_json(v, indent + 2)}"
            for k, v in obj.items()
        ]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        seq = list(obj)
        if all(isinstance(x, (bool, int, float, np.integer, np.floating)) or x is None
               for x in seq):
            return "[" + ", ".join(
                "null" if x is None else _format_number(x) for x in seq
            ) + "]"
        items = [f"{inner}{dumps_json(v, indent + 2)}" for v in seq]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(obj, path):
    try:
        with open(path, "w", encoding="ascii") as handle:
            handle.write(dumps_json(obj) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc


def grid_to_obj(grid: Grid, pad_values=None) -> dict:
    """Grid file object; ``pad_values`` overrides the flat value list."""
    values = grid.values.reshape(-1).tolist() if pad_values is None else pad_values
    return {
        "kind": grid.kind,
        "domain": list(grid.domain.as_tuple()),
        "components": grid.components,
        "values": values,
    }


def grid_from_obj(obj: dict) -> Grid:
    try:
        kind = obj["kind"]
        domain = GridDomain(*(int(x) for x in obj["domain"]))
        components = int(obj["components"])
        values = obj["values"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed grid object: {exc}") from exc
    if kind not in GRID_KINDS:
        raise ValueError(f"unknown grid kind {kind!r}")
    if components not in (1, 3):
        raise ValueError(f"components must be 1 or 3, got {components}")
    cls = GRID_KINDS[kind]
    shape = cls._entry_shape(domain)
    if components == 3:
        shape = shape + (3,)
    array = np.asarray(values, dtype=float)
    if array.size != int(np.prod(shape)):
        raise ValueError(
            f"grid value count {array.size} does not match domain {domain} "
            f"({int(np.prod(shape))} expected)"
        )
    return cls(domain, array.reshape(shape))


def write_grid(grid: Grid, path):
    write_json(grid_to_obj(grid), path)


def read_grid(path, expected_kind: str | None = None) -> Grid:
    try:
        with open(path, "r", encoding="ascii") as handle:
            obj = json.load(handle)
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc
    grid = grid_from_obj(obj)
    if expected_kind is not None and grid.kind != expected_kind:
        raise ValueError(f"{path} holds a {grid.kind} grid, expected {expected_kind}")
    return grid


def _pad_coefficient(grid: VertexGrid, full: GridDomain) -> list:
    """Flat value list over ``full`` with nulls where the stencil is missing."""
    values = np.full((full.n_u, full.n_v), np.nan)
    sub = grid.domain
    i0 = sub.u_min - full.u_min
    j0 = sub.v_min - full.v_min
    values[i0:i0 + sub.n_u, j0:j0 + sub.n_v] = grid.values
    return [None if np.isnan(x) else x for x in values.reshape(-1)]


def write_forms(data: FundamentalData, path):
    full = data.domain
    obj = {
        "F": grid_to_obj(data.areas),
        "A": {
            "kind": "vertex",
            "domain": list(full.as_tuple()),
            "components": 1,
            "values": _pad_coefficient(data.u_coeff, full),
        },
        "B": {
            "kind": "vertex",
            "domain": list(full.as_tuple()),
            "components": 1,
            "values": _pad_coefficient(data.v_coeff, full),
        },
    }
    write_json(obj, path)


def _strip_coefficient(obj: dict, full: GridDomain, sub: GridDomain, name: str) -> VertexGrid:
    values = obj["values"]
    if len(values) != full.n_u * full.n_v:
        raise ValueError(f"{name} grid has wrong length for domain {full}")
    arr = np.array([np.nan if x is None else float(x) for x in values])
    arr = arr.reshape(full.n_u, full.n_v)
    i0 = sub.u_min - full.u_min
    j0 = sub.v_min - full.v_min
    core = arr[i0:i0 + sub.n_u, j0:j0 + sub.n_v]
    if np.isnan(core).any():
        raise ValueError(f"{name} grid has nulls inside its stencil domain {sub}")
    mask = np.zeros_like(arr, dtype=bool)
    mask[i0:i0 + sub.n_u, j0:j0 + sub.n_v] = True
    if not np.isnan(arr[~mask]).all():
        raise ValueError(f"{name} grid has values outside its stencil domain {sub}")
    return VertexGrid(sub, core)


def read_forms(path) -> FundamentalData:
    try:
        with open(path, "r", encoding="ascii") as handle:
            obj = json.load(handle)
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc
    try:
        f_grid = grid_from_obj(obj["F"])
        a_obj = obj["A"]
        b_obj = obj["B"]
    except KeyError as exc:
        raise ValueError(f"forms bundle {path} is missing key {exc}") from exc
    if not isinstance(f_grid, FaceGrid):
        raise ValueError(f"forms bundle {path}: F must be a face grid")
    full = f_grid.domain
    a = _strip_coefficient(a_obj, full, full.shrink(du_lo=1, du_hi=1), "A")
    b = _strip_coefficient(b_obj, full, full.shrink(dv_lo=1, dv_hi=1), "B")
    return FundamentalData(f_grid, a, b)


def write_seed(points, path):
    points = np.asarray(points, dtype=float)
    if points.shape != (4, 3):
        raise ValueError(f"seed must be four 3-points, got shape {points.shape}")
    write_json({"points": [list(p) for p in points]}, path)


def read_seed(path) -> np.ndarray:
    try:
        with open(path, "r", encoding="ascii") as handle:
            obj = json.load(handle)
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path} is not valid JSON: {exc}") from exc
    points = np.asarray(obj.get("points"), dtype=float)
    if points.shape != (4, 3):
        raise ValueError(f"seed file {path} must hold four 3-points")
    return points
