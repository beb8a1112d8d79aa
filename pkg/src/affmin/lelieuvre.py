"""Integration of co-normal fields into immersions via discrete Lelieuvre steps.

The edge vectors of the immersion are cross products of adjacent co-normals,

    q1(u+1/2, v) =  nu(u,v) x nu(u+1,v)
    q2(u, v+1/2) = -nu(u,v) x nu(u,v+1),

and harmonicity of nu makes the two-form closed, so summing edge vectors from
a base vertex is path independent and produces a well-defined vertex grid of
positions.
"""

from dataclasses import dataclass

import numpy as np

from .conormal import ConormalField
from .errors import DomainMismatch
from .grids import GridDomain, UEdgeGrid, VEdgeGrid, VertexGrid, d1, d2

__all__ = [
    "TOL_INTEGRATE",
    "Immersion",
    "lelieuvre_edges",
    "integrate",
    "path_independence_residual",
    "verify_lelieuvre",
    "LelieuvreReport",
]

# Relative (to the longest edge) tolerance for edge-equation residuals.
TOL_INTEGRATE = 1e-10


class Immersion:
    """Vertex positions of an asymptotic quad net plus its integration anchor."""

    def __init__(self, positions: VertexGrid, base_vertex, base_value):
        positions.domain.require_faces("immersion")
        if positions.components != 3:
            raise ValueError("immersions hold 3-vector positions")
        self.positions = positions
        self.base_vertex = (int(base_vertex[0]), int(base_vertex[1]))
        self.base_value = np.asarray(base_value, dtype=float)

    @property
    def domain(self) -> GridDomain:
        return self.positions.domain

    def translated(self, offset) -> "Immersion":
        offset = np.asarray(offset, dtype=float)
        return Immersion(
            self.positions.with_values(self.positions.values + offset),
            self.base_vertex,
            self.base_value + offset,
        )

    def __repr__(self):
        return f"Immersion(domain={self.domain.as_tuple()}, base={self.base_vertex})"


def lelieuvre_edges(vectors: VertexGrid) -> tuple[UEdgeGrid, VEdgeGrid]:
    """Edge vectors prescribed by a co-normal vertex grid (not validated)."""
    nu = vectors.values
    q1 = np.cross(nu[:-1, :], nu[1:, :])
    q2 = np.cross(nu[:, 1:], nu[:, :-1])
    return UEdgeGrid(vectors.domain, q1), VEdgeGrid(vectors.domain, q2)


def _line_integral(steps: np.ndarray, anchor: int, start: np.ndarray) -> np.ndarray:
    """Positions along one grid line given its steps and an anchored value."""
    n = steps.shape[0] + 1
    out = np.empty((n, 3))
    out[anchor] = start
    if anchor < n - 1:
        out[anchor + 1:] = start + np.cumsum(steps[anchor:], axis=0)
    if anchor > 0:
        out[:anchor] = start - np.cumsum(steps[:anchor][::-1], axis=0)[::-1]
    return out


def integrate(field: ConormalField, base_vertex=None, base_value=None,
              order: str = "u-first") -> Immersion:
    """Sum the Lelieuvre edge vectors into vertex positions.

    The base vertex (default: the lower-left corner) receives ``base_value``
    (default: the origin).  ``order`` picks the deterministic fill sequence:
    "u-first" walks the base row then every column, "v-first" the transpose;
    harmonicity guarantees both agree up to summation rounding.
    """
    dom = field.domain
    if base_vertex is None:
        base_vertex = (dom.u_min, dom.v_min)
    if base_value is None:
        base_value = np.zeros(3)
    base_value = np.asarray(base_value, dtype=float)
    if not dom.contains_vertex(*base_vertex):
        raise IndexError(f"base vertex {base_vertex} outside domain {dom}")
    ib = base_vertex[0] - dom.u_min
    jb = base_vertex[1] - dom.v_min

    q1, q2 = lelieuvre_edges(field.vectors)
    q = np.empty((dom.n_u, dom.n_v, 3))
    if order == "u-first":
        q[:, jb] = _line_integral(q1.values[:, jb], ib, base_value)
        for i in range(dom.n_u):
            q[i] = _line_integral(q2.values[i], jb, q[i, jb])
    elif order == "v-first":
        q[ib, :] = _line_integral(q2.values[ib], jb, base_value)
        for j in range(dom.n_v):
            q[:, j] = _line_integral(q1.values[:, j], ib, q[ib, j])
    else:
        raise ValueError(f"unknown integration order {order!r}")
    return Immersion(VertexGrid(dom, q), base_vertex, base_value)


def path_independence_residual(field) -> float:
    """Max face obstruction to integrability; zero (to rounding) when harmonic.

    Accepts a ConormalField or a raw co-normal VertexGrid; the obstruction on
    face (u+1/2, v+1/2) is

        (nu(u+1,v) + nu(u,v+1)) x (nu(u+1,v+1) + nu(u,v)).
    """
    vectors = field.vectors if isinstance(field, ConormalField) else field
    nu = vectors.values
    obstruction = np.cross(nu[1:, :-1] + nu[:-1, 1:], nu[1:, 1:] + nu[:-1, :-1])
    return float(np.abs(obstruction).max())


@dataclass(frozen=True)
class LelieuvreReport:
    """Residuals of the edge equations for an immersion/co-normal pair."""

    max_residual_u: float
    max_residual_v: float
    edge_scale: float
    worst_edge: tuple
    passed: bool

    @property
    def max_residual(self) -> float:
        return max(self.max_residual_u, self.max_residual_v)


def verify_lelieuvre(immersion: Immersion, field: ConormalField,
                     tol: float = TOL_INTEGRATE) -> LelieuvreReport:
    """Check both edge equations; residuals are relative to the longest edge."""
    if immersion.domain != field.domain:
        raise DomainMismatch(
            f"immersion domain {immersion.domain} != field domain {field.domain}"
        )
    q1, q2 = lelieuvre_edges(field.vectors)
    res_u = np.abs(d1(immersion.positions).values - q1.values).max(axis=2)
    res_v = np.abs(d2(immersion.positions).values - q2.values).max(axis=2)
    scale = max(float(np.abs(q1.values).max()), float(np.abs(q2.values).max()))

    dom = immersion.domain
    if res_u.max() >= res_v.max():
        i, j = np.unravel_index(np.argmax(res_u), res_u.shape)
        worst = ("u", (dom.u_min + int(i), dom.v_min + int(j)))
    else:
        i, j = np.unravel_index(np.argmax(res_v), res_v.shape)
        worst = ("v", (dom.u_min + int(i), dom.v_min + int(j)))
    max_u, max_v = float(res_u.max()), float(res_v.max())
    return LelieuvreReport(
        max_residual_u=max_u,
        max_residual_v=max_v,
        edge_scale=scale,
        worst_edge=worst,
        passed=max(max_u, max_v) <= tol * max(scale, 1e-300),
    )
