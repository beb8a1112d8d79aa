"""Staggered grids on rectangular integer boxes and their difference operators.

Quantities of a quad net live on four interlocking lattices: vertices (u, v),
u-edges (u+1/2, v), v-edges (u, v+1/2) and faces (u+1/2, v+1/2).  Half-integer
positions are stored at the floor integer, so ``FaceGrid`` entry ``(u, v)``
holds the value at ``(u+1/2, v+1/2)``.  Every grid carries its own
``GridDomain`` and exposes named accessors (``face_at``, ``uedge_at``...)
so callers never do offset arithmetic themselves.

First differences move an index by one half step:

    d1: vertex -> u-edge      d2: vertex -> v-edge
    d1: v-edge -> face        d2: u-edge -> face
    d1: u-edge -> vertex*     d2: v-edge -> vertex*
    d1: face   -> v-edge*     d2: face   -> u-edge*

(* on the interior of the differenced direction).  All arrays are float64,
dense, row-major with the u index first, and read-only after construction.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainTooSmall

__all__ = [
    "GridDomain",
    "Grid",
    "VertexGrid",
    "UEdgeGrid",
    "VEdgeGrid",
    "FaceGrid",
    "d1",
    "d2",
    "d11",
    "d22",
    "d12",
]


@dataclass(frozen=True)
class GridDomain:
    """Inclusive vertex index bounds of a rectangular box in the integer plane.

    Surface-level fields (co-normals, immersions) additionally require at
    least one face, i.e. at least two vertices per direction; that is enforced
    where such fields are built, because derived grids (second differences,
    interior restrictions) legitimately live on thinner boxes.
    """

    u_min: int
    u_max: int
    v_min: int
    v_max: int

    def __post_init__(self):
        if self.u_max < self.u_min or self.v_max < self.v_min:
            raise DomainTooSmall(f"empty domain {self}")

    @property
    def n_u(self) -> int:
        return self.u_max - self.u_min + 1

    @property
    def n_v(self) -> int:
        return self.v_max - self.v_min + 1

    @property
    def face_count(self) -> int:
        return (self.n_u - 1) * (self.n_v - 1)

    def require_faces(self, what: str = "grid"):
        """Raise unless the box supports at least one face."""
        if self.n_u < 2 or self.n_v < 2:
            raise DomainTooSmall(f"{what} needs at least one face, got {self}")
        return self

    def u_values(self) -> np.ndarray:
        return np.arange(self.u_min, self.u_max + 1)

    def v_values(self) -> np.ndarray:
        return np.arange(self.v_min, self.v_max + 1)

    def shrink(self, du_lo=0, du_hi=0, dv_lo=0, dv_hi=0) -> "GridDomain":
        return GridDomain(
            self.u_min + du_lo, self.u_max - du_hi,
            self.v_min + dv_lo, self.v_max - dv_hi,
        )

    def interior(self) -> "GridDomain":
        return self.shrink(1, 1, 1, 1)

    def contains_vertex(self, u: int, v: int) -> bool:
        return self.u_min <= u <= self.u_max and self.v_min <= v <= self.v_max

    def as_tuple(self):
        return (self.u_min, self.u_max, self.v_min, self.v_max)


class Grid:
    """Dense array of scalars or 3-vectors attached to one staggered lattice.

    ``values`` has shape ``(nu, nv)`` for scalars or ``(nu, nv, 3)`` for
    vectors, where ``(nu, nv)`` depends on the lattice kind.  Values are
    frozen after construction; grids are safe to share across threads.
    """

    kind = "abstract"

    def __init__(self, domain: GridDomain, values):
        values = np.asarray(values, dtype=float)
        expected = self._entry_shape(domain)
        if values.shape[:2] != expected or values.ndim not in (2, 3):
            raise ValueError(
                f"{type(self).__name__} on {domain} expects leading shape "
                f"{expected}, got {values.shape}"
            )
        if values.ndim == 3 and values.shape[2] != 3:
            raise ValueError(f"vector grids must have 3 components, got {values.shape}")
        self.domain = domain
        self.values = values
        self.values.setflags(write=False)

    # Leading (nu, nv) shape for this lattice kind on the given domain.
    @staticmethod
    def _entry_shape(domain: GridDomain):
        raise NotImplementedError

    @property
    def components(self) -> int:
        return 1 if self.values.ndim == 2 else 3

    def with_values(self, values):
        """Same-kind grid on the same domain with new values."""
        return type(self)(self.domain, values)

    def _index(self, u: int, v: int):
        nu, nv = self._entry_shape(self.domain)
        i = u - self.domain.u_min
        j = v - self.domain.v_min
        if not (0 <= i < nu and 0 <= j < nv):
            raise IndexError(
                f"{type(self).__name__} index ({u}, {v}) outside domain {self.domain}"
            )
        return i, j

    def __repr__(self):
        return (
            f"{type(self).__name__}(domain={self.domain.as_tuple()}, "
            f"components={self.components})"
        )


class VertexGrid(Grid):
    """Values at integer vertices (u, v)."""

    kind = "vertex"

    @staticmethod
    def _entry_shape(domain):
        return (domain.n_u, domain.n_v)

    def vertex_at(self, u: int, v: int):
        return self.values[self._index(u, v)]

    @classmethod
    def from_function(cls, domain: GridDomain, fn) -> "VertexGrid":
        """Sample ``fn(u, v)`` (scalar or 3-vector valued) on every vertex."""
        rows = [[fn(u, v) for v in domain.v_values()] for u in domain.u_values()]
        return cls(domain, np.asarray(rows, dtype=float))


class UEdgeGrid(Grid):
    """Values at horizontal edge midpoints; entry (u, v) sits at (u+1/2, v)."""

    kind = "uedge"

    @staticmethod
    def _entry_shape(domain):
        return (domain.n_u - 1, domain.n_v)

    def uedge_at(self, u: int, v: int):
        return self.values[self._index(u, v)]


class VEdgeGrid(Grid):
    """Values at vertical edge midpoints; entry (u, v) sits at (u, v+1/2)."""

    kind = "vedge"

    @staticmethod
    def _entry_shape(domain):
        return (domain.n_u, domain.n_v - 1)

    def vedge_at(self, u: int, v: int):
        return self.values[self._index(u, v)]


class FaceGrid(Grid):
    """Values at face centers; entry (u, v) sits at (u+1/2, v+1/2)."""

    kind = "face"

    @staticmethod
    def _entry_shape(domain):
        return (domain.n_u - 1, domain.n_v - 1)

    def face_at(self, u: int, v: int):
        return self.values[self._index(u, v)]


GRID_KINDS = {cls.kind: cls for cls in (VertexGrid, UEdgeGrid, VEdgeGrid, FaceGrid)}


def _require_extent(grid: Grid, axis: int, needed: int, op: str):
    if grid.values.shape[axis] < needed:
        raise DomainTooSmall(
            f"{op} needs {needed} entries along {'u' if axis == 0 else 'v'}, "
            f"grid has {grid.values.shape[axis]} on {grid.domain}"
        )


def d1(grid: Grid) -> Grid:
    """Forward difference in u, landing half a step up the staggered ladder."""
    _require_extent(grid, 0, 2, "d1")
    diff = grid.values[1:] - grid.values[:-1]
    if isinstance(grid, VertexGrid):
        return UEdgeGrid(grid.domain, diff)
    if isinstance(grid, VEdgeGrid):
        return FaceGrid(grid.domain, diff)
    if isinstance(grid, UEdgeGrid):
        return VertexGrid(grid.domain.shrink(du_lo=1, du_hi=1), diff)
    if isinstance(grid, FaceGrid):
        return VEdgeGrid(grid.domain.shrink(du_lo=1, du_hi=1), diff)
    raise TypeError(f"d1 not defined for {type(grid).__name__}")


def d2(grid: Grid) -> Grid:
    """Forward difference in v, landing half a step up the staggered ladder."""
    _require_extent(grid, 1, 2, "d2")
    diff = grid.values[:, 1:] - grid.values[:, :-1]
    if isinstance(grid, VertexGrid):
        return VEdgeGrid(grid.domain, diff)
    if isinstance(grid, UEdgeGrid):
        return FaceGrid(grid.domain, diff)
    if isinstance(grid, VEdgeGrid):
        return VertexGrid(grid.domain.shrink(dv_lo=1, dv_hi=1), diff)
    if isinstance(grid, FaceGrid):
        return UEdgeGrid(grid.domain.shrink(dv_lo=1, dv_hi=1), diff)
    raise TypeError(f"d2 not defined for {type(grid).__name__}")


def d11(grid: VertexGrid) -> VertexGrid:
    """Second difference in u, on u-interior vertices."""
    _require_extent(grid, 0, 3, "d11")
    g = grid.values
    return VertexGrid(grid.domain.shrink(du_lo=1, du_hi=1), g[2:] - 2.0 * g[1:-1] + g[:-2])


def d22(grid: VertexGrid) -> VertexGrid:
    """Second difference in v, on v-interior vertices."""
    _require_extent(grid, 1, 3, "d22")
    g = grid.values
    return VertexGrid(
        grid.domain.shrink(dv_lo=1, dv_hi=1), g[:, 2:] - 2.0 * g[:, 1:-1] + g[:, :-2]
    )


def d12(grid: VertexGrid) -> FaceGrid:
    """Mixed difference on faces: g(u+1,v+1) + g(u,v) - g(u+1,v) - g(u,v+1)."""
    _require_extent(grid, 0, 2, "d12")
    _require_extent(grid, 1, 2, "d12")
    g = grid.values
    return FaceGrid(grid.domain, g[1:, 1:] + g[:-1, :-1] - g[1:, :-1] - g[:-1, 1:])
