"""Discrete co-normal fields: construction, validation and example families.

A co-normal field is a vertex grid of 3-vectors whose mixed difference
vanishes on every face (discrete harmonicity) and whose face area density

    F(u+1/2, v+1/2) = nu(u,v) . (nu(u,v+1) x nu(u+1,v))

is strictly positive.  Harmonic fields are exactly the separable ones,
nu(u,v) = nu1(u) + nu2(v), which is how every generator below is built.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NonConvexFace, NotHarmonic
from .grids import FaceGrid, GridDomain, VertexGrid, d12

__all__ = [
    "TOL_HARMONIC",
    "TOL_HARMONIC_INTERNAL",
    "ConormalField",
    "SeparableConormalSpec",
    "from_separable",
    "validate",
    "face_area_density",
    "helicoid",
    "minimal_cubic",
    "hyperbolic_paraboloid",
    "improper_sphere",
]

# Absolute per-component harmonicity tolerance for externally supplied fields;
# generator output must meet the much tighter internal bound.
TOL_HARMONIC = 1e-9
TOL_HARMONIC_INTERNAL = 1e-12


def face_area_density(vectors: VertexGrid) -> FaceGrid:
    """Area density F per face of a co-normal vertex grid (sign not checked)."""
    vectors.domain.require_faces("co-normal field")
    nu = vectors.values
    tripled = np.einsum("ijk,ijk->ij", nu[:-1, :-1], np.cross(nu[:-1, 1:], nu[1:, :-1]))
    return FaceGrid(vectors.domain, tripled)


class ConormalField:
    """Validated co-normal field with its cached face area density.

    Attributes:
        vectors: VertexGrid of co-normal 3-vectors.
        areas: FaceGrid of the (positive) area density F.
        harmonic_residual: worst |mixed difference| component over all faces.
    """

    def __init__(self, vectors: VertexGrid, areas: FaceGrid, harmonic_residual: float):
        self.vectors = vectors
        self.areas = areas
        self.harmonic_residual = harmonic_residual

    @property
    def domain(self) -> GridDomain:
        return self.vectors.domain

    @property
    def min_area(self) -> float:
        return float(self.areas.values.min())

    def __repr__(self):
        return (
            f"ConormalField(domain={self.domain.as_tuple()}, "
            f"min_F={self.min_area:.6g}, harmonic_residual={self.harmonic_residual:.3g})"
        )


@dataclass(frozen=True)
class SeparableConormalSpec:
    """One-variable profiles whose sum defines a harmonic co-normal field.

    ``u_part[i]`` is the 3-vector contribution of vertex column u_min+i and
    ``v_part[j]`` of vertex row v_min+j; lengths must match the domain.
    """

    domain: GridDomain
    u_part: np.ndarray
    v_part: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "u_part", np.asarray(self.u_part, dtype=float))
        object.__setattr__(self, "v_part", np.asarray(self.v_part, dtype=float))
        if self.u_part.shape != (self.domain.n_u, 3):
            raise ValueError(
                f"u_part must have shape ({self.domain.n_u}, 3), got {self.u_part.shape}"
            )
        if self.v_part.shape != (self.domain.n_v, 3):
            raise ValueError(
                f"v_part must have shape ({self.domain.n_v}, 3), got {self.v_part.shape}"
            )


def _build(vectors: VertexGrid, tol_harmonic: float) -> ConormalField:
    mixed = d12(vectors).values
    residuals = np.abs(mixed).max(axis=2)
    max_residual = float(residuals.max())
    if max_residual > tol_harmonic:
        dom = vectors.domain
        bad = np.argwhere(residuals > tol_harmonic)
        faces = [(dom.u_min + i, dom.v_min + j) for i, j in bad]
        raise NotHarmonic(max_residual, faces)

    areas = face_area_density(vectors)
    if areas.values.min() <= 0.0:
        dom = vectors.domain
        i, j = np.unravel_index(np.argmin(areas.values), areas.values.shape)
        face = (dom.u_min + int(i), dom.v_min + int(j))
        raise NonConvexFace(face, float(areas.values[i, j]))
    return ConormalField(vectors, areas, max_residual)


def from_separable(spec: SeparableConormalSpec) -> ConormalField:
    """Build the field nu(u,v) = u_part(u) + v_part(v) and validate it.

    Harmonicity is structural here (each face residual is a rounding-level
    cancellation), so the internal tolerance applies.
    """
    spec.domain.require_faces("co-normal field")
    nu = spec.u_part[:, None, :] + spec.v_part[None, :, :]
    return _build(VertexGrid(spec.domain, nu), TOL_HARMONIC_INTERNAL)


def validate(vectors: VertexGrid, tol_harmonic: float = TOL_HARMONIC) -> ConormalField:
    """Check an externally supplied vertex grid and wrap it as a field.

    Raises NotHarmonic (naming every face over tolerance) or NonConvexFace.
    """
    vectors.domain.require_faces("co-normal field")
    if vectors.components != 3:
        raise ValueError("co-normal grids must hold 3-vectors")
    return _build(vectors, tol_harmonic)


def _profiles(domain: GridDomain, fu, fv) -> SeparableConormalSpec:
    u_part = np.array([fu(float(u)) for u in domain.u_values()], dtype=float)
    v_part = np.array([fv(float(v)) for v in domain.v_values()], dtype=float)
    return SeparableConormalSpec(domain, u_part, v_part)


def helicoid(n: int, u_range: tuple, v_range: tuple | None = None) -> ConormalField:
    """Helicoid-style field (sin(2 pi v / n), -cos(2 pi v / n), u).

    ``n`` is the number of v samples per turn; v defaults to one full
    turn [0, n].  F is the constant sin(2 pi / n), so n >= 3 is required.
    """
    if n < 3:
        raise ValueError(f"helicoid needs n >= 3 v-samples per turn, got {n}")
    if v_range is None:
        v_range = (0, n)
    domain = GridDomain(u_range[0], u_range[1], v_range[0], v_range[1])
    freq = 2.0 * np.pi / n
    return from_separable(_profiles(
        domain,
        lambda u: (0.0, 0.0, u),
        lambda v: (np.sin(freq * v), -np.cos(freq * v), 0.0),
    ))


def minimal_cubic(box: GridDomain) -> ConormalField:
    """Field (u, v, u^2 + v^2) of the cubic minimal surface.

    F vanishes on faces whose corner co-normal is the zero vector (the
    origin), so boxes must avoid those; e.g. u_min, v_min >= 1 works.
    """
    return from_separable(_profiles(
        box,
        lambda u: (u, 0.0, u * u),
        lambda v: (0.0, v, v * v),
    ))


def hyperbolic_paraboloid(box: GridDomain) -> ConormalField:
    """Field (-v, -u, 1) of the hyperbolic paraboloid; F is identically 1."""
    return from_separable(_profiles(
        box,
        lambda u: (0.0, -u, 1.0),
        lambda v: (-v, 0.0, 0.0),
    ))


def improper_sphere(box: GridDomain) -> ConormalField:
    """Planar field ((v^2 - u^2)/4, (u - v)/2, -1) of an improper affine sphere.

    The field degenerates on the diagonal u = v (F is (u - v)/4 there), so
    the whole box must satisfy u > v.
    """
    if box.u_min <= box.v_max:
        # Worst corner is (u_min, v_max); F of the face diagonally under it.
        face = (box.u_min, box.v_max - 1)
        raise NonConvexFace(
            face,
            (box.u_min - box.v_max) / 4.0,
            detail=f"box {box.as_tuple()} touches u <= v; the field requires u > v",
        )
    return from_separable(_profiles(
        box,
        lambda u: (-u * u / 4.0, u / 2.0, -0.5),
        lambda v: (v * v / 4.0, -v / 2.0, -0.5),
    ))
