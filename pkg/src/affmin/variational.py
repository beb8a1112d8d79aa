"""Affine area functional, its analytic first variation, and criticality.

The affine area of a quad net is the sum of F = sqrt(M) over faces.  Moving
one interior vertex changes the four incident face areas; the exact
per-vertex gradient is the signed sum of four cross products of opposing
edges divided by twice the face area.  Integrated co-normal surfaces make
this sum cancel identically, which is what the criticality certificate
checks.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import NonPositiveVolume
from .geometry import _positions, _worst, face_volumes
from .grids import VertexGrid, d1, d2

__all__ = [
    "TOL_CRIT",
    "affine_area",
    "area_gradient",
    "FdGradientCheck",
    "fd_gradient_check",
    "CriticalityReport",
    "criticality_certificate",
]

# Gradient sup-norm tolerance, relative to the mean face area.
TOL_CRIT = 1e-9


def affine_area(surface) -> float:
    """Total affine area: the sum of sqrt(M) over all faces (M must be > 0)."""
    return float(face_volumes(surface).areas.values.sum())


def area_gradient(surface) -> VertexGrid:
    """Gradient of the affine area with respect to interior vertex positions.

    Returns a 3-vector grid on the interior vertex box; each entry is the
    sum h1 + h2 + h3 + h4 of the four incident-face area variations.
    Identically zero (to rounding) exactly on discrete affine minimal nets.
    """
    q = _positions(surface)
    q.domain.interior()  # raises DomainTooSmall when no interior vertex exists
    e1 = d1(q).values
    e2 = d2(q).values
    f = face_volumes(q).areas.values

    h1 = np.cross(e1[:-1, :-2], e2[:-2, :-1]) / (2.0 * f[:-1, :-1, None])
    h2 = -np.cross(e1[1:, :-2], e2[2:, :-1]) / (2.0 * f[1:, :-1, None])
    h3 = np.cross(e1[1:, 2:], e2[2:, 1:]) / (2.0 * f[1:, 1:, None])
    h4 = -np.cross(e1[:-1, 2:], e2[:-2, 1:]) / (2.0 * f[:-1, 1:, None])
    return VertexGrid(q.domain.interior(), h1 + h2 + h3 + h4)


class FdGradientCheck(NamedTuple):
    """Analytic directional derivative vs. its central finite difference."""

    analytic: float
    numeric: float
    gap: float


def fd_gradient_check(surface, vertex, direction, h: float) -> FdGradientCheck:
    """Probe the first variation at one interior vertex along a direction.

    The numeric value is (area(q + hV) - area(q - hV)) / (2h) for the point
    deformation V.  Faces away from the vertex cancel exactly, and each
    incident face volume depends linearly on the deformation parameter
    (repeated-column determinants drop out), so the difference of square
    roots is evaluated through M(+h) - M(-h) = 2 h dM without subtractive
    cancellation; what remains of the gap is pure O(h^2) truncation.
    Both probes must keep every face volume positive.
    """
    q = _positions(surface)
    dom = q.domain
    if not dom.interior().contains_vertex(*vertex):
        raise IndexError(f"vertex {vertex} is not interior to {dom}")
    direction = np.asarray(direction, dtype=float)
    face_volumes(q)  # the base net itself must have M > 0 everywhere
    p = q.values
    i = vertex[0] - dom.u_min
    j = vertex[1] - dom.v_min

    def det3(a, b, c):
        return float(a @ np.cross(b, c))

    numeric = 0.0
    # The four incident faces, each with the moving vertex in another corner.
    for (fi, fj), corner in (
        ((i, j), 0), ((i - 1, j), 1), ((i, j - 1), 2), ((i - 1, j - 1), 3),
    ):
        a = p[fi, fj]
        e1 = p[fi + 1, fj] - a
        e2 = p[fi, fj + 1] - a
        e3 = p[fi + 1, fj + 1] - a
        m0 = det3(e1, e2, e3)
        if corner == 0:
            slope = -(det3(direction, e2, e3) + det3(e1, direction, e3)
                      + det3(e1, e2, direction))
        elif corner == 1:
            slope = det3(direction, e2, e3)
        elif corner == 2:
            slope = det3(e1, direction, e3)
        else:
            slope = det3(e1, e2, direction)
        m_plus = m0 + h * slope
        m_minus = m0 - h * slope
        if m_plus <= 0.0 or m_minus <= 0.0:
            raise NonPositiveVolume(
                (dom.u_min + fi, dom.v_min + fj), min(m_plus, m_minus)
            )
        # (sqrt(m+) - sqrt(m-)) / 2h, with the difference taken exactly.
        numeric += slope / (np.sqrt(m_plus) + np.sqrt(m_minus))

    g = area_gradient(q)
    analytic = float(g.vertex_at(*vertex) @ direction)
    return FdGradientCheck(analytic, numeric, abs(analytic - numeric))


@dataclass(frozen=True)
class CriticalityReport:
    """Whether the interior area gradient vanishes relative to the mean F.

    ``vacuous`` flags nets without interior vertices, where every compactly
    supported deformation moves only boundary stencils and the test passes
    trivially.
    """

    max_gradient: float
    mean_area: float
    worst_vertex: tuple
    passed: bool
    vacuous: bool = False


def criticality_certificate(surface, tol: float = TOL_CRIT) -> CriticalityReport:
    q = _positions(surface)
    mean_area = float(face_volumes(q).areas.values.mean())
    dom = q.domain
    if dom.n_u < 3 or dom.n_v < 3:
        return CriticalityReport(0.0, mean_area, (dom.u_min, dom.v_min),
                                 passed=True, vacuous=True)
    g = area_gradient(q)
    norms = np.abs(g.values).max(axis=2)
    return CriticalityReport(
        max_gradient=float(norms.max()),
        mean_area=mean_area,
        worst_vertex=_worst(norms, dom, 1, 1),
        passed=float(norms.max()) <= tol * mean_area,
    )
