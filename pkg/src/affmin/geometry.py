"""Derived geometry of an immersion: volumes, affine normals, certificates.

Everything here consumes vertex positions (and optionally co-normals) and
produces either derived face/vertex fields or residual reports.  Reports are
scale-aware: determinant checks against F^2 are relative, orthogonality
checks are normalized by the participating vector norms, and the pure
"determinant is zero" checks are reported as raw absolute residuals.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainMismatch, NonPositiveVolume
from .grids import FaceGrid, VertexGrid, d1, d2, d11, d12, d22

__all__ = [
    "TOL_DUAL",
    "TOL_ASYMPTOTIC",
    "FaceVolumes",
    "face_volumes",
    "affine_normal",
    "ConormalRecovery",
    "recover_conormal",
    "AsymptoticReport",
    "asymptotic_certificate",
    "PlanarSaddleReport",
    "planarity_and_saddle",
    "DualityReport",
    "duality_certificate",
]

TOL_DUAL = 1e-9
TOL_ASYMPTOTIC = 1e-9

_TINY = 1e-300


def _positions(surface) -> VertexGrid:
    """Accept an Immersion or a bare position VertexGrid."""
    grid = getattr(surface, "positions", surface)
    if not isinstance(grid, VertexGrid) or grid.components != 3:
        raise TypeError("expected an Immersion or a 3-vector VertexGrid")
    return grid


def _det3(a, b, c):
    return np.einsum("...k,...k->...", a, np.cross(b, c))


def _worst(arr, domain, du=0, dv=0):
    i, j = np.unravel_index(np.argmax(arr), arr.shape)
    return (domain.u_min + du + int(i), domain.v_min + dv + int(j))


@dataclass(frozen=True)
class FaceVolumes:
    """Per-face quadrangle volumes M and the area density F = sqrt(M)."""

    volumes: FaceGrid
    areas: FaceGrid


def face_volumes(surface) -> FaceVolumes:
    """Corner-tetrahedron volume per face; raises unless every M > 0.

    M(u+1/2, v+1/2) is the determinant of the three edges from q(u, v) to
    its face neighbors q(u+1, v), q(u, v+1), q(u+1, v+1).
    """
    q = _positions(surface)
    q.domain.require_faces("face volumes")
    p = q.values
    base = p[:-1, :-1]
    m = _det3(p[1:, :-1] - base, p[:-1, 1:] - base, p[1:, 1:] - base)
    if m.min() <= 0.0:
        dom = q.domain
        i, j = np.unravel_index(np.argmin(m), m.shape)
        raise NonPositiveVolume((dom.u_min + int(i), dom.v_min + int(j)), float(m[i, j]))
    return FaceVolumes(FaceGrid(q.domain, m), FaceGrid(q.domain, np.sqrt(m)))


def affine_normal(surface, areas: FaceGrid) -> FaceGrid:
    """Affine normal per face: the mixed difference of q divided by F."""
    q = _positions(surface)
    if areas.domain != q.domain:
        raise DomainMismatch("area grid and surface live on different domains")
    return FaceGrid(q.domain, d12(q).values / areas.values[:, :, None])


@dataclass(frozen=True)
class ConormalRecovery:
    """Co-normals recovered from an immersion, with cross-formula agreement.

    Every vertex averages the estimates from its 1, 2 or 4 incident faces;
    ``max_deviation`` is the worst per-component spread between estimates.
    """

    vectors: VertexGrid
    max_deviation: float
    worst_vertex: tuple


def recover_conormal(surface) -> ConormalRecovery:
    """Evaluate the cross-product co-normal formula on every incident face."""
    q = _positions(surface)
    areas = face_volumes(q).areas.values
    e1 = d1(q).values
    e2 = d2(q).values
    dom = q.domain

    shape = (dom.n_u, dom.n_v, 3)
    total = np.zeros(shape)
    count = np.zeros((dom.n_u, dom.n_v, 1))
    lo = np.full(shape, np.inf)
    hi = np.full(shape, -np.inf)

    f = areas[:, :, None]
    # (estimate, vertex slice) per corner role of each face.
    corner_estimates = (
        (np.cross(e1[:, :-1], e2[:-1, :]) / f, (slice(None, -1), slice(None, -1))),
        (np.cross(e1[:, :-1], e2[1:, :]) / f, (slice(1, None), slice(None, -1))),
        (np.cross(e1[:, 1:], e2[:-1, :]) / f, (slice(None, -1), slice(1, None))),
        (np.cross(e1[:, 1:], e2[1:, :]) / f, (slice(1, None), slice(1, None))),
    )
    for est, sl in corner_estimates:
        total[sl] += est
        count[sl] += 1.0
        np.minimum(lo[sl], est, out=lo[sl])
        np.maximum(hi[sl], est, out=hi[sl])

    spread = (hi - lo).max(axis=2)
    return ConormalRecovery(
        vectors=VertexGrid(dom, total / count),
        max_deviation=float(spread.max()),
        worst_vertex=_worst(spread, dom),
    )


@dataclass(frozen=True)
class AsymptoticReport:
    """Certificate that the net is asymptotic.

    ``max_zero_residual`` is the worst absolute value over all determinants
    pairing both second differences with the adjacent edges (all of which
    must vanish); ``max_mixed_residual`` is the worst relative deviation of
    the four edge/edge/mixed-difference determinants from the face volume.
    """

    max_zero_residual: float
    worst_zero_vertex: tuple
    max_mixed_residual: float
    worst_mixed_face: tuple
    passed: bool


def asymptotic_certificate(surface, tol_zero: float = TOL_ASYMPTOTIC,
                           tol_mixed: float = TOL_ASYMPTOTIC) -> AsymptoticReport:
    q = _positions(surface)
    e1 = d1(q).values
    e2 = d2(q).values
    dom = q.domain

    zero_best = 0.0
    zero_worst = (dom.u_min, dom.v_min)

    def track_zero(dets, du, dv):
        nonlocal zero_best, zero_worst
        if dets.size == 0:
            return
        res = np.abs(dets)
        m = float(res.max())
        if m > zero_best:
            zero_best = m
            zero_worst = _worst(res, dom, du, dv)

    if dom.n_u >= 3:
        quu = d11(q).values
        for e1_pick in (e1[:-1, :], e1[1:, :]):
            track_zero(_det3(e1_pick[:, :-1], e2[1:-1, :], quu[:, :-1]), 1, 0)
            track_zero(_det3(e1_pick[:, 1:], e2[1:-1, :], quu[:, 1:]), 1, 1)
    if dom.n_v >= 3:
        qvv = d22(q).values
        for e2_pick in (e2[:, :-1], e2[:, 1:]):
            track_zero(_det3(e1[:, 1:-1], e2_pick[:-1, :], qvv[:-1, :]), 0, 1)
            track_zero(_det3(e1[:, 1:-1], e2_pick[1:, :], qvv[1:, :]), 1, 1)

    m = face_volumes(q).volumes.values
    quv = d12(q).values
    mixed = np.zeros_like(m)
    for e1_pick in (e1[:, :-1], e1[:, 1:]):
        for e2_pick in (e2[:-1, :], e2[1:, :]):
            np.maximum(mixed, np.abs(_det3(e1_pick, e2_pick, quv) - m) / m, out=mixed)

    return AsymptoticReport(
        max_zero_residual=zero_best,
        worst_zero_vertex=zero_worst,
        max_mixed_residual=float(mixed.max()),
        worst_mixed_face=_worst(mixed, dom),
        passed=zero_best <= tol_zero and float(mixed.max()) <= tol_mixed,
    )


@dataclass(frozen=True)
class PlanarSaddleReport:
    """Planar-cross and saddle-sign checks at interior vertices."""

    max_orthogonality_residual: float
    worst_vertex: tuple
    saddle_ok: bool
    passed: bool
    saddle_failures: list = field(default_factory=list)


def planarity_and_saddle(surface, vectors: VertexGrid,
                         tol: float = TOL_DUAL) -> PlanarSaddleReport:
    """Check the cross of edges at each interior vertex against its co-normal.

    (a) the four incident edge vectors are orthogonal to nu (normalized by
    edge and co-normal lengths); (b) the four diagonal increments dotted
    with nu alternate in sign cyclically (saddle condition).
    """
    q = _positions(surface)
    if vectors.domain != q.domain:
        raise DomainMismatch("co-normal grid and surface live on different domains")
    p = q.values
    nu = vectors.values[1:-1, 1:-1]
    dom = q.domain
    if dom.n_u < 3 or dom.n_v < 3:
        return PlanarSaddleReport(0.0, (dom.u_min, dom.v_min), True, True, [])
    center = p[1:-1, 1:-1]
    nu_norm = np.linalg.norm(nu, axis=2)

    ortho = np.zeros(center.shape[:2])
    for edge in (p[2:, 1:-1], p[:-2, 1:-1], p[1:-1, 2:], p[1:-1, :-2]):
        e = edge - center
        res = np.abs(np.einsum("ijk,ijk->ij", e, nu))
        res /= np.maximum(np.linalg.norm(e, axis=2) * nu_norm, _TINY)
        np.maximum(ortho, res, out=ortho)

    # Diagonal dot products in cyclic order NE, NW, SW, SE must alternate.
    diag = [
        np.einsum("ijk,ijk->ij", corner - center, nu)
        for corner in (p[2:, 2:], p[:-2, 2:], p[:-2, :-2], p[2:, :-2])
    ]
    alternating = np.ones(center.shape[:2], dtype=bool)
    for a, b in zip(diag, diag[1:] + diag[:1]):
        alternating &= (a * b) < 0.0
    failures = [
        (dom.u_min + 1 + int(i), dom.v_min + 1 + int(j))
        for i, j in np.argwhere(~alternating)
    ]
    return PlanarSaddleReport(
        max_orthogonality_residual=float(ortho.max()),
        worst_vertex=_worst(ortho, dom, 1, 1),
        saddle_ok=not failures,
        passed=not failures and float(ortho.max()) <= tol,
        saddle_failures=failures,
    )


@dataclass(frozen=True)
class DualityReport:
    """Residuals of the co-normal/affine-normal duality on every face.

    ``max_pairing_residual``: worst |nu(corner) . xi(face) - 1| over the four
    corners.  ``max_cross_residual``: worst relative deviation of the four
    corner-pair cross products nu_1 x nu_2 from -F xi.
    """

    max_pairing_residual: float
    worst_pairing_face: tuple
    max_cross_residual: float
    worst_cross_face: tuple
    passed: bool


def duality_certificate(vectors: VertexGrid, normals: FaceGrid, areas: FaceGrid,
                        tol: float = TOL_DUAL) -> DualityReport:
    if not (vectors.domain == normals.domain == areas.domain):
        raise DomainMismatch("co-normals, normals and areas must share a domain")
    nu = vectors.values
    xi = normals.values
    dom = vectors.domain

    pairing = np.zeros(xi.shape[:2])
    for corner in (nu[:-1, :-1], nu[1:, :-1], nu[:-1, 1:], nu[1:, 1:]):
        np.maximum(pairing, np.abs(np.einsum("ijk,ijk->ij", corner, xi) - 1.0),
                   out=pairing)

    f_xi = areas.values[:, :, None] * xi
    scale = np.maximum(np.abs(f_xi).max(axis=2), _TINY)
    nu1 = d1(VertexGrid(dom, nu)).values
    nu2 = d2(VertexGrid(dom, nu)).values
    cross = np.zeros(xi.shape[:2])
    for nu1_pick in (nu1[:, :-1], nu1[:, 1:]):
        for nu2_pick in (nu2[:-1, :], nu2[1:, :]):
            res = np.abs(np.cross(nu1_pick, nu2_pick) + f_xi).max(axis=2) / scale
            np.maximum(cross, res, out=cross)

    return DualityReport(
        max_pairing_residual=float(pairing.max()),
        worst_pairing_face=_worst(pairing, dom),
        max_cross_residual=float(cross.max()),
        worst_cross_face=_worst(cross, dom),
        passed=float(pairing.max()) <= tol and float(cross.max()) <= tol,
    )
