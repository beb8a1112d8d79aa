"""Discrete cubic form coefficients and the structural identities they obey.

The cubic form assigns to each u-interior vertex the coefficient

    A(u,v) = [q1(u-1/2,v), q1(u+1/2,v), xi(adjacent face)]

and to each v-interior vertex

    B(u,v) = [q2(u,v+1/2), q2(u,v-1/2), xi(adjacent face)]

(the argument order of B matters for downstream signs).  Which of the up to
four adjacent faces supplies xi must not matter; the construction asserts
this and reports the average.  The second differences of the positions then
expand in the edge basis with coefficients built from F, A and B, and the
affine normal differentiates against A_2 = d2(A), B_1 = d1(B); both facts
are checked here as residual reports.
"""

from dataclasses import dataclass

import numpy as np

from .errors import IllDefinedForm
from .geometry import _det3, _positions, face_volumes
from .grids import FaceGrid, UEdgeGrid, VEdgeGrid, VertexGrid, d1, d2, d11, d22

__all__ = [
    "TOL_FORMS",
    "CubicForm",
    "FormDerivatives",
    "cubic_coefficients",
    "StructuralReport",
    "structural_residuals",
    "ClosedFormReport",
    "a2_b1_closed_form",
    "NormalDerivativeReport",
    "normal_derivative_residuals",
]

# Relative agreement required between the face choices defining A and B.
TOL_FORMS = 1e-8

_TINY = 1e-300


@dataclass(frozen=True)
class CubicForm:
    """Cubic form coefficients: u_coeff (A) on u-interior vertices, v_coeff (B)
    on v-interior vertices, each with the worst relative face-choice spread."""

    u_coeff: VertexGrid
    v_coeff: VertexGrid
    max_spread_u: float
    max_spread_v: float


@dataclass(frozen=True)
class FormDerivatives:
    """Staggered derivatives of the cubic coefficients and the area density.

    The coefficient derivatives equal d2(A) and d1(B) up to rounding;
    ``a2_b1_closed_form`` fills them from the closed-form determinants and
    certifies that agreement.
    """

    u_coeff_dv: VEdgeGrid   # A_2(u, v+1/2), u interior
    v_coeff_du: UEdgeGrid   # B_1(u+1/2, v), v interior
    area_du: VEdgeGrid      # F_1(u, v+1/2) = F(u+1/2,v+1/2) - F(u-1/2,v+1/2)
    area_dv: UEdgeGrid      # F_2(u+1/2, v) = F(u+1/2,v+1/2) - F(u+1/2,v-1/2)


def _coefficient(dets_by_face, out_shape, domain, offset, tol):
    """Average determinant over face choices, asserting their agreement.

    ``dets_by_face`` yields ((determinant slab, area slab), output slice)
    pairs; spreads are judged relative to |mean| plus the mean participating
    area density.
    """
    total = np.zeros(out_shape)
    f_total = np.zeros(out_shape)
    count = np.zeros(out_shape)
    lo = np.full(out_shape, np.inf)
    hi = np.full(out_shape, -np.inf)
    for (det, f_vals), sl in dets_by_face:
        total[sl] += det
        f_total[sl] += f_vals
        count[sl] += 1.0
        np.minimum(lo[sl], det, out=lo[sl])
        np.maximum(hi[sl], det, out=hi[sl])
    mean = total / count
    spread = hi - lo
    scale = np.abs(mean) + f_total / count
    if np.any(spread > tol * scale):
        i, j = np.unravel_index(np.argmax(spread - tol * scale), spread.shape)
        vertex = (domain.u_min + offset[0] + int(i), domain.v_min + offset[1] + int(j))
        raise IllDefinedForm(vertex, float(spread[i, j]))
    return mean, float((spread / np.maximum(scale, _TINY)).max())


def cubic_coefficients(surface, normals: FaceGrid, tol: float = TOL_FORMS) -> CubicForm:
    """Cubic coefficients of an immersion given its affine normal field."""
    q = _positions(surface)
    dom = q.domain
    if dom.n_u < 3 or dom.n_v < 3:
        raise IllDefinedForm((dom.u_min, dom.v_min), float("nan"))
    e1 = d1(q).values
    e2 = d2(q).values
    xi = normals.values
    f = face_volumes(q).areas.values

    cross_u = np.cross(e1[:-1, :], e1[1:, :])          # u-interior vertices
    a_faces = (
        ((_det3_slab(cross_u[:, :-1], xi[1:, :]), f[1:, :]), (slice(None), slice(None, -1))),
        ((_det3_slab(cross_u[:, :-1], xi[:-1, :]), f[:-1, :]), (slice(None), slice(None, -1))),
        ((_det3_slab(cross_u[:, 1:], xi[1:, :]), f[1:, :]), (slice(None), slice(1, None))),
        ((_det3_slab(cross_u[:, 1:], xi[:-1, :]), f[:-1, :]), (slice(None), slice(1, None))),
    )
    a_mean, a_rel = _coefficient(a_faces, (dom.n_u - 2, dom.n_v), dom, (1, 0), tol)

    cross_v = np.cross(e2[:, 1:], e2[:, :-1])          # v-interior vertices
    b_faces = (
        ((_det3_slab(cross_v[:-1, :], xi[:, 1:]), f[:, 1:]), (slice(None, -1), slice(None))),
        ((_det3_slab(cross_v[:-1, :], xi[:, :-1]), f[:, :-1]), (slice(None, -1), slice(None))),
        ((_det3_slab(cross_v[1:, :], xi[:, 1:]), f[:, 1:]), (slice(1, None), slice(None))),
        ((_det3_slab(cross_v[1:, :], xi[:, :-1]), f[:, :-1]), (slice(1, None), slice(None))),
    )
    b_mean, b_rel = _coefficient(b_faces, (dom.n_u, dom.n_v - 2), dom, (0, 1), tol)

    return CubicForm(
        u_coeff=VertexGrid(dom.shrink(du_lo=1, du_hi=1), a_mean),
        v_coeff=VertexGrid(dom.shrink(dv_lo=1, dv_hi=1), b_mean),
        max_spread_u=a_rel,
        max_spread_v=b_rel,
    )


def _det3_slab(cross, xi):
    return np.einsum("ijk,ijk->ij", cross, xi)


@dataclass(frozen=True)
class StructuralReport:
    """Worst relative residual of the eight second-difference expansions."""

    max_residual: float
    per_identity: dict
    worst_identity: str
    passed: bool


def structural_residuals(surface, areas: FaceGrid, form: CubicForm,
                         tol: float = TOL_FORMS) -> StructuralReport:
    """Check F*q11 = F1*q1 + A*q2 and F*q22 = B*q1 + F2*q2, all variants.

    Residuals are normalized by the largest participating term per stencil.
    """
    q = _positions(surface)
    dom = q.domain
    e1 = d1(q).values
    e2 = d2(q).values
    f = areas.values
    quu = d11(q).values
    qvv = d22(q).values
    a = form.u_coeff.values
    b = form.v_coeff.values
    f1 = d1(areas).values
    f2 = d2(areas).values

    per = {}

    def record(name, t_main, t_edge1, t_edge2, floor):
        # Floor the per-stencil scale by F times the participating edge
        # lengths so identities whose every term vanishes (straight rulings,
        # constant F) register as satisfied instead of comparing noise to
        # noise.
        resid = np.abs(t_main - t_edge1 - t_edge2).max(axis=2)
        scale = np.maximum.reduce([
            np.abs(t_main).max(axis=2),
            np.abs(t_edge1).max(axis=2),
            np.abs(t_edge2).max(axis=2),
            floor,
        ])
        per[name] = float((resid / np.maximum(scale, _TINY)).max())

    # q11 expansions (vertex u-interior; vsign picks the v+1/2 or v-1/2 row).
    for vsign, vsl in ((+1, np.s_[:, :-1]), (-1, np.s_[:, 1:])):
        a_used = a[vsl][..., None]
        quu_used = quu[vsl]
        q2_used = e2[1:-1, :]
        for uside, f_face, e1_used in (
            (+1, f[1:, :], e1[1:, :][vsl]),
            (-1, f[:-1, :], e1[:-1, :][vsl]),
        ):
            floor = f_face * np.maximum(
                np.abs(e1_used).max(axis=2), np.abs(q2_used).max(axis=2)
            )
            record(
                f"q11[v{'+' if vsign > 0 else '-'}][u{'+' if uside > 0 else '-'}]",
                f_face[..., None] * quu_used,
                f1[..., None] * e1_used,
                a_used * q2_used,
                floor,
            )

    # q22 expansions (vertex v-interior; usign picks the u+1/2 or u-1/2 column).
    for usign, usl in ((+1, np.s_[:-1, :]), (-1, np.s_[1:, :])):
        b_used = b[usl][..., None]
        qvv_used = qvv[usl]
        q1_used = e1[:, 1:-1]
        for vside, f_face, e2_used in (
            (+1, f[:, 1:], e2[:, 1:][usl]),
            (-1, f[:, :-1], e2[:, :-1][usl]),
        ):
            floor = f_face * np.maximum(
                np.abs(q1_used).max(axis=2), np.abs(e2_used).max(axis=2)
            )
            record(
                f"q22[u{'+' if usign > 0 else '-'}][v{'+' if vside > 0 else '-'}]",
                f_face[..., None] * qvv_used,
                b_used * q1_used,
                f2[..., None] * e2_used,
                floor,
            )

    worst = max(per, key=per.get)
    return StructuralReport(
        max_residual=per[worst],
        per_identity=per,
        worst_identity=worst,
        passed=per[worst] <= tol,
    )


@dataclass(frozen=True)
class ClosedFormReport:
    """Gap between closed-form A_2, B_1 and the direct differences d2(A), d1(B)."""

    max_gap: float
    scale: float
    relative_gap: float


def a2_b1_closed_form(surface, normals: FaceGrid, areas: FaceGrid,
                      form: CubicForm) -> tuple[FormDerivatives, ClosedFormReport]:
    """Closed-form cubic-coefficient derivatives, checked against differences.

    A_2(u, v+1/2) = -F(u-1/2,v+1/2) [q1(u+1/2,v), xi(u-1/2,v+1/2), xi(u+1/2,v+1/2)]
    B_1(u+1/2, v) =  F(u+1/2,v-1/2) [q2(u,v+1/2), xi(u+1/2,v-1/2), xi(u+1/2,v+1/2)]

    These follow by differencing the cross-product identities
    q1(u-1/2,v) x q1(u+1/2,v) = A nu and q2(u,v+1/2) x q2(u,v-1/2) = B nu
    and expanding the shifted edges through the affine normal.
    """
    q = _positions(surface)
    e1 = d1(q).values
    e2 = d2(q).values
    xi = normals.values
    f = areas.values

    a2_closed = -f[:-1, :] * _det3(e1[1:, :-1], xi[:-1, :], xi[1:, :])
    b1_closed = f[:, :-1] * _det3(e2[:-1, 1:], xi[:, :-1], xi[:, 1:])

    a2_direct = d2(form.u_coeff)
    b1_direct = d1(form.v_coeff)

    derivs = FormDerivatives(
        u_coeff_dv=a2_direct.with_values(a2_closed),
        v_coeff_du=b1_direct.with_values(b1_closed),
        area_du=d1(areas),
        area_dv=d2(areas),
    )
    gap = max(
        float(np.abs(a2_closed - a2_direct.values).max()),
        float(np.abs(b1_closed - b1_direct.values).max()),
    )
    scale = max(
        float(np.abs(a2_direct.values).max()), float(np.abs(a2_closed).max()),
        float(np.abs(b1_direct.values).max()), float(np.abs(b1_closed).max()),
    )
    return derivs, ClosedFormReport(
        max_gap=gap, scale=scale, relative_gap=gap / max(scale, _TINY)
    )


@dataclass(frozen=True)
class NormalDerivativeReport:
    """Residuals of F F xi_1 = A_2 q2 and F F xi_2 = B_1 q1, normalized.

    The affine normal differentiates inside the edge span with the cubic
    derivative as coefficient, matching the smooth structural equations of
    a vanishing-mean-curvature surface.
    """

    max_residual_u: float
    max_residual_v: float
    passed: bool

    @property
    def max_residual(self) -> float:
        return max(self.max_residual_u, self.max_residual_v)


def normal_derivative_residuals(surface, normals: FaceGrid, areas: FaceGrid,
                                derivs: FormDerivatives,
                                tol: float = TOL_FORMS) -> NormalDerivativeReport:
    q = _positions(surface)
    e1 = d1(q).values
    e2 = d2(q).values
    xi = normals.values
    f = areas.values
    a2 = derivs.u_coeff_dv.values
    b1 = derivs.v_coeff_du.values

    def relative(term1, term2, floor):
        # Floored by F F |xi| so constant-normal regions do not compare
        # rounding noise against rounding noise.
        resid = np.abs(term1 - term2).max(axis=2)
        scale = np.maximum.reduce([
            np.abs(term1).max(axis=2), np.abs(term2).max(axis=2), floor,
        ])
        return float((resid / np.maximum(scale, _TINY)).max())

    ff_u = f[:-1, :] * f[1:, :]
    res_u = relative(
        ff_u[..., None] * (xi[1:, :] - xi[:-1, :]),
        a2[..., None] * e2[1:-1, :],
        ff_u * np.maximum(np.abs(xi[1:, :]).max(axis=2), np.abs(xi[:-1, :]).max(axis=2)),
    )
    ff_v = f[:, :-1] * f[:, 1:]
    res_v = relative(
        ff_v[..., None] * (xi[:, 1:] - xi[:, :-1]),
        b1[..., None] * e1[:, 1:-1],
        ff_v * np.maximum(np.abs(xi[:, 1:]).max(axis=2), np.abs(xi[:, :-1]).max(axis=2)),
    )
    return NormalDerivativeReport(
        max_residual_u=res_u,
        max_residual_v=res_v,
        passed=max(res_u, res_v) <= tol,
    )
