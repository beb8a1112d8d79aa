"""Command-line pipelines over the affmin library.

Exit codes: 0 on success, 1 when a certificate or data check fails, 2 for
usage and I/O errors.  All artifact files (grid JSON, forms bundles, OBJ
meshes) are byte-deterministic across runs; the pipeline run report is the
one exception, because it records wall time.
"""

import argparse
import hashlib
import os
import sys
import time

import numpy as np

from . import conormal
from .compatibility import (
    TOL_COMPAT,
    TOL_EQUIV,
    TOL_SEED,
    affine_equivalence,
    canonical_seed,
    compatibility_residuals,
    extract_fundamental_data,
    reconstruct,
)
from .conormal import TOL_HARMONIC, ConormalField, validate
from .errors import AffminError, NotEquivalent
from .forms import (
    TOL_FORMS,
    a2_b1_closed_form,
    cubic_coefficients,
    normal_derivative_residuals,
    structural_residuals,
)
from .geometry import (
    TOL_ASYMPTOTIC,
    TOL_DUAL,
    affine_normal,
    asymptotic_certificate,
    duality_certificate,
    face_volumes,
    planarity_and_saddle,
    recover_conormal,
)
from .gridio import (
    read_forms,
    read_grid,
    read_seed,
    write_forms,
    write_grid,
    write_json,
)
from .grids import GridDomain
from .lelieuvre import (
    TOL_INTEGRATE,
    Immersion,
    integrate,
    path_independence_residual,
    verify_lelieuvre,
)
from .mesh import export_surface_obj
from .variational import TOL_CRIT, affine_area, area_gradient, criticality_certificate

EXAMPLES = ("helicoid", "cubic", "paraboloid", "sphere")

DEFAULT_BOXES = {
    "helicoid": (0, 10, 0, 16),
    "cubic": (1, 11, 1, 11),
    "paraboloid": (0, 10, 0, 10),
    "sphere": (1, 11, -10, 0),
}


def _generate_field(example: str, box, n: int) -> ConormalField:
    u0, u1, v0, v1 = box
    if example == "helicoid":
        return conormal.helicoid(n, (u0, u1), (v0, v1))
    domain = GridDomain(u0, u1, v0, v1)
    if example == "cubic":
        return conormal.minimal_cubic(domain)
    if example == "paraboloid":
        return conormal.hyperbolic_paraboloid(domain)
    if example == "sphere":
        return conormal.improper_sphere(domain)
    raise ValueError(f"unknown example {example!r}")


def _load_surface(path) -> Immersion:
    grid = read_grid(path, expected_kind="vertex")
    if grid.components != 3:
        raise ValueError(f"{path}: surface grids must hold 3-vectors")
    dom = grid.domain
    return Immersion(grid, (dom.u_min, dom.v_min), grid.values[0, 0])


def _sha256(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        digest.update(handle.read())
    return digest.hexdigest()


def _surface_checks(surface: Immersion, field: ConormalField | None, tols) -> dict:
    """Run the geometry (and, with a field, the Lelieuvre) certificates."""
    vols = face_volumes(surface)
    normals = affine_normal(surface, vols.areas)
    asym = asymptotic_certificate(surface, tols["asymptotic"], tols["asymptotic"])
    recovery = recover_conormal(surface)

    if field is not None:
        nu = field.vectors
        bridge = float(np.abs(field.areas.values / vols.areas.values - 1.0).max())
        lel = verify_lelieuvre(surface, field, tols["integrate"])
        closure = path_independence_residual(field)
        closure_scale = float(np.abs(nu.values).max()) ** 2
        extra = {
            "lelieuvre": {
                "max_residual": lel.max_residual,
                "edge_scale": lel.edge_scale,
                "worst_edge": list(lel.worst_edge),
                "passed": lel.passed,
            },
            "path_independence": {
                "residual": closure,
                "passed": closure <= tols["integrate"] * max(closure_scale, 1.0),
            },
            "area_density_bridge": {
                "max_relative_gap": bridge,
                "passed": bridge <= tols["dual"],
            },
        }
    else:
        nu = recovery.vectors
        extra = {}

    planar = planarity_and_saddle(surface, nu, tols["dual"])
    dual = duality_certificate(nu, normals, vols.areas, tols["dual"])

    report = {
        "asymptotic": {
            "max_zero_residual": asym.max_zero_residual,
            "worst_zero_vertex": list(asym.worst_zero_vertex),
            "max_mixed_residual": asym.max_mixed_residual,
            "worst_mixed_face": list(asym.worst_mixed_face),
            "passed": asym.passed,
        },
        "conormal_recovery": {
            "max_deviation": recovery.max_deviation,
            "worst_vertex": list(recovery.worst_vertex),
            "passed": recovery.max_deviation <= tols["dual"],
        },
        "planar_saddle": {
            "max_orthogonality_residual": planar.max_orthogonality_residual,
            "worst_vertex": list(planar.worst_vertex),
            "saddle_ok": planar.saddle_ok,
            "saddle_failures": [list(x) for x in planar.saddle_failures[:8]],
            "passed": planar.passed,
        },
        "duality": {
            "max_pairing_residual": dual.max_pairing_residual,
            "max_cross_residual": dual.max_cross_residual,
            "passed": dual.passed,
        },
    }
    report.update(extra)
    report["passed"] = all(
        section["passed"] for section in report.values() if isinstance(section, dict)
    )
    return report


def _tols(args) -> dict:
    return {
        "harmonic": getattr(args, "tol_harmonic", TOL_HARMONIC),
        "integrate": getattr(args, "tol_integrate", TOL_INTEGRATE),
        "asymptotic": getattr(args, "tol_asymptotic", TOL_ASYMPTOTIC),
        "dual": getattr(args, "tol_dual", TOL_DUAL),
        "forms": getattr(args, "tol_forms", TOL_FORMS),
        "compat": getattr(args, "tol_compat", TOL_COMPAT),
        "seed": getattr(args, "tol_seed", TOL_SEED),
        "equiv": getattr(args, "tol_equiv", TOL_EQUIV),
        "crit": getattr(args, "tol_crit", TOL_CRIT),
    }


def _cmd_generate(args) -> int:
    field = _generate_field(args.example, args.box, args.n)
    write_grid(field.vectors, args.out)
    print(f"wrote co-normal grid {args.out} (min F = {field.min_area:.6g})")
    return 0


def _cmd_integrate(args) -> int:
    field = validate(read_grid(args.conormal, "vertex"), _tols(args)["harmonic"])
    if args.base is not None:
        base_vertex = (int(args.base[0]), int(args.base[1]))
        base_value = np.array(args.base[2:], dtype=float)
    else:
        base_vertex, base_value = None, None
    surface = integrate(field, base_vertex, base_value)
    write_grid(surface.positions, args.out)
    print(f"wrote surface grid {args.out} (domain {surface.domain.as_tuple()})")
    return 0


def _cmd_check(args) -> int:
    surface = _load_surface(args.surface)
    tols = _tols(args)
    field = None
    if args.conormal:
        field = validate(read_grid(args.conormal, "vertex"), tols["harmonic"])
    try:
        report = _surface_checks(surface, field, tols)
    except AffminError as exc:
        # Data so broken the certificates cannot even be evaluated (e.g. a
        # non-positive face volume) still produces a report naming it.
        report = {"error": f"{type(exc).__name__}: {exc}", "passed": False}
    report["tolerances"] = tols
    write_json(report, args.report)
    status = "pass" if report["passed"] else "FAIL"
    print(f"check: {status} (report in {args.report})")
    if not report["passed"]:
        for name, section in report.items():
            if isinstance(section, dict) and not section.get("passed", True):
                print(f"  failing certificate: {name}")
    return 0 if report["passed"] else 1


def _cmd_forms(args) -> int:
    surface = _load_surface(args.surface)
    data = extract_fundamental_data(surface)
    write_forms(data, args.out)
    print(f"wrote fundamental data {args.out}")
    return 0


def _cmd_reconstruct(args) -> int:
    data = read_forms(args.forms)
    seed = read_seed(args.seed) if args.seed else None
    tols = _tols(args)
    surface = reconstruct(data, seed, tols["seed"], tols["compat"])
    write_grid(surface.positions, args.out)
    print(f"wrote reconstructed surface {args.out}")
    return 0


def _cmd_compare(args) -> int:
    qa = _load_surface(args.a)
    qb = _load_surface(args.b)
    tols = _tols(args)
    try:
        mapping = affine_equivalence(qa, qb, tols["equiv"])
    except NotEquivalent as exc:
        write_json({
            "equivalent": False,
            "worst_vertex": list(exc.vertex),
            "gap": exc.gap,
            "tolerance": tols["equiv"],
        }, args.report)
        print(f"compare: NOT equivalent (gap {exc.gap:.3e} at {exc.vertex})")
        return 1
    write_json({
        "equivalent": True,
        "linear": [list(row) for row in mapping.linear],
        "translation": list(mapping.translation),
        "det": mapping.det,
        "unimodular": bool(abs(abs(mapping.det) - 1.0) <= tols["equiv"]),
        "tolerance": tols["equiv"],
    }, args.report)
    print(f"compare: equivalent, det = {mapping.det:.12g}")
    return 0


def _cmd_area(args) -> int:
    print(f"{affine_area(_load_surface(args.surface)):.17g}")
    return 0


def _cmd_gradient(args) -> int:
    g = area_gradient(_load_surface(args.surface))
    write_grid(g, args.out)
    print(f"wrote area gradient {args.out} (interior domain {g.domain.as_tuple()})")
    return 0


def _cmd_critical(args) -> int:
    report = criticality_certificate(_load_surface(args.surface), args.tol)
    if report.vacuous:
        print("critical: vacuous pass (no interior vertex)")
        return 0
    ratio = report.max_gradient / max(report.mean_area, 1e-300)
    status = "pass" if report.passed else "FAIL"
    print(f"critical: {status} (|grad|_inf / mean F = {ratio:.3e}, tol {args.tol:g})")
    return 0 if report.passed else 1


def _cmd_export(args) -> int:
    mesh = export_surface_obj(_load_surface(args.surface), args.resolution, args.out)
    print(f"wrote {args.out} ({len(mesh.positions)} vertices, {len(mesh.triangles)} triangles)")
    return 0


def _cmd_pipeline(args) -> int:
    started = time.perf_counter()
    tols = _tols(args)
    os.makedirs(args.outdir, exist_ok=True)
    box = tuple(args.box) if args.box else DEFAULT_BOXES[args.example]
    paths = {name: os.path.join(args.outdir, name) for name in (
        "conormal.json", "surface.json", "check_report.json", "forms.json",
        "reconstructed.json", "pipeline_report.json",
    )}

    field = _generate_field(args.example, box, args.n)
    write_grid(field.vectors, paths["conormal.json"])
    surface = integrate(field)
    write_grid(surface.positions, paths["surface.json"])

    report = {
        "command": "pipeline",
        "example": args.example,
        "box": list(box),
        "n": args.n,
        "tolerances": tols,
    }
    checks = _surface_checks(surface, field, tols)
    write_json(checks, paths["check_report.json"])

    vols = face_volumes(surface)
    normals = affine_normal(surface, vols.areas)
    form = cubic_coefficients(surface, normals, tols["forms"])
    structural = structural_residuals(surface, vols.areas, form, tols["forms"])
    derivs, closed = a2_b1_closed_form(surface, normals, vols.areas, form)
    normal_derivs = normal_derivative_residuals(surface, normals, vols.areas,
                                                derivs, tols["forms"])
    data = extract_fundamental_data(surface)
    write_forms(data, paths["forms.json"])
    forms_report = {
        "max_face_choice_spread": max(form.max_spread_u, form.max_spread_v),
        "structural_max_residual": structural.max_residual,
        "closed_form_relative_gap": closed.relative_gap,
        "normal_derivative_max_residual": normal_derivs.max_residual,
        "passed": bool(
            structural.passed and normal_derivs.passed
            and closed.relative_gap <= tols["forms"]
        ),
    }

    residuals = compatibility_residuals(data)
    p = surface.positions.values
    own_seed = np.stack([p[0, 0], p[1, 0], p[0, 1], p[1, 1]])
    roundtrip = reconstruct(data, own_seed, tols["seed"], tols["compat"])
    scale = max(float(np.abs(p - p[0, 0]).max()), 1e-300)
    roundtrip_gap = float(np.abs(roundtrip.positions.values - p).max()) / scale
    canonical = reconstruct(data, canonical_seed(float(data.areas.values[0, 0])),
                            tols["seed"], tols["compat"])
    write_grid(canonical.positions, paths["reconstructed.json"])
    mapping = affine_equivalence(canonical, surface, tols["equiv"])
    compat_report = {
        "residuals": list(residuals),
        "roundtrip_relative_gap": roundtrip_gap,
        "canonical_equivalence_det": mapping.det,
        "passed": bool(
            residuals.max <= tols["compat"]
            and roundtrip_gap <= tols["compat"]
            and abs(mapping.det - 1.0) <= tols["equiv"]
        ),
    }

    crit = criticality_certificate(surface, tols["crit"])
    crit_report = {
        "max_gradient": crit.max_gradient,
        "mean_area": crit.mean_area,
        "vacuous": crit.vacuous,
        "passed": crit.passed,
        "affine_area": affine_area(surface),
    }

    meshes = {}
    for res in args.resolutions:
        mesh_path = os.path.join(args.outdir, f"mesh_res{res}.obj")
        mesh = export_surface_obj(surface, res, mesh_path)
        meshes[f"mesh_res{res}.obj"] = {
            "vertices": len(mesh.positions),
            "triangles": len(mesh.triangles),
        }

    digests = {}
    for name in ("conormal.json", "surface.json", "forms.json", "reconstructed.json"):
        digests[name] = _sha256(paths[name])
    for res in args.resolutions:
        name = f"mesh_res{res}.obj"
        digests[name] = _sha256(os.path.join(args.outdir, name))

    passed = bool(checks["passed"] and forms_report["passed"]
                  and compat_report["passed"] and crit.passed)
    report.update({
        "input_digests": digests,
        "certificates": checks,
        "forms": forms_report,
        "compatibility": compat_report,
        "criticality": crit_report,
        "meshes": meshes,
        "passed": passed,
        "wall_time_s": time.perf_counter() - started,
    })
    write_json(report, paths["pipeline_report.json"])
    print(f"pipeline {args.example}: {'pass' if passed else 'FAIL'} "
          f"(artifacts in {args.outdir})")
    return 0 if passed else 1


def _add_tolerance_flags(parser, names):
    flags = {
        "harmonic": ("--tol-harmonic", TOL_HARMONIC, "harmonicity tolerance"),
        "integrate": ("--tol-integrate", TOL_INTEGRATE, "edge-equation tolerance"),
        "asymptotic": ("--tol-asymptotic", TOL_ASYMPTOTIC, "asymptotic-certificate tolerance"),
        "dual": ("--tol-dual", TOL_DUAL, "duality/recovery tolerance"),
        "forms": ("--tol-forms", TOL_FORMS, "cubic-form tolerance"),
        "compat": ("--tol-compat", TOL_COMPAT, "compatibility tolerance"),
        "seed": ("--tol-seed", TOL_SEED, "seed determinant tolerance"),
        "equiv": ("--tol-equiv", TOL_EQUIV, "affine-equivalence tolerance"),
        "crit": ("--tol-crit", TOL_CRIT, "criticality tolerance"),
    }
    for name in names:
        flag, default, help_text = flags[name]
        parser.add_argument(flag, type=float, default=default, help=help_text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="affmin",
        description="Construct, verify, reconstruct and export discrete "
                    "affine minimal surfaces with indefinite metric.",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write an example co-normal field",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--example", choices=EXAMPLES, required=True)
    p.add_argument("--box", type=int, nargs=4, metavar=("U0", "U1", "V0", "V1"),
                   required=True, help="inclusive vertex bounds")
    p.add_argument("--n", type=int, default=16, help="helicoid samples per turn")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("integrate", help="integrate a co-normal field",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--conormal", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--base", type=float, nargs=5, metavar=("U", "V", "X", "Y", "Z"),
                   help="base vertex and its position")
    _add_tolerance_flags(p, ["harmonic"])
    p.set_defaults(func=_cmd_integrate)

    p = sub.add_parser("check", help="run the certificate suite on a surface",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--surface", required=True)
    p.add_argument("--conormal", help="optional generating co-normal grid")
    p.add_argument("--report", required=True)
    _add_tolerance_flags(p, ["harmonic", "integrate", "asymptotic", "dual"])
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("forms", help="extract fundamental data (F, A, B)",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--surface", required=True)
    p.add_argument("--out", required=True)
    _add_tolerance_flags(p, ["forms"])
    p.set_defaults(func=_cmd_forms)

    p = sub.add_parser("reconstruct", help="rebuild a surface from (F, A, B)",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--forms", required=True)
    p.add_argument("--seed", "--seed-file", dest="seed",
                   help="JSON file with the four corner points")
    p.add_argument("--out", required=True)
    _add_tolerance_flags(p, ["seed", "compat"])
    p.set_defaults(func=_cmd_reconstruct)

    p = sub.add_parser("compare", help="solve and verify an affine equivalence",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--report", required=True)
    _add_tolerance_flags(p, ["equiv"])
    p.set_defaults(func=_cmd_compare)

    p = sub.add_parser("area", help="print the affine area of a surface")
    p.add_argument("--surface", required=True)
    p.set_defaults(func=_cmd_area)

    p = sub.add_parser("gradient", help="write the interior area gradient")
    p.add_argument("--surface", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_gradient)

    p = sub.add_parser("critical", help="criticality certificate",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--surface", required=True)
    p.add_argument("--tol", type=float, default=TOL_CRIT)
    p.set_defaults(func=_cmd_critical)

    p = sub.add_parser("export", help="tessellate and write an OBJ mesh",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--surface", required=True)
    p.add_argument("--resolution", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_export)

    p = sub.add_parser("pipeline", help="generate/integrate/check/forms/"
                       "reconstruct/critical/export end to end",
                       formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    p.add_argument("--example", choices=EXAMPLES, required=True)
    p.add_argument("--box", type=int, nargs=4, metavar=("U0", "U1", "V0", "V1"),
                   help="inclusive vertex bounds (per-example default)")
    p.add_argument("--n", type=int, default=16, help="helicoid samples per turn")
    p.add_argument("--outdir", required=True)
    p.add_argument("--resolutions", type=int, nargs=2, default=(1, 8),
                   metavar=("R1", "R2"), help="the two mesh export resolutions")
    _add_tolerance_flags(p, ["harmonic", "integrate", "asymptotic", "dual",
                             "forms", "compat", "seed", "equiv", "crit"])
    p.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except AffminError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
