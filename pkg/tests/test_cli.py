"""Command-line interface: subcommands, exit codes, determinism."""

import json
import subprocess
import sys

import numpy as np
import pytest

from affmin.cli import main
from affmin.gridio import read_grid


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture()
def paraboloid_files(tmp_path):
    conormal = tmp_path / "conormal.json"
    surface = tmp_path / "surface.json"
    assert run("generate", "--example", "paraboloid", "--box", 0, 5, 0, 5,
               "--out", conormal) == 0
    assert run("integrate", "--conormal", conormal, "--out", surface) == 0
    return conormal, surface


class TestGenerate:
    def test_writes_vertex_grid(self, tmp_path):
        out = tmp_path / "c.json"
        assert run("generate", "--example", "helicoid", "--box", 0, 4, 0, 8,
                   "--n", 8, "--out", out) == 0
        grid = read_grid(out, expected_kind="vertex")
        assert grid.components == 3
        assert grid.domain.as_tuple() == (0, 4, 0, 8)

    def test_invalid_box_is_data_error(self, tmp_path):
        # the cubic field degenerates on a box containing the origin
        code = run("generate", "--example", "cubic", "--box", 0, 3, 0, 3,
                   "--out", tmp_path / "c.json")
        assert code == 1

    def test_unknown_example_is_usage_error(self, tmp_path):
        with pytest.raises(SystemExit) as err:
            run("generate", "--example", "torus", "--box", 0, 3, 0, 3,
                "--out", tmp_path / "c.json")
        assert err.value.code == 2


class TestIntegrateAndCheck:
    def test_integrate_with_base(self, tmp_path, paraboloid_files):
        conormal, _ = paraboloid_files
        out = tmp_path / "shifted.json"
        assert run("integrate", "--conormal", conormal, "--out", out,
                   "--base", 0, 0, 1, 2, 3) == 0
        grid = read_grid(out)
        np.testing.assert_array_equal(grid.values[0, 0], (1.0, 2.0, 3.0))

    def test_check_passes(self, tmp_path, paraboloid_files):
        conormal, surface = paraboloid_files
        report = tmp_path / "report.json"
        assert run("check", "--surface", surface, "--conormal", conormal,
                   "--report", report) == 0
        body = json.loads(report.read_text())
        assert body["passed"] is True
        assert body["asymptotic"]["passed"] is True
        assert body["lelieuvre"]["passed"] is True
        assert body["path_independence"]["passed"] is True
        assert body["area_density_bridge"]["passed"] is True

    def test_check_fails_on_corrupted_surface(self, tmp_path, paraboloid_files):
        _, surface = paraboloid_files
        body = json.loads(surface.read_text())
        body["values"][3 * 6 * 3 + 3 * 3 + 2] += 0.05   # bend one z value
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(body))
        report = tmp_path / "report.json"
        assert run("check", "--surface", bad, "--report", report) == 1
        parsed = json.loads(report.read_text())
        assert parsed["passed"] is False
        assert not parsed["asymptotic"]["passed"]

    def test_check_writes_report_even_for_degenerate_surface(self, tmp_path):
        flat = tmp_path / "flat.json"
        flat.write_text(json.dumps({
            "kind": "vertex", "domain": [0, 2, 0, 2], "components": 3,
            "values": [float(x) for uv in range(9)
                       for x in (uv // 3, uv % 3, 0.0)],
        }))
        report = tmp_path / "report.json"
        assert run("check", "--surface", flat, "--report", report) == 1
        body = json.loads(report.read_text())
        assert body["passed"] is False
        assert "NonPositiveVolume" in body["error"]

    def test_missing_file_is_io_error(self, tmp_path):
        assert run("check", "--surface", tmp_path / "nope.json",
                   "--report", tmp_path / "r.json") == 2


class TestFormsReconstructCompare:
    def test_round_trip(self, tmp_path, paraboloid_files):
        _, surface = paraboloid_files
        forms = tmp_path / "forms.json"
        rebuilt = tmp_path / "rebuilt.json"
        report = tmp_path / "equiv.json"
        assert run("forms", "--surface", surface, "--out", forms) == 0
        assert run("reconstruct", "--forms", forms, "--out", rebuilt) == 0
        assert run("compare", "--a", rebuilt, "--b", surface,
                   "--report", report) == 0
        body = json.loads(report.read_text())
        assert body["equivalent"] is True
        assert body["det"] == pytest.approx(1.0, abs=1e-9)
        assert body["unimodular"] is True
        assert len(body["linear"]) == 3 and len(body["translation"]) == 3

    def test_compare_detects_difference(self, tmp_path, paraboloid_files):
        _, surface = paraboloid_files
        other = tmp_path / "other.json"
        assert run("generate", "--example", "helicoid", "--box", 0, 5, 0, 5,
                   "--out", tmp_path / "h.json") == 0
        assert run("integrate", "--conormal", tmp_path / "h.json",
                   "--out", other) == 0
        report = tmp_path / "equiv.json"
        assert run("compare", "--a", surface, "--b", other,
                   "--report", report) == 1
        assert json.loads(report.read_text())["equivalent"] is False

    def test_compare_recovers_unimodular_image(self, tmp_path, paraboloid_files):
        _, surface = paraboloid_files
        body = json.loads(surface.read_text())
        linear = np.array([[1.0, 2.0, 0.0], [0.0, 1.0, -1.0], [0.0, 0.0, 1.0]])
        shift = np.array([5.0, -3.0, 2.0])
        points = np.asarray(body["values"]).reshape(-1, 3) @ linear.T + shift
        body["values"] = points.reshape(-1).tolist()
        image = tmp_path / "image.json"
        image.write_text(json.dumps(body))
        report = tmp_path / "equiv.json"
        assert run("compare", "--a", surface, "--b", image,
                   "--report", report) == 0
        parsed = json.loads(report.read_text())
        assert parsed["det"] == pytest.approx(1.0, abs=1e-9)
        np.testing.assert_allclose(parsed["linear"], linear, atol=1e-9)

    def test_reconstruct_with_seed_file(self, tmp_path, paraboloid_files):
        _, surface = paraboloid_files
        forms = tmp_path / "forms.json"
        seed = tmp_path / "seed.json"
        rebuilt = tmp_path / "rebuilt.json"
        assert run("forms", "--surface", surface, "--out", forms) == 0
        seed.write_text(json.dumps({"points": [
            [0, 0, 0], [1, 0, 0], [0, 1, 0], [1, 1, 1],
        ]}))
        assert run("reconstruct", "--forms", forms, "--seed", seed,
                   "--out", rebuilt) == 0


class TestScalarCommands:
    def test_area_prints_value(self, capsys, paraboloid_files):
        _, surface = paraboloid_files
        assert run("area", "--surface", surface) == 0
        last_line = capsys.readouterr().out.strip().splitlines()[-1]
        assert float(last_line) == 25.0

    def test_gradient_writes_interior_grid(self, tmp_path, paraboloid_files):
        _, surface = paraboloid_files
        out = tmp_path / "grad.json"
        assert run("gradient", "--surface", surface, "--out", out) == 0
        grid = read_grid(out, expected_kind="vertex")
        assert grid.domain.as_tuple() == (1, 4, 1, 4)
        np.testing.assert_array_equal(grid.values, 0.0)

    def test_critical_pass_and_fail(self, tmp_path, paraboloid_files):
        _, surface = paraboloid_files
        assert run("critical", "--surface", surface) == 0
        body = json.loads(surface.read_text())
        body["values"][3 * 6 * 3 + 3 * 3 + 2] += 0.05
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(body))
        assert run("critical", "--surface", bad) == 1

    def test_export(self, tmp_path, paraboloid_files):
        _, surface = paraboloid_files
        out = tmp_path / "mesh.obj"
        assert run("export", "--surface", surface, "--resolution", 2,
                   "--out", out) == 0
        assert out.read_text().startswith("v ")


class TestPipeline:
    def test_end_to_end_and_determinism(self, tmp_path):
        out1 = tmp_path / "run1"
        out2 = tmp_path / "run2"
        args = ["pipeline", "--example", "sphere", "--box", 1, 7, -6, 0,
                "--outdir"]
        assert run(*args, out1) == 0
        assert run(*args, out2) == 0
        report = json.loads((out1 / "pipeline_report.json").read_text())
        assert report["passed"] is True
        assert report["certificates"]["passed"] is True
        assert report["compatibility"]["passed"] is True
        for name in ("conormal.json", "surface.json", "forms.json",
                     "reconstructed.json", "mesh_res1.obj", "mesh_res8.obj",
                     "check_report.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes(), name

    def test_default_boxes_per_example(self, tmp_path):
        # the sphere default box must respect u > v
        assert run("pipeline", "--example", "sphere",
                   "--outdir", tmp_path / "s") == 0


def test_console_entry_point():
    result = subprocess.run(
        [sys.executable, "-m", "affmin.cli", "--help"],
        capture_output=True, text=True,
    )
    assert result.returncode == 0
    assert "pipeline" in result.stdout


def test_unknown_flag_exits_two():
    result = subprocess.run(
        [sys.executable, "-m", "affmin.cli", "area", "--bogus", "x"],
        capture_output=True, text=True,
    )
    assert result.returncode == 2
    assert "usage" in result.stderr.lower()
