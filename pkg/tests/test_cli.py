"""Command-line interface: subcommands, config validation, reports, exit codes."""

import json

import numpy as np
import pytest

from korn_kit import cli, fieldio
from korn_kit.fields import GridSpec, VectorField
from korn_kit.transport import CoefficientTensorField


def run_cli(args):
    return cli.main(args)


def read_report(out_dir, name):
    return json.loads((out_dir / name).read_text())


class TestExitCodes:
    def test_algebra_selftest_passes(self, tmp_path):
        assert run_cli(["algebra", "selftest", "--out", str(tmp_path)]) == 0
        report = read_report(tmp_path, "algebra_selftest.json")
        assert report["passed"] is True
        assert all(c["passed"] for c in report["checks"])
        assert (tmp_path / "algebra_selftest_checks.csv").exists()

    def test_unknown_config_key_is_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"definitely_not_a_key": 1}))
        code = run_cli(["korn", "eig", "--config", str(cfg), "--out", str(tmp_path)])
        assert code == 2
        err = json.loads(capsys.readouterr().out)
        assert err["error"]["key"] == "definitely_not_a_key"

    def test_bad_schema_is_exit_2(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"schema": "other/9"}))
        assert run_cli(["verify-curl", "--config", str(cfg)]) == 2
        err = json.loads(capsys.readouterr().out)
        assert err["error"]["key"] == "schema"

    def test_nonpositive_tol_is_exit_2(self, tmp_path, capsys):
        code = run_cli(["verify-curl", "--tol", "-1.0", "--out", str(tmp_path)])
        assert code == 2
        assert json.loads(capsys.readouterr().out)["error"]["key"] == "tol"

    def test_missing_config_file_is_exit_2(self, tmp_path, capsys):
        code = run_cli(["korn", "probe", "--config", str(tmp_path / "nope.json")])
        assert code == 2
        assert json.loads(capsys.readouterr().out)["error"]["key"] == "config"

    def test_verdict_failure_is_exit_1(self, tmp_path):
        # an impossible tolerance forces a verdict failure on a clean run
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"case": "quadratic"}))
        code = run_cli(["verify-curl", "--config", str(cfg), "--tol", "1e-30",
                        "--out", str(tmp_path)])
        assert code == 1
        report = read_report(tmp_path, "verify_curl.json")
        assert report["passed"] is False


class TestReports:
    def test_reports_embed_hash_seed_tolerance(self, tmp_path):
        assert run_cli(["transport", "counterexample", "--out", str(tmp_path),
                        "--seed", "7"]) == 0
        report = read_report(tmp_path, "transport_counterexample.json")
        assert len(report["config_sha256"]) == 64
        assert report["seed"] == 7
        assert "tolerance" in report

    def test_byte_identical_reports_for_same_seed(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            assert run_cli(["korn", "eig", "--seed", "3", "--out", str(out)]) == 0
        assert (out1 / "korn_eig.json").read_bytes() == \
            (out2 / "korn_eig.json").read_bytes()
        assert (out1 / "korn_eig_eigenvalues.csv").read_bytes() == \
            (out2 / "korn_eig_eigenvalues.csv").read_bytes()

    def test_seed_changes_seeded_experiments(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"case": "curvilinear", "shape": [9, 9, 9]}))
        for out, seed in ((out1, "1"), (out2, "2")):
            assert run_cli(["korn", "rigid", "--config", str(cfg), "--seed", seed,
                            "--out", str(out)]) == 0
        r1 = read_report(out1, "korn_rigid.json")
        r2 = read_report(out2, "korn_rigid.json")
        assert r1["recovery"]["rotation"] != r2["recovery"]["rotation"]


class TestVerifyCurl:
    def test_quadratic_default(self, tmp_path):
        assert run_cli(["verify-curl", "--out", str(tmp_path)]) == 0
        report = read_report(tmp_path, "verify_curl.json")
        assert report["verdict"]["max_error"] <= 1e-9

    def test_trigonometric_order(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"case": "trigonometric", "shape": 9,
                                   "levels": 2}))
        assert run_cli(["verify-curl", "--config", str(cfg),
                        "--out", str(tmp_path)]) == 0
        report = read_report(tmp_path, "verify_curl.json")
        assert report["verdict"]["observed_order"] >= 1.9

    def test_trig_needs_two_levels(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"case": "trigonometric", "levels": 1}))
        assert run_cli(["verify-curl", "--config", str(cfg)]) == 2
        assert json.loads(capsys.readouterr().out)["error"]["key"] == "levels"


class TestTransportCommands:
    def test_propagate_exponential(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"shape": [9, 9, 9], "steps": 100}))
        assert run_cli(["transport", "propagate", "--config", str(cfg),
                        "--out", str(tmp_path)]) == 0
        report = read_report(tmp_path, "transport_propagate.json")
        assert report["residual"]["passed"] is True
        zeta = fieldio.load_field(tmp_path / "zeta.kfk")
        assert isinstance(zeta, VectorField)
        assert zeta.grid.shape == (9, 9, 9)

    def test_propagate_zero_case(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"case": "zero", "shape": [7, 7, 9]}))
        assert run_cli(["transport", "propagate", "--config", str(cfg),
                        "--out", str(tmp_path)]) == 0
        report = read_report(tmp_path, "transport_propagate.json")
        assert report["zeta_max"] <= 1e-10

    def test_propagate_from_field_files(self, tmp_path):
        grid = GridSpec((6, 6, 8), (0.0,) * 3, 0.125)
        tensor = np.zeros((3, 3, 3))
        for i in range(3):
            tensor[i, 2, i] = 1.0
        coef = CoefficientTensorField.constant(grid, tensor)
        face = VectorField(grid.face(-1),
                           np.ones(grid.face(-1).shape + (3,)))
        fieldio.save_field(tmp_path / "g.kfk", coef)
        fieldio.save_field(tmp_path / "face.kfk", face)
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"case": "files",
                                   "g_file": str(tmp_path / "g.kfk"),
                                   "face_file": str(tmp_path / "face.kfk"),
                                   "steps": 100}))
        code = run_cli(["transport", "propagate", "--config", str(cfg),
                        "--out", str(tmp_path), "--tol", "0.05"])
        assert code == 0

    def test_flood_l_shape(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"domain": "l-shape", "shape": [13, 13, 7],
                                   "arm": 5}))
        assert run_cli(["transport", "flood", "--config", str(cfg),
                        "--out", str(tmp_path)]) == 0
        report = read_report(tmp_path, "transport_flood.json")
        assert report["report"]["passed"] is True
        assert len(report["report"]["cuboids"]) >= 2
        csv_text = (tmp_path / "transport_flood_cuboids.csv").read_text()
        assert csv_text.count("\n") >= 3

    def test_counterexample(self, tmp_path):
        assert run_cli(["transport", "counterexample", "--out", str(tmp_path)]) == 0
        report = read_report(tmp_path, "transport_counterexample.json")
        inner = report["report"]
        assert inner["full_divergent"] is True
        assert inner["identity_residual_max"] <= 1e-12
        assert inner["truncated_solution_max"] <= 1e-10


class TestKornCommands:
    def test_eig_clamped_default(self, tmp_path):
        assert run_cli(["korn", "eig", "--out", str(tmp_path)]) == 0
        report = read_report(tmp_path, "korn_eig.json")
        assert report["results"]["l2"]["lambda_min"] > 0
        assert report["results"]["l2"]["kernel_dim"] == 0

    def test_eig_unconstrained_kernel(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"gamma": "none", "gram": "both"}))
        assert run_cli(["korn", "eig", "--config", str(cfg),
                        "--out", str(tmp_path)]) == 0
        report = read_report(tmp_path, "korn_eig.json")
        assert report["results"]["l2"]["kernel_dim"] == 6
        assert report["results"]["h1"]["kernel_dim"] == 6

    def test_probe_clamped(self, tmp_path):
        assert run_cli(["korn", "probe", "--out", str(tmp_path)]) == 0
        report = read_report(tmp_path, "korn_probe.json")
        assert report["kernel_found"] is False

    def test_probe_unconstrained(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"gamma": "none"}))
        assert run_cli(["korn", "probe", "--config", str(cfg),
                        "--out", str(tmp_path)]) == 0
        report = read_report(tmp_path, "korn_probe.json")
        assert report["kernel_found"] is True
        assert report["boundary_condition_missing"] is True

    def test_rigid_affine(self, tmp_path):
        assert run_cli(["korn", "rigid", "--out", str(tmp_path)]) == 0
        report = read_report(tmp_path, "korn_rigid.json")
        assert report["recovery"]["reconstruction_residual"] <= 1e-12
        assert report["rotation_error"] <= 1e-12

    def test_rigid_curvilinear(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"case": "curvilinear", "shape": [17, 17, 17]}))
        assert run_cli(["korn", "rigid", "--config", str(cfg),
                        "--out", str(tmp_path)]) == 0

    def test_gp_identity_field_file(self, tmp_path):
        assert run_cli(["korn", "gp", "--out", str(tmp_path)]) == 0
        report = read_report(tmp_path, "korn_gp.json")
        assert report["gp_max"] == 0.0
        tensor = fieldio.load_field(tmp_path / "gp_field.kfk")
        assert isinstance(tensor, CoefficientTensorField)

    def test_gp_rotation_family(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"p_family": {"name": "rotation-valued"},
                                   "shape": [7, 7, 7]}))
        assert run_cli(["korn", "gp", "--config", str(cfg),
                        "--out", str(tmp_path)]) == 0
        report = read_report(tmp_path, "korn_gp.json")
        assert report["gp_max"] > 0.0
        assert report["p_det_min"] == pytest.approx(1.0, abs=1e-12)

    def test_eig_from_p_file(self, tmp_path):
        from korn_kit import korn
        grid = GridSpec((4, 4, 4), (0.0,) * 3, 0.25)
        p = korn.builtin_p_field("rotation-valued", grid)
        fieldio.save_field(tmp_path / "p.kfk", p)
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"p_file": str(tmp_path / "p.kfk")}))
        assert run_cli(["korn", "eig", "--config", str(cfg),
                        "--out", str(tmp_path)]) == 0
        report = read_report(tmp_path, "korn_eig.json")
        assert report["n_dofs"] == 3 * 64 - 3 * 16  # one face clamped


class TestFloodMaskFile:
    def test_mask_file_domain(self, tmp_path):
        grid = GridSpec((9, 9, 7), (0.0,) * 3, 0.125)
        domain = np.zeros(grid.shape)
        domain[:, :4, :] = 1.0
        domain[:4, :, :] = 1.0
        fieldio.save_field(tmp_path / "mask.kfk",
                           VectorField(grid, domain[..., None]))
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"mask_file": str(tmp_path / "mask.kfk"),
                                   "coefficient_scale": 0.5}))
        assert run_cli(["transport", "flood", "--config", str(cfg),
                        "--out", str(tmp_path)]) == 0
        report = read_report(tmp_path, "transport_flood.json")
        assert report["report"]["passed"] is True
        assert len(report["report"]["cuboids"]) >= 2
