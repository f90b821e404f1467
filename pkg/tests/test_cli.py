import json
import math

from bcvhelix.cli import main


def run(tmp_path, command, cfg, overrides=(), out=None):
    cfg_path = tmp_path / "job.json"
    cfg_path.write_text(json.dumps(cfg))
    out_dir = str(out or tmp_path)
    argv = [command, "--config", str(cfg_path), "--out", out_dir]
    for item in overrides:
        argv += ["--override", item]
    return main(argv)


NIL_MINIMAL = {
    "space": {"kappa": 0.0, "tau": 0.5},
    "seed": {"family": "minimal-case", "m": 1.0, "a": 0.5, "c": 1.0, "u_range": [-3, 3]},
    "grid": {"nu": 15, "nt": 7, "t_range": [-3.0, 3.0]},
    "output": {"basename": "nilcat", "formats": ["csv", "obj", "json"]},
}

HELICOID = {
    "space": {"kappa": 0.0, "tau": 0.0},
    "seed": {
        "family": "explicit",
        "m": 1.0,
        "a": 1.0,
        "u_range": [0.5, 1.5],
        "U": "sqrt(u*u + 1)",
        "dU": "u / sqrt(u*u + 1)",
    },
    "grid": {"nu": 2, "nt": 2, "t_range": [0.0, 1.0]},
    "output": {"basename": "heli", "formats": ["obj", "csv", "json"]},
}


class TestClassify:
    def test_heisenberg(self, tmp_path, capsys):
        assert run(tmp_path, "classify", NIL_MINIMAL) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["class"] == "Heisenberg"

    def test_sphere(self, tmp_path, capsys):
        cfg = dict(NIL_MINIMAL, space={"kappa": 1.0, "tau": 0.5})
        assert run(tmp_path, "classify", cfg) == 0
        assert json.loads(capsys.readouterr().out)["class"] == "Sphere"


class TestChartProfile:
    def test_nil_profile_csv_matches_closed_forms(self, tmp_path):
        cfg = dict(NIL_MINIMAL)
        cfg["grid"] = {"nu": 31, "nt": 5, "t_range": [-3.0, 3.0]}
        assert run(tmp_path, "minimal", cfg) == 0
        rows = (tmp_path / "nilcat.profile.csv").read_text().strip().splitlines()
        assert rows[0] == "u,xi1,xi2,theta0,U"
        for row in rows[1:]:
            u, xi1, xi2, th0, U = map(float, row.split(","))
            assert abs(xi1 - math.sqrt(u * u + 1)) < 1e-8
            assert abs(xi2 - 0.5 * (u + math.atan(u))) < 1e-8
            th_exact = -math.atan(u) + math.sqrt(2) * math.atan(u / math.sqrt(2))
            assert abs(th0 - th_exact) < 1e-8
            assert abs(U - 0.5 * (u * u + 2)) < 1e-12


class TestVerify:
    def test_nil_minimal_passes(self, tmp_path, capsys):
        assert run(tmp_path, "verify", NIL_MINIMAL) == 0
        report = json.loads((tmp_path / "nilcat.verify.json").read_text())
        assert report["pass"] is True
        assert report["checks"]["h_ext_vs_H"]["value"] < 1e-4
        printed = json.loads(capsys.readouterr().out)
        assert printed["pass"] is True

    def test_euclidean_cmc_case(self, tmp_path):
        cfg = {
            "space": {"kappa": 0.0, "tau": 0.0},
            "seed": {"family": "cmc-case", "m": 1.0, "a": 0.0, "H": 1.0, "c": 0.0,
                      "u_range": [-1.2, 1.2]},
            "grid": {"nu": 11, "nt": 5, "t_range": [-2.0, 2.0]},
            "output": {"basename": "dd", "formats": ["json"]},
        }
        assert run(tmp_path, "verify", cfg) == 0

    def test_perturbed_explicit_fails(self, tmp_path):
        cfg = {
            "space": {"kappa": 0.0, "tau": 0.0},
            "seed": {
                "family": "explicit", "m": 1.0, "a": 0.0, "H": 0.0,
                "u_range": [-1.5, 1.5],
                "U": "sqrt(u*u + 1) + 0.02*u*u",
            },
            "grid": {"nu": 11, "nt": 5, "t_range": [-2.0, 2.0]},
            "output": {"basename": "bad", "formats": ["json"]},
        }
        assert run(tmp_path, "verify", cfg) == 1
        report = json.loads((tmp_path / "bad.verify.json").read_text())
        assert report["pass"] is False
        assert report["checks"]["cmc_residual"]["value"] > 1e-3


class TestExport:
    def test_minimal_two_by_two_obj(self, tmp_path):
        assert run(tmp_path, "export", HELICOID) == 0
        lines = (tmp_path / "heli.obj").read_text().splitlines()
        vs = [l for l in lines if l.startswith("v ")]
        fs = [l for l in lines if l.startswith("f ")]
        assert len(vs) == 4 and len(fs) == 2

    def test_csv_roundtrip_bit_exact(self, tmp_path):
        assert run(tmp_path, "export", HELICOID) == 0
        rows = (tmp_path / "heli.csv").read_text().strip().splitlines()
        header, data = rows[0], rows[1:]
        assert header == "u,t,x,y,z,H_ext,K,cmc_residual"
        for row in data:
            vals = [float(tok) for tok in row.split(",")]
            rewritten = ",".join(f"{v:.16e}" for v in vals)
            assert rewritten == row

    def test_reruns_byte_identical(self, tmp_path):
        out1 = tmp_path / "r1"
        out2 = tmp_path / "r2"
        out1.mkdir(), out2.mkdir()
        assert run(tmp_path, "export", NIL_MINIMAL, out=out1) == 0
        assert run(tmp_path, "export", NIL_MINIMAL, out=out2) == 0
        for name in ("nilcat.obj", "nilcat.csv", "nilcat.export.json"):
            assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


class TestDeform:
    def test_three_frame_sweep(self, tmp_path):
        cfg = {
            "space": {"kappa": 0.0, "tau": 0.0},
            "seed": {"family": "explicit", "m": 1.0, "a": 0.0, "u_range": [-1.6, 1.6],
                      "U": "sqrt(u*u + 1)", "dU": "u / sqrt(u*u + 1)"},
            "sweep": {"parameter": "a", "values": [0.0, 0.5, 0.9]},
            "grid": {"nu": 9, "nt": 7, "t_range": [-2.0, 2.0]},
            "output": {"basename": "cat2heli", "formats": ["obj", "json"]},
        }
        assert run(tmp_path, "deform", cfg) == 0
        report = json.loads((tmp_path / "cat2heli.deform.json").read_text())
        assert len(report["frames"]) == 3
        assert report["max_isometry_deviation"] < 1e-6
        for value in (0.0, 0.5, 0.9):
            assert (tmp_path / f"cat2heli_a={value:g}.obj").exists()

    def test_heisenberg_catenoid_unwinding(self, tmp_path):
        # the helicoidal catenoid deformed into a rotation surface
        cfg = {
            "space": {"kappa": 0.0, "tau": 0.5},
            "seed": {"family": "explicit", "m": 1.0, "a": 0.5, "u_range": [-1.8, 1.8],
                      "U": "(u*u + 2)/2", "dU": "u"},
            "sweep": {"parameter": "a", "values": [0.5, 0.25, 0.125, 0.0]},
            "grid": {"nu": 9, "nt": 7, "t_range": [-2.0, 2.0]},
            "output": {"basename": "unwind", "formats": ["obj", "json"]},
        }
        assert run(tmp_path, "deform", cfg) == 0
        report = json.loads((tmp_path / "unwind.deform.json").read_text())
        assert len(report["frames"]) == 4 and not report["frame_errors"]
        assert report["max_isometry_deviation"] < 1e-6

    def test_family_seed_sweep_fixes_profile(self, tmp_path):
        # with a family seed the sweep must vary only the chart pitch: the
        # frames share one metric profile and stay mutually isometric
        cfg = {
            "space": {"kappa": 0.0, "tau": 0.5},
            "seed": {"family": "minimal-case", "m": 1.0, "a": 0.5, "c": 1.0,
                      "u_range": [-1.8, 1.8]},
            "sweep": {"parameter": "a", "values": [0.5, 0.25, 0.0]},
            "grid": {"nu": 9, "nt": 7, "t_range": [-2.0, 2.0]},
            "output": {"basename": "famsweep", "formats": ["json"]},
        }
        assert run(tmp_path, "deform", cfg) == 0
        report = json.loads((tmp_path / "famsweep.deform.json").read_text())
        assert not report["frame_errors"]
        assert report["max_isometry_deviation"] < 1e-6

    def test_single_value_sweep(self, tmp_path):
        cfg = {
            "space": {"kappa": 0.0, "tau": 0.5},
            "seed": {"family": "minimal-case", "m": 1.0, "a": 0.5, "c": 1.0,
                      "u_range": [-1.5, 1.5]},
            "sweep": {"values": [0.5]},
            "grid": {"nu": 6, "nt": 5, "t_range": [-1.0, 1.0]},
            "output": {"basename": "single", "formats": ["json"]},
        }
        assert run(tmp_path, "deform", cfg) == 0
        report = json.loads((tmp_path / "single.deform.json").read_text())
        assert report["isometry_deviation"] == [[0.0]]


class TestConfigValidation:
    def test_zero_m_rejected(self, tmp_path):
        cfg = dict(NIL_MINIMAL)
        cfg = json.loads(json.dumps(cfg))
        cfg["seed"]["m"] = 0.0
        assert run(tmp_path, "verify", cfg) == 2

    def test_bad_format_rejected(self, tmp_path):
        cfg = json.loads(json.dumps(NIL_MINIMAL))
        cfg["output"]["formats"] = ["obj", "stl"]
        assert run(tmp_path, "verify", cfg) == 2

    def test_empty_u_range_rejected(self, tmp_path):
        cfg = json.loads(json.dumps(NIL_MINIMAL))
        cfg["seed"]["u_range"] = [2.0, 2.0]
        assert run(tmp_path, "verify", cfg) == 2

    def test_mode_mismatch_rejected(self, tmp_path):
        cfg = json.loads(json.dumps(NIL_MINIMAL))
        cfg["mode"] = "export"
        assert run(tmp_path, "verify", cfg) == 2

    def test_missing_config_file(self, tmp_path, capsys):
        assert main(["verify", "--config", str(tmp_path / "absent.json")]) == 2

    def test_override_changes_grid(self, tmp_path, capsys):
        assert run(tmp_path, "classify", NIL_MINIMAL, overrides=["space.kappa=1.0"]) == 0
        assert json.loads(capsys.readouterr().out)["class"] == "Sphere"


class TestChartAndCmcModes:
    def test_explicit_chart_profile(self, tmp_path):
        cfg = {
            "space": {"kappa": 0.0, "tau": 0.0},
            "seed": {"family": "explicit", "m": 1.0, "a": 0.0,
                      "u_range": [-2.0, 2.0], "U": "sqrt(u*u + 1)",
                      "dU": "u / sqrt(u*u + 1)"},
            "grid": {"nu": 11, "nt": 5, "t_range": [-1.0, 1.0]},
            "output": {"basename": "cat", "formats": ["csv", "json"]},
        }
        assert run(tmp_path, "chart", cfg) == 0
        rows = (tmp_path / "cat.profile.csv").read_text().strip().splitlines()
        for row in rows[1:]:
            u, xi1, xi2, th0, U = map(float, row.split(","))
            assert abs(xi1 - math.sqrt(u * u + 1)) < 1e-10
            assert abs(xi2 - math.asinh(u)) < 1e-8
            assert th0 == 0.0

    def test_cmc_mode_reports_case(self, tmp_path, capsys):
        cfg = {
            "space": {"kappa": -4.0, "tau": 0.0},
            "seed": {"family": "cmc-case", "m": 1.0, "a": 0.5, "H": 1.0,
                      "c": 1.0, "u_range": [-2.0, 2.0]},
            "grid": {"nu": 9, "nt": 5, "t_range": [-1.0, 1.0]},
            "output": {"basename": "hyp", "formats": ["json"]},
        }
        assert run(tmp_path, "cmc", cfg) == 0
        report = json.loads((tmp_path / "hyp.cmc.json").read_text())
        assert report["seed"]["case"] == "HyperbolicCosh"


class TestShippedConfigs:
    CONFIG_DIR = __file__.rsplit("/", 2)[0] + "/configs"

    def test_all_shipped_configs_verify_or_deform(self, tmp_path):
        import pathlib

        for path in sorted(pathlib.Path(self.CONFIG_DIR).glob("*.json")):
            cfg = json.loads(path.read_text())
            cfg["grid"] = {"nu": 7, "nt": 5, "t_range": [-1.0, 1.0]}  # keep it quick
            command = "deform" if cfg.get("sweep") else "verify"
            assert run(tmp_path, command, cfg) == 0, path.name
