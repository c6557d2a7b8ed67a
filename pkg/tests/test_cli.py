import json

import numpy as np
import pytest
from click.testing import CliRunner

from polmodes.cli import main

MATERIAL = {
    "layers": [
        {"z_min": -20.0, "z_max": 0.0,
         "medium": {"omega_TO": 1.0, "omega_LO": 1.2, "rho": 1.0}},
        {"z_min": 0.0, "z_max": 20.0, "medium": None},
    ],
    "box": {"Lz": 40.0, "A": 1.0},
}


@pytest.fixture
def runner():
    return CliRunner()


def write_cfg(tmp_path, payload, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


class TestDispersionCommand:
    def test_surface_sweep_monotone(self, runner, tmp_path):
        cfg = write_cfg(tmp_path, {
            "material": MATERIAL,
            "sweep": {"k_min": 0.1, "k_max": 10.0, "num": 100},
        })
        result = runner.invoke(main, ["dispersion", "--config", cfg, "--out", str(tmp_path)])
        assert result.exit_code == 0, result.output
        lines = (tmp_path / "dispersion.csv").read_text().splitlines()
        assert lines[0] == "class,k_par,k_z,omega"
        surf = [line.split(",") for line in lines[1:] if line.startswith("S,")]
        ks = np.array([float(r[1]) for r in surf])
        ws = np.array([float(r[3]) for r in surf])
        assert np.all(ks >= 1.0)  # existence edge c k_par >= omega_TO
        assert np.all(np.diff(ws) > 0)  # monotone surface branch
        lower = np.array([float(r[3]) for r in lines[1:] if r.startswith("TEl,")]
                         if False else
                         [float(line.split(",")[3]) for line in lines[1:] if line.startswith("TEl,")])
        assert np.all(lower < 1.0)

    def test_deterministic_output(self, runner, tmp_path):
        cfg = write_cfg(tmp_path, {
            "material": MATERIAL,
            "sweep": {"k_min": 0.1, "k_max": 5.0, "num": 40},
        })
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            res = runner.invoke(main, ["dispersion", "--config", cfg, "--out", str(out)])
            assert res.exit_code == 0
        assert (out1 / "dispersion.csv").read_bytes() == (out2 / "dispersion.csv").read_bytes()

    def test_cm1_units_roundtrip(self, runner, tmp_path):
        scaled = json.loads(json.dumps(MATERIAL))
        scaled["layers"][0]["medium"] = {"omega_TO": 797.0, "omega_LO": 956.4, "rho": 1.0}
        cfg = write_cfg(tmp_path, {
            "material": scaled,
            "sweep": {"k_min": 810.0, "k_max": 2000.0, "num": 20},
        })
        res = runner.invoke(main, ["dispersion", "--config", cfg, "--out", str(tmp_path),
                                   "--units", "cm-1"])
        assert res.exit_code == 0, res.output
        lines = (tmp_path / "dispersion.csv").read_text().splitlines()[1:]
        surf_k = [float(line.split(",")[1]) for line in lines if line.startswith("S,")]
        assert surf_k and min(surf_k) >= 797.0  # edge in cm-1


class TestErrorHandling:
    def test_malformed_json_exit_2(self, runner, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"broken": ')
        res = runner.invoke(main, ["dispersion", "--config", str(path), "--out", str(tmp_path)])
        assert res.exit_code == 2

    def test_missing_key_pointer(self, runner, tmp_path):
        cfg = write_cfg(tmp_path, {"material": {"layers": [], "box": {"Lz": 1.0}}})
        res = runner.invoke(main, ["dispersion", "--config", cfg, "--out", str(tmp_path)])
        assert res.exit_code == 2
        assert "/material/box" in res.output

    def test_invalid_mode_class(self, runner, tmp_path):
        cfg = write_cfg(tmp_path, {"material": MATERIAL,
                                   "mode": {"class": "XX", "k_par": [1.0, 0.0]}})
        res = runner.invoke(main, ["mode", "--config", cfg, "--out", str(tmp_path)])
        assert res.exit_code == 2
        assert "/mode/class" in res.output

    def test_numeric_error_exit_3(self, runner, tmp_path):
        # surface mode below the light-line edge is a numeric-domain error
        cfg = write_cfg(tmp_path, {"material": MATERIAL,
                                   "mode": {"class": "S", "k_par": [0.5, 0.0]}})
        res = runner.invoke(main, ["mode", "--config", cfg, "--out", str(tmp_path)])
        assert res.exit_code == 3


class TestModeCommand:
    def test_surface_profile_and_sidecar(self, runner, tmp_path):
        cfg = write_cfg(tmp_path, {
            "material": MATERIAL,
            "mode": {"class": "S", "k_par": [3.7302814907189354, 0.0]},
            "samples": {"z_num": 101},
        })
        res = runner.invoke(main, ["mode", "--config", cfg, "--out", str(tmp_path)])
        assert res.exit_code == 0, res.output
        sidecar = json.loads((tmp_path / "mode_profile.json").read_text())
        assert sidecar["class"] == "S"
        assert sidecar["omega"] == pytest.approx(1.1, rel=1e-10)
        assert sidecar["N"] == pytest.approx(0.4084845149392755, rel=1e-8)
        lines = (tmp_path / "mode_profile.csv").read_text().splitlines()
        assert len(lines) == 102
        header = lines[0].split(",")
        assert header[0] == "z"
        for field in ("theta", "alpha", "beta", "gamma", "eta"):
            assert f"{field}_x_re" in header and f"{field}_z_im" in header


class TestSolveCommand:
    def test_windowed_solve_with_profile(self, runner, tmp_path):
        cfg = write_cfg(tmp_path, {
            "material": MATERIAL,
            "grid": {"n": 128},
            "k_par": 2.0,
            "polarization": "TM",
            "window": [1.02, 1.18],
            "profiles": 1,
            "strict_resolution": False,
        })
        res = runner.invoke(main, ["solve", "--config", cfg, "--out", str(tmp_path)])
        assert res.exit_code == 0, res.output
        lines = (tmp_path / "eigenfrequencies.csv").read_text().splitlines()
        ws = np.array([float(line.split(",")[1]) for line in lines[1:]])
        assert ws.size >= 1
        # the surface mode sits isolated in the reststrahlen window
        from polmodes import surface_dispersion_omega, default_medium

        target = surface_dispersion_omega(default_medium(), 2.0)
        assert np.min(np.abs(ws - target)) / target < 5e-3
        assert (tmp_path / "mode_0000.csv").exists()


class TestScatterCommand:
    def test_tuple_with_momentum_flag(self, runner, tmp_path):
        k = 1.2585
        phi = np.zeros((3, 3, 3))
        for j in range(3):
            phi[j, j, j] = 1.0
        cfg = write_cfg(tmp_path, {
            "material": MATERIAL,
            "phi": {"order": 3, "components": phi.tolist()},
            "tuples": [
                [{"class": "S", "k_par": [k, 0.0]},
                 {"class": "S", "k_par": [-k, 0.0]},
                 {"class": "TMv", "k_par": [0.0, 0.0], "k_z": 0.7}],
                [{"class": "S", "k_par": [k, 0.0]},
                 {"class": "S", "k_par": [k, 0.0]},
                 {"class": "TMv", "k_par": [0.0, 0.0], "k_z": 0.7}],
            ],
        })
        res = runner.invoke(main, ["scatter", "--config", cfg, "--out", str(tmp_path)])
        assert res.exit_code == 0, res.output
        lines = (tmp_path / "scattering.csv").read_text().splitlines()
        assert lines[0] == "modes,Re_Xi,Im_Xi,momentum_ok"
        ok_row = lines[1].split(",")
        bad_row = lines[2].split(",")
        assert ok_row[3] == "1" and bad_row[3] == "0"
        assert float(bad_row[1]) == 0.0 and float(bad_row[2]) == 0.0
        assert abs(complex(float(ok_row[1]), float(ok_row[2]))) > 0


class TestLossyCommand:
    def test_epsilon_sweep_and_driven(self, runner, tmp_path):
        cfg = write_cfg(tmp_path, {
            "material": MATERIAL,
            "bath": {"type": "flat", "upsilon": 0.05, "zeta_min": 0.5, "zeta_max": 3.0},
            "omega": {"min": 0.2, "max": 2.9, "num": 30},
            "driven": {"omega": 1.1, "k_par": 0.0, "sheets": [[5.0, 1.0, 0.0]], "z_num": 101},
        })
        res = runner.invoke(main, ["lossy", "--config", cfg, "--out", str(tmp_path)])
        assert res.exit_code == 0, res.output
        lines = (tmp_path / "lossy_epsilon.csv").read_text().splitlines()
        assert lines[0] == "omega,Re_eps,Im_eps"
        ims = [float(line.split(",")[2]) for line in lines[1:]]
        assert min(ims) >= 0.0  # passivity in the emitted table
        assert (tmp_path / "driven_field.csv").exists()


class TestVerifyCommand:
    def test_verify_passes(self, runner):
        res = runner.invoke(main, ["verify"])
        assert res.exit_code == 0, res.output
        assert "checks passed" in res.output
        assert "FAIL" not in res.output
