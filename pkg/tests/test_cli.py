import csv
import json

import numpy as np
import pytest

from quenchchern import __version__
from quenchchern.cli import EXIT_COMPUTE, EXIT_CONFIG, EXIT_IO, RunReport, main, run_experiment
from quenchchern.config import ConfigError, ExperimentConfig, SweepSpec, bundled_configs, load_config
from quenchchern.dynamics import tasp_grid
from quenchchern.io import read_pgm, read_tasp_csv, to_gray, write_pgm, write_tasp_csv
from quenchchern.model import ModelParams

FIGS = {"fig1", "fig2", "fig3b", "fig3c", "fig3d", "fig4a", "fig4b", "fig5", "fig6b", "fig6c", "fig8"}


def small_cfg(tmp_path, **kw):
    d = load_config("fig3c").to_dict()
    d.update(grid_n=61, out_dir=str(tmp_path / "out"), **kw)
    p = tmp_path / "cfg.json"
    p.write_text(json.dumps(d))
    return p


class TestConfig:
    def test_bundled(self):
        assert set(bundled_configs()) == FIGS
        for name in FIGS:
            cfg = load_config(name)
            assert cfg.name == name and cfg.description

    def test_round_trip(self):
        cfg = load_config("fig4a")
        again = ExperimentConfig.from_dict(json.loads(json.dumps(cfg.to_dict())))
        assert again.to_dict() == cfg.to_dict()
        assert again.sweep.axis == "g" and again.sweep.m_initial == 1.0

    def test_replace(self):
        cfg = load_config("fig1").replace(grid_n=81, threads=2)
        assert cfg.grid_n == 81 and cfg.threads == 2

    @pytest.mark.parametrize("patch", [
        {"grid_n": 21},
        {"outputs": ["nonsense"]},
        {"outputs": ["g_sweep"]},
        {"model": {"t0": -1.0}},
        {"numerics": {"switch_factor": 2.0}},
        {"bogus_field": 1},
    ])
    def test_invalid(self, patch):
        d = load_config("fig1").to_dict()
        d.update(patch)
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(d)

    def test_missing_model(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"name": "x"})

    def test_sweep_spec(self):
        with pytest.raises(ConfigError):
            SweepSpec("g", [])
        with pytest.raises(ConfigError):
            SweepSpec("m_z", [1.0])

    def test_unknown_name_and_bad_json(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config("no_such_config")
        p = tmp_path / "bad.json"
        p.write_text("{not json")
        with pytest.raises(ConfigError):
            load_config(str(p))


class TestIO:
    def test_csv_layout(self, tmp_path):
        g = tasp_grid(ModelParams(m_z=-1.0, g=1.0, t_int=0.5), 8)
        write_tasp_csv(g, tmp_path / "t.csv")
        with open(tmp_path / "t.csv") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["kx", "ky", "sx", "sy", "sz"]
        assert len(rows) == 65
        # kx outer, ky inner
        assert float(rows[1][0]) == float(rows[2][0]) and float(rows[1][1]) < float(rows[2][1])
        k, v = read_tasp_csv(tmp_path / "t.csv")
        assert np.allclose(v.reshape(8, 8, 3), g.data, atol=1e-8)
        assert np.allclose(k[:, 0].reshape(8, 8)[:, 0], g.ks)

    def test_gray_mapping(self):
        assert to_gray(np.array([-1.0, 0.0, 1.0, 5.0])).tolist() == [0, 128, 255, 255]

    def test_pgm_orientation(self, tmp_path):
        f = np.zeros((4, 3))
        f[0, 2] = 1.0  # smallest kx, largest ky -> top-left pixel
        write_pgm(f, tmp_path / "a.pgm")
        img = read_pgm(tmp_path / "a.pgm")
        assert img.shape == (3, 4)
        assert img[0, 0] == 255 and img[2, 0] == 128


class TestRun:
    def test_run_writes_outputs(self, tmp_path):
        rep = run_experiment(load_config(str(small_cfg(tmp_path))), tmp_path / "o")
        assert rep.process["label"] == "topo_to_topo"
        assert sorted((r["kind"], r["winding"]) for r in rep.rings) == [("BIS", 1), ("FSIS", 1), ("ISIS", -1)]
        for f in ("tasp.csv", "tasp_sx.pgm", "tasp_sy.pgm", "tasp_sz.pgm", "rings.json", "report.json"):
            assert (tmp_path / "o" / f).exists()
        back = RunReport.from_json((tmp_path / "o" / "report.json").read_text())
        assert back == rep
        assert back.version == __version__
        assert back.charges["per_ring_enclosed"]

    def test_main_run(self, tmp_path, capsys):
        assert main(["run", "--config", str(small_cfg(tmp_path)), "--out", str(tmp_path / "m")]) == 0
        assert "topo_to_topo" in capsys.readouterr().out

    def test_main_sweep(self, tmp_path):
        out = tmp_path / "s"
        rc = main(["sweep", "--config", "fig4a", "--out", str(out), "--values", "0.5,1"])
        assert rc == 0
        with open(out / "g_sweep.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert [float(r["g"]) for r in rows] == [0.5, 1.0]

    def test_version_and_list(self, capsys):
        assert main(["version"]) == 0
        assert capsys.readouterr().out.strip() == __version__
        assert main(["list-configs"]) == 0
        assert set(capsys.readouterr().out.split()) == FIGS

    def test_exit_codes(self, tmp_path):
        assert main(["run", "--config", "missing_cfg"]) == EXIT_CONFIG
        assert main(["sweep", "--config", "fig4a", "--values", ""]) == EXIT_CONFIG
        assert main(["sweep", "--config", "fig1", "--out", str(tmp_path)]) == EXIT_CONFIG
        blocker = tmp_path / "file"
        blocker.write_text("x")
        assert main(["run", "--config", str(small_cfg(tmp_path)), "--out", str(blocker / "sub")]) == EXIT_IO
        d = load_config("fig1").to_dict()
        d["model"].update(m_z=-2.0)  # BIS passes through a charge at the phase boundary
        d["grid_n"] = 41
        p = tmp_path / "gapless.json"
        p.write_text(json.dumps(d))
        assert main(["run", "--config", str(p), "--out", str(tmp_path / "g")]) == EXIT_COMPUTE
