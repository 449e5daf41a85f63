"""Command-line interface: artifacts, exit codes, determinism."""

import csv
import json
import shutil

import numpy as np
import pytest

import espm
from espm.cli import main

from conftest import make_dataset


@pytest.fixture(scope="module")
def config_path():
    return str(espm.data_path("default_config.json"))


@pytest.fixture(scope="module")
def fast_config(tmp_path_factory, config_path):
    """Config with a light mesh/budget so CLI tests stay quick."""
    root = tmp_path_factory.mktemp("cfg")
    cfg = json.loads(open(config_path).read())
    cfg["mesh"] = {"n_r_p": 8, "n_r_n": 8, "n_x_p": 4, "n_x_s": 4, "n_x_n": 4}
    cfg["simulation"]["dt_s"] = 4.0
    cfg["identification"]["pso"] = {"swarm_size": 6, "iterations": 8,
                                    "inertia": 0.729, "cognitive": 1.494,
                                    "social": 1.494, "seed": 0}
    path = root / "config.json"
    for name in ("ocp_anode.csv", "ocp_cathode.csv"):
        shutil.copy(espm.data_path(name), root / name)
    path.write_text(json.dumps(cfg))
    return str(path)


@pytest.fixture(scope="module")
def fresh_dataset_csv(tmp_path_factory, fast_config):
    params = espm.load_parameters(fast_config)
    mesh = espm.mesh_from_dict(json.loads(open(fast_config).read()))
    ds = make_dataset(params, mesh, 12.4 / 3.0, sample_dt=60.0,
                      truth_overrides=dict(k_f=0.0, i0_pl=0.0))
    path = tmp_path_factory.mktemp("data") / "fresh.csv"
    ds.to_csv(path)
    return str(path)


class TestSimulate:
    def test_writes_artifacts_and_verifies(self, fast_config, tmp_path):
        out = tmp_path / "sim"
        rc = main(["simulate", "--config", fast_config, "--c-rate", "0.333",
                   "--cutoff", "3.0", "--out", str(out), "--verify"])
        assert rc == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["termination"] == "voltage_cutoff"
        # full stoichiometric sweep lands near nominal capacity
        assert abs(summary["end_capacity_Ah"] - 12.4) / 12.4 < 0.05
        with open(out / "trace.csv") as fh:
            header = next(csv.reader(fh))
        assert header == ["t_s", "V_cell_V", "soc_n", "soc_p", "capacity_Ah",
                          "R_film_ohm", "j_sei_A_m3", "j_pl_A_m3"]

    def test_zero_current_flags_max_time(self, fast_config, tmp_path):
        out = tmp_path / "zero"
        rc = main(["simulate", "--config", fast_config, "--current", "0",
                   "--out", str(out)])
        assert rc == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["termination"] == "max_time"

    def test_cutoff_above_ocv_zero_capacity(self, fast_config, tmp_path):
        out = tmp_path / "deg"
        rc = main(["simulate", "--config", fast_config, "--c-rate", "0.333",
                   "--cutoff", "4.5", "--out", str(out)])
        assert rc == 0
        summary = json.loads((out / "summary.json").read_text())
        assert summary["end_capacity_Ah"] == 0.0

    def test_config_error_exit_code(self, tmp_path):
        rc = main(["simulate", "--config", "/does/not/exist.json",
                   "--out", str(tmp_path / "x")])
        assert rc == 2

    def test_invalid_parameter_exit_code(self, fast_config, tmp_path):
        cfg = json.loads(open(fast_config).read())
        cfg["transport"]["t_plus"] = 1.2
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps(cfg))
        shutil.copy(espm.data_path("ocp_anode.csv"), tmp_path / "ocp_anode.csv")
        shutil.copy(espm.data_path("ocp_cathode.csv"),
                    tmp_path / "ocp_cathode.csv")
        rc = main(["simulate", "--config", str(bad), "--out",
                   str(tmp_path / "x")])
        assert rc == 2


class TestIdentify:
    def test_fresh_report_and_determinism(self, fast_config,
                                          fresh_dataset_csv, tmp_path):
        outs = []
        for tag in ("a", "b"):
            out = tmp_path / tag
            rc = main(["identify", "--config", fast_config,
                       "--data", fresh_dataset_csv, "--phase", "fresh",
                       "--seed", "1", "--out", str(out), "--verify"])
            assert rc == 0
            outs.append((out / "identify_fresh.json").read_bytes())
        assert outs[0] == outs[1]

    def test_jobs_do_not_change_report(self, fast_config, fresh_dataset_csv,
                                       tmp_path):
        blobs = []
        for jobs in ("1", "2"):
            out = tmp_path / f"j{jobs}"
            rc = main(["identify", "--config", fast_config,
                       "--data", fresh_dataset_csv, "--phase", "fresh",
                       "--seed", "1", "--jobs", jobs, "--out", str(out)])
            assert rc == 0
            blobs.append((out / "identify_fresh.json").read_bytes())
        assert blobs[0] == blobs[1]

    def test_report_contents(self, fast_config, fresh_dataset_csv, tmp_path):
        out = tmp_path / "rep"
        rc = main(["identify", "--config", fast_config,
                   "--data", fresh_dataset_csv, "--phase", "fresh",
                   "--seed", "1", "--out", str(out)])
        assert rc == 0
        rep = json.loads((out / "identify_fresh.json").read_text())
        assert rep["phase"] == "fresh"
        assert "resolved_config" in rep
        assert "reference_values" in rep
        assert len(rep["cost_history"]) == rep["pso"]["iterations"]

    def test_dataset_error_exit_code(self, fast_config, tmp_path):
        rc = main(["identify", "--config", fast_config,
                   "--data", "/none.csv", "--phase", "fresh",
                   "--out", str(tmp_path / "x")])
        assert rc == 4

    def test_aged3300_without_plating_is_config_like_failure(
            self, fast_config, fresh_dataset_csv, tmp_path):
        cfg = json.loads(open(fast_config).read())
        cfg["kinetics"]["i0_pl_A_m2"] = 0.0
        bad = tmp_path / "noplating.json"
        bad.write_text(json.dumps(cfg))
        shutil.copy(espm.data_path("ocp_anode.csv"), tmp_path / "ocp_anode.csv")
        shutil.copy(espm.data_path("ocp_cathode.csv"),
                    tmp_path / "ocp_cathode.csv")
        rc = main(["identify", "--config", str(bad),
                   "--data", fresh_dataset_csv, "--phase", "aged3300",
                   "--out", str(tmp_path / "x")])
        assert rc == 5


class TestSweep:
    def test_envelope_and_monotonicity(self, fast_config, tmp_path):
        out = tmp_path / "sweep"
        rc = main(["sweep", "--config", fast_config, "--param", "betaprime_n",
                   "--min", "0.741e-9", "--max", "9.59e-9", "--count", "4",
                   "--cycles", "3300", "--out", str(out), "--verify"])
        assert rc == 0
        with open(out / "envelope.csv") as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 4
        caps = [float(r["capacity_Ah"]) for r in rows]
        films = [float(r["final_R_film_ohm"]) for r in rows]
        assert all(b < a for a, b in zip(caps, caps[1:]))
        assert all(b > a for a, b in zip(films, films[1:]))
        summary = json.loads((out / "sweep_summary.json").read_text())
        assert summary["monotonicity"]["capacity_strictly_decreasing"] is True
        assert summary["monotonicity"]["r_film_strictly_increasing"] is True

    def test_single_point_consistency_with_simulate(self, fast_config,
                                                    tmp_path):
        # a 2-point sweep over a degenerate range reproduces one summary
        out = tmp_path / "one"
        rc = main(["sweep", "--config", fast_config, "--param", "betaprime_n",
                   "--min", "1e-9", "--max", "1.0000001e-9", "--count", "2",
                   "--cycles", "0", "--film-ratio", "0.0",
                   "--out", str(out)])
        assert rc == 0
        with open(out / "envelope.csv") as fh:
            rows = list(csv.DictReader(fh))
        sim_out = tmp_path / "ref"
        rc = main(["simulate", "--config", fast_config, "--c-rate",
                   str(1.0 / 3.0), "--out", str(sim_out)])
        assert rc == 0
        ref = json.loads((sim_out / "summary.json").read_text())
        assert float(rows[0]["capacity_Ah"]) == pytest.approx(
            ref["end_capacity_Ah"], rel=1e-6)

    def test_jobs_parity(self, fast_config, tmp_path):
        blobs = []
        for jobs in ("1", "2"):
            out = tmp_path / f"sw{jobs}"
            rc = main(["sweep", "--config", fast_config,
                       "--param", "betaprime_n", "--min", "1e-9",
                       "--max", "8e-9", "--count", "3", "--cycles", "3300",
                       "--jobs", jobs, "--out", str(out)])
            assert rc == 0
            blobs.append((out / "envelope.csv").read_bytes())
        assert blobs[0] == blobs[1]

    def test_bad_range_exit_code(self, fast_config, tmp_path):
        rc = main(["sweep", "--config", fast_config, "--param", "betaprime_n",
                   "--min", "2e-9", "--max", "1e-9", "--count", "3",
                   "--out", str(tmp_path / "x")])
        assert rc == 2
