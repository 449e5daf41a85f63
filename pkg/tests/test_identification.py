"""Cost function, dataset handling and the identification protocol."""

import numpy as np
import pytest

import espm
from espm import (DatasetError, ExperimentalDataset, ParameterSpec, cost,
                  identify_aged, identify_fresh,
                  soc_exp_from_coulomb_counting, substituted,
                  weighted_rmse_cost)
from espm.identification import (FRESH_NAMES, IdentificationProblem,
                                 apply_phase_values)
from espm.pso import PsoConfig

from conftest import make_dataset

FRESH_SPECS = [ParameterSpec(*s) for s in [
    ("A_cell", 0.28, 0.83, 0.55), ("R_l", 0.02, 0.07, 0.045),
    ("v_n", 0.45, 0.65, 0.5), ("R_p", 0.6e-6, 1.9e-6, 1.25e-6),
    ("R_n", 5e-6, 15e-6, 10e-6), ("D_s_ref_p", 1e-14, 3.4e-13, 2.25e-13),
    ("D_s_ref_n", 1e-14, 3.4e-13, 2.25e-13),
    ("theta_p_100", 0.14, 0.41, 0.28), ("theta_n_100", 0.43, 1.0, 0.85)]]

AGED_SPECS = [ParameterSpec(*s) for s in [
    ("film_ratio", 0.0015, 0.15, 0.076), ("theta_p_0", 0.7, 1.0, 0.85),
    ("theta_n_100", 0.7, 1.0, 0.85)]]

TRUTH_FRESH = [0.57, 0.04, 0.54, 1.0e-6, 5.16e-6, 2.0e-13, 1.0e-13, 0.30, 0.99]


class TestSocExp:
    def _dataset(self, current=4.0):
        t = np.linspace(0.0, 3600.0 * 12.4 / current, 20)
        return ExperimentalDataset(t_s=t, capacity_Ah=t * current / 3600.0,
                                   voltage_V=np.linspace(4.0, 3.0, 20),
                                   current_A=current)

    def test_starts_at_one(self):
        soc = soc_exp_from_coulomb_counting(self._dataset(), 12.4)
        assert soc[0] == 1.0

    def test_full_discharge_reaches_zero(self):
        soc = soc_exp_from_coulomb_counting(self._dataset(), 12.4)
        assert soc[-1] == pytest.approx(0.0, abs=1e-12)

    def test_half_capacity_is_half(self):
        ds = self._dataset()
        soc = soc_exp_from_coulomb_counting(ds, 2.0 * ds.capacity_Ah[-1])
        assert soc[-1] == pytest.approx(0.5)


class TestWeightedRmse:
    def test_identical_channels_cost_zero(self):
        v = np.linspace(4, 3, 50)
        s = np.linspace(1, 0, 50)
        assert weighted_rmse_cost(v, v, s, s, s, s) == 0.0

    def test_constant_voltage_offset(self):
        v = np.linspace(4, 3, 50)
        s = np.linspace(1, 0, 50)
        delta = 0.0123
        j = weighted_rmse_cost(v + delta, v, s, s, s, s, w1=2.0)
        assert j == pytest.approx(2.0 * delta, rel=1e-12)

    def test_weight_channel_selection(self):
        v = np.linspace(4, 3, 50)
        s = np.linspace(1, 0, 50)
        j = weighted_rmse_cost(v + 1.0, v, s + 0.1, s, s + 0.2, s,
                               w1=0.0, w2=1.0, w3=1.0)
        assert j == pytest.approx(0.3, rel=1e-12)


class TestDataset:
    def test_reorder_invariance(self, params, mesh, current_c3):
        t = np.linspace(0.0, 900.0, 31)
        v = np.linspace(4.0, 3.9, 31)
        perm = np.random.default_rng(0).permutation(31)
        a = ExperimentalDataset(t_s=t, capacity_Ah=t * current_c3 / 3600.0,
                                voltage_V=v, current_A=current_c3)
        b = ExperimentalDataset(t_s=t[perm],
                                capacity_Ah=(t * current_c3 / 3600.0)[perm],
                                voltage_V=v[perm], current_A=current_c3)
        assert np.array_equal(a.t_s, b.t_s)
        assert np.array_equal(a.voltage_V, b.voltage_V)

    def test_minimum_samples(self, current_c3):
        t = np.linspace(0, 100, 5)
        with pytest.raises(DatasetError, match="10"):
            ExperimentalDataset(t_s=t, capacity_Ah=t, voltage_V=t,
                                current_A=current_c3)

    def test_csv_round_trip_capacity_axis(self, tmp_path, current_c3):
        path = tmp_path / "d.csv"
        t = np.linspace(0.0, 1000.0, 21)
        ds = ExperimentalDataset(t_s=t, capacity_Ah=t * current_c3 / 3600.0,
                                 voltage_V=np.linspace(4, 3.8, 21),
                                 current_A=current_c3)
        ds.to_csv(path)
        again = ExperimentalDataset.from_csv(path, current_A=current_c3)
        assert np.allclose(again.t_s, ds.t_s)
        assert np.array_equal(again.voltage_V, ds.voltage_V)

    def test_time_axis_header(self, tmp_path):
        path = tmp_path / "t.csv"
        rows = "\n".join(f"{t},{4.0 - t / 1e4}" for t in range(0, 1100, 100))
        path.write_text("t_s,voltage_V\n" + rows + "\n")
        ds = ExperimentalDataset.from_csv(path, current_A=2.0)
        assert ds.capacity_Ah[-1] == pytest.approx(1000.0 * 2.0 / 3600.0)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b\n1,2\n")
        with pytest.raises(DatasetError, match="header"):
            ExperimentalDataset.from_csv(path, current_A=2.0)

    def test_missing_file(self):
        with pytest.raises(DatasetError, match="not found"):
            ExperimentalDataset.from_csv("/nope.csv", current_A=2.0)


@pytest.fixture(scope="module")
def fresh_problem(params, mesh, current_c3):
    ds = make_dataset(params, mesh, current_c3,
                      truth_overrides=dict(k_f=0.0, i0_pl=0.0))
    return IdentificationProblem(phase="fresh", specs=FRESH_SPECS,
                                 dataset=ds, base_params=params,
                                 mesh=mesh, capacity_base=12.4)


class TestCost:
    def test_truth_cost_near_noise_floor(self, fresh_problem):
        j = cost(TRUTH_FRESH, fresh_problem)
        assert j < 0.004

    def test_guess_cost_is_penalized_or_worse(self, fresh_problem):
        j_truth = cost(TRUTH_FRESH, fresh_problem)
        j_guess = cost(fresh_problem.guess(), fresh_problem)
        assert j_guess > j_truth

    def test_infeasible_candidate_gets_finite_penalty(self, fresh_problem):
        # tiny window saturates long before the horizon
        bad = list(TRUTH_FRESH)
        bad[0] = 0.28      # A_cell
        bad[8] = 0.43      # theta_n_100
        j = cost(bad, fresh_problem)
        assert 1e3 <= j <= 2e3

    def test_weights_zero_voltage_channel(self, params, mesh, current_c3,
                                          fresh_problem):
        prob = IdentificationProblem(
            phase="fresh", specs=FRESH_SPECS, dataset=fresh_problem.dataset,
            base_params=params, mesh=mesh, weights=(0.0, 1.0, 1.0),
            capacity_base=12.4)
        # voltage noise no longer contributes: cost drops below the
        # full-weight value at the same point
        assert cost(TRUTH_FRESH, prob) < cost(TRUTH_FRESH, fresh_problem)

    def test_phase_substitution_forces_side_reactions_off(self, params,
                                                          fresh_problem):
        p, film = apply_phase_values(fresh_problem, TRUTH_FRESH)
        assert p.k_f == 0.0 and p.i0_pl == 0.0 and film == 0.0
        assert p.A_cell == 0.57 and p.theta_n_100 == 0.99

    def test_aged_substitution_builds_film(self, params, mesh, current_c3):
        ds = make_dataset(params, mesh, current_c3,
                          truth_overrides=dict(k_f=0.0, i0_pl=0.0))
        prob = IdentificationProblem(phase="aged1000", specs=AGED_SPECS,
                                     dataset=ds, base_params=params, mesh=mesh)
        p, film = apply_phase_values(prob, [0.085, 0.92, 0.88])
        assert film == pytest.approx(0.085 * params.kappa_SEI)
        assert p.i0_pl == 0.0
        assert p.theta_p_0 == 0.92

    def test_guess_projection_into_bounds(self):
        spec = ParameterSpec("film_ratio", 0.003, 0.3, 2.0)
        assert spec.guess == 0.3


class TestProtocolSmoke:
    """Small-budget end-to-end identification runs (the acceptance suite
    runs the full budget)."""

    def test_fresh_phase_improves_and_is_deterministic(self, params, mesh,
                                                       current_c3):
        ds = make_dataset(params, mesh, current_c3,
                          truth_overrides=dict(k_f=0.0, i0_pl=0.0))
        cfg = PsoConfig(swarm_size=8, iterations=12, seed=7, v_max=0.2)
        r1 = identify_fresh(ds, params, mesh, FRESH_SPECS, cfg, dt_s=4.0)
        r2 = identify_fresh(ds, params, mesh, FRESH_SPECS, cfg, dt_s=4.0,
                            jobs=2)
        assert r1.final_cost < 1.0  # out of the penalty regime
        assert r1.final_cost == r2.final_cost
        assert r1.values == r2.values
        assert np.all(np.diff(r1.cost_history) <= 0)

    def test_aged_phase_runs_and_recovers_trajectory(self, params, mesh,
                                                     current_c3):
        truth_ratio = 0.085
        ds = make_dataset(params, mesh, current_c3, seed=11,
                          film_ratio=truth_ratio,
                          truth_overrides=dict(k_f=0.0, i0_pl=0.0,
                                               theta_p_0=0.92,
                                               theta_n_100=0.88))
        base = substituted(params, k_f=0.0, i0_pl=0.0)
        cfg = PsoConfig(swarm_size=8, iterations=20, seed=3, v_max=0.2)
        res = identify_aged(ds, base, "1000", mesh, AGED_SPECS, cfg, dt_s=4.0)
        assert res.final_cost < 0.05
        # the film ratio is strongly identifiable from the ohmic drop
        assert res.values["film_ratio"] == pytest.approx(truth_ratio, rel=0.25)

    def test_aged3300_requires_plating_current(self, params, mesh, current_c3):
        ds = make_dataset(params, mesh, current_c3,
                          truth_overrides=dict(k_f=0.0, i0_pl=0.0))
        base = substituted(params, i0_pl=0.0)
        with pytest.raises(espm.OptimizationError, match="i0_pl"):
            identify_aged(ds, base, "3300", mesh, AGED_SPECS,
                          PsoConfig(swarm_size=5, iterations=1))

    def test_report_shape(self, params, mesh, current_c3, tmp_path):
        ds = make_dataset(params, mesh, current_c3,
                          truth_overrides=dict(k_f=0.0, i0_pl=0.0))
        cfg = PsoConfig(swarm_size=5, iterations=3, seed=0)
        res = identify_fresh(ds, params, mesh, FRESH_SPECS, cfg, dt_s=8.0)
        rep = res.report(reference={"A_cell": 0.57})
        assert rep["phase"] == "fresh"
        assert set(p["name"] for p in rep["parameters"]) == set(FRESH_NAMES)
        assert rep["reference_values"]["A_cell"] == 0.57
        path = tmp_path / "rep.json"
        espm.write_report(rep, path)
        assert path.read_text().endswith("\n")
