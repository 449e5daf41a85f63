"""Config loading, validation and serialization round trips."""

import dataclasses
import json

import numpy as np
import pytest

import espm
from espm import (CellParameters, ConfigError, Mesh, OcpCurve, ParameterError,
                  initial_state, soc)
from espm.parameters import parameters_to_dict


def test_default_config_loads(params):
    assert params.v_n == 0.54
    assert params.A_cell == 0.57
    assert 0.0 < params.eps_p_0 < 1.0
    assert 0.0 < params.eps_n_0 < 1.0


def test_geometric_areas(params):
    assert params.a_n == pytest.approx(3.0 / params.R_n)
    assert params.a_p == pytest.approx(3.0 / params.R_p)


def test_t_plus_bound_violation(params, tmp_path):
    cfg = parameters_to_dict(params)
    cfg["transport"]["t_plus"] = 1.2
    with pytest.raises(ParameterError, match="t_plus"):
        espm.parameters_from_dict(cfg, base_dir=espm.data_path(""))


def test_missing_field_names_it(params, tmp_path):
    cfg = parameters_to_dict(params)
    del cfg["resistances"]["R_l_ohm"]
    with pytest.raises(ConfigError, match="R_l"):
        espm.parameters_from_dict(cfg, base_dir=espm.data_path(""))


@pytest.mark.parametrize("section,key,value,field", [
    ("kinetics", "alpha", 1.5, "alpha"),
    ("aging", "beta", -0.1, "beta"),
    ("composition", "v_n_filler", 0.6, "v_n"),
    ("stoichiometry", "theta_n_0", 0.995, "theta_n"),
    ("stoichiometry", "theta_p_100", 0.95, "theta_p"),
    ("geometry", "L_n_m", -1e-6, "L_n"),
])
def test_invariant_violations_name_the_field(params, section, key, value, field):
    cfg = parameters_to_dict(params)
    cfg[section][key] = value
    with pytest.raises(ParameterError, match=field):
        espm.parameters_from_dict(cfg, base_dir=espm.data_path(""))


def test_missing_config_file():
    with pytest.raises(ConfigError):
        espm.load_parameters("/nonexistent/config.json")


def test_invalid_json(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ConfigError):
        espm.load_parameters(bad)


def test_serialization_round_trip_bit_identical(params, tmp_path):
    path = tmp_path / "roundtrip.json"
    espm.save_parameters(params, path)
    again = espm.parameters_from_dict(json.loads(path.read_text()),
                                      base_dir=espm.data_path(""))
    for f in dataclasses.fields(CellParameters):
        if f.name in ("ocp_p", "ocp_n"):
            continue
        a = getattr(params, f.name)
        b = getattr(again, f.name)
        assert a == b, f.name


def test_mesh_validation():
    with pytest.raises(ParameterError, match="n_x_s"):
        Mesh(n_x_s=2)
    with pytest.raises(ParameterError):
        Mesh(n_r_p=0)


class TestOcpCurve:
    def test_monotone_table_required(self):
        with pytest.raises(ConfigError, match="increasing"):
            OcpCurve(theta=[0.1, 0.1, 0.3], voltage=[3.0, 2.0, 1.0])
        with pytest.raises(ConfigError, match="decreasing"):
            OcpCurve(theta=[0.1, 0.2, 0.3], voltage=[1.0, 2.0, 3.0])

    def test_range_check(self):
        with pytest.raises(ConfigError, match=r"\[0, 1\]"):
            OcpCurve(theta=[0.5, 1.5], voltage=[2.0, 1.0])

    def test_interpolation_hits_knots(self, params):
        curve = params.ocp_n
        for i in (0, len(curve.theta) // 2, -1):
            assert curve(curve.theta[i]) == pytest.approx(curve.voltage[i], abs=1e-12)

    def test_clamped_outside_table(self, params):
        curve = params.ocp_n
        assert curve(0.0) == pytest.approx(curve.voltage[0])
        assert curve(1.0) == pytest.approx(curve.voltage[-1])

    def test_interpolant_monotone_between_knots(self, params):
        # shape preservation: dense evaluation never increases
        for curve in (params.ocp_n, params.ocp_p):
            th = np.linspace(curve.theta[0], curve.theta[-1], 4001)
            u = curve(th)
            assert np.all(np.diff(u) <= 0)

    def test_csv_header_enforced(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("x,y\n0.1,3.0\n0.9,2.0\n")
        with pytest.raises(ConfigError, match="header"):
            OcpCurve.from_csv(path)


class TestInitialState:
    def test_soc_one_sets_100_percent_stoichiometry(self, params, mesh):
        st = initial_state(params, mesh, 1.0)
        assert np.allclose(st.c_s_n, params.theta_n_100 * params.c_s_max_n)
        assert np.allclose(st.c_s_p, params.theta_p_100 * params.c_s_max_p)

    def test_soc_zero_sets_0_percent_stoichiometry(self, params, mesh):
        st = initial_state(params, mesh, 0.0)
        assert np.allclose(st.c_s_n, params.theta_n_0 * params.c_s_max_n)
        assert np.allclose(st.c_s_p, params.theta_p_0 * params.c_s_max_p)

    def test_soc_half_linear_inversion(self, params, mesh):
        # independent linear inversion of the SOC definition
        st = initial_state(params, mesh, 0.5)
        theta_n = st.c_s_n[0] / params.c_s_max_n
        expected = params.theta_n_0 + 0.5 * (params.theta_n_100 - params.theta_n_0)
        assert theta_n == pytest.approx(expected, abs=1e-15)

    def test_soc_round_trip(self, params, mesh):
        for soc0 in (0.0, 0.25, 0.5, 0.9, 1.0):
            st = initial_state(params, mesh, soc0)
            soc_n, soc_p = soc(st, params)
            assert abs(soc_n - soc0) < 1e-12
            assert abs(soc_p - soc0) < 1e-12

    def test_fresh_aging_fields(self, params, mesh):
        st = initial_state(params, mesh, 1.0)
        assert st.a_f_n == 0.0 and st.a_ina_n == 0.0
        assert st.a_t_n == pytest.approx(params.a_n)
        assert st.c_SEI == 0.0 and st.c_Li == 0.0
        assert st.L_film == 0.0
        assert st.eps_n == pytest.approx(params.eps_n_0)
        assert st.eps_p == pytest.approx(params.eps_p_0)

    def test_preexisting_film(self, params, mesh):
        st = initial_state(params, mesh, 1.0, L_SEI0=1e-8, L_Li0=2e-9)
        assert st.L_film == pytest.approx(1.2e-8)
        assert st.eps_n < params.eps_n_0

    def test_soc0_out_of_range(self, params, mesh):
        with pytest.raises(ParameterError, match="soc0"):
            initial_state(params, mesh, 1.01)

    def test_uniform_electrolyte(self, params, mesh):
        st = initial_state(params, mesh, 1.0)
        assert st.c_e.size == mesh.n_x
        assert np.all(st.c_e == params.c_e_init)
