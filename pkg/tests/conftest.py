import numpy as np
import pytest

import espm
from espm import Mesh, substituted


@pytest.fixture(scope="session")
def params():
    """Shipped default parameter set (identified fresh cell)."""
    return espm.load_parameters(espm.data_path("default_config.json"))


@pytest.fixture(scope="session")
def quiet_params(params):
    """Defaults with both side reactions and LAM switched off."""
    return substituted(params, k_f=0.0, i0_pl=0.0,
                       kprime_p=0.0, kprime_n=0.0,
                       betaprime_p=0.0, betaprime_n=0.0)


@pytest.fixture(scope="session")
def mesh():
    return Mesh()


@pytest.fixture(scope="session")
def coarse_mesh():
    return Mesh(n_r_p=8, n_r_n=8, n_x_p=4, n_x_s=4, n_x_n=4)


@pytest.fixture(scope="session")
def current_c3(params):
    """C/3 current of the nominal 12.4 Ah cell."""
    return 12.4 / 3.0


def make_dataset(params, mesh, current, cutoff=2.65, sample_dt=30.0,
                 noise_v=1e-3, seed=42, film_ratio=0.0, truth_overrides=None):
    """Synthetic constant-current dataset from a known ground truth."""
    truth = substituted(params, **(truth_overrides or {}))
    init = espm.initial_state(truth, mesh, 1.0,
                              L_SEI0=film_ratio * truth.kappa_SEI)
    trace = espm.run_constant_current(truth, mesh, current, V_cutoff=cutoff,
                                      initial=init)
    t_rel = trace.t_s - trace.t_s[0]
    samp = np.arange(0.0, t_rel[-1], sample_dt)
    rng = np.random.default_rng(seed)
    v = np.interp(samp, t_rel, trace.V_cell_V)
    if noise_v:
        v = v + rng.normal(0.0, noise_v, samp.size)
    return espm.ExperimentalDataset(
        t_s=samp, capacity_Ah=samp * current / 3600.0, voltage_V=v,
        current_A=current)
