"""Cell parameters, mesh, open-circuit-potential curves and config I/O.

The JSON config mirrors the parameter groups below section by section; OCP
curves are two-column ``theta,voltage`` CSV tables referenced from the
config and interpolated with a monotone piecewise cubic.
"""

import json
from dataclasses import dataclass, field, fields, replace
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import _kernels as K
from .errors import ConfigError, ParameterError

DEFAULT_CONFIG = "default_config.json"
SWEEP_CONFIG = "sweep_3300.json"


def data_path(name):
    """Path of a data file shipped with the package."""
    return Path(resources.files("espm").joinpath("data", name))


@dataclass(frozen=True)
class OcpCurve:
    """Tabulated half-cell open-circuit potential U(theta) on [0, 1].

    Interpolation is shape-preserving piecewise cubic; evaluation clamps to
    the tabulated range, so the curve is defined (and flat) beyond the table
    ends.
    """

    theta: np.ndarray
    voltage: np.ndarray
    source: str = ""
    coeffs: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        th = np.ascontiguousarray(np.asarray(self.theta, dtype=np.float64))
        u = np.ascontiguousarray(np.asarray(self.voltage, dtype=np.float64))
        if th.ndim != 1 or th.size < 2 or u.shape != th.shape:
            raise ConfigError(f"OCP table {self.source!r}: need two equal 1-D columns")
        if np.any(np.diff(th) <= 0):
            raise ConfigError(f"OCP table {self.source!r}: theta must be strictly increasing")
        if th[0] < 0.0 or th[-1] > 1.0:
            raise ConfigError(f"OCP table {self.source!r}: theta must lie in [0, 1]")
        if np.any(np.diff(u) >= 0):
            raise ConfigError(
                f"OCP table {self.source!r}: voltage must be strictly decreasing in theta")
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "voltage", u)
        pc = PchipInterpolator(th, u, extrapolate=False)
        object.__setattr__(self, "coeffs",
                           np.ascontiguousarray(pc.c, dtype=np.float64))

    @classmethod
    def from_csv(cls, path):
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"OCP table not found: {path}")
        try:
            raw = np.genfromtxt(path, delimiter=",", names=True, dtype=np.float64)
        except Exception as exc:
            raise ConfigError(f"OCP table {path}: {exc}") from exc
        names = raw.dtype.names
        if names is None or names[:2] != ("theta", "voltage"):
            raise ConfigError(f"OCP table {path}: header must be 'theta,voltage'")
        return cls(theta=raw["theta"], voltage=raw["voltage"], source=str(path))

    def __call__(self, theta):
        th = np.asarray(theta, dtype=np.float64)
        if th.ndim == 0:
            return K.pchip_eval(self.theta, self.coeffs, float(th))
        out = np.empty(th.shape)
        flat = th.ravel()
        for i in range(flat.size):
            out.ravel()[i] = K.pchip_eval(self.theta, self.coeffs, flat[i])
        return out


@dataclass(frozen=True)
class Mesh:
    """Radial shells per particle and axial cells per region."""

    n_r_p: int = 20
    n_r_n: int = 20
    n_x_p: int = 10
    n_x_s: int = 10
    n_x_n: int = 10

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if not isinstance(v, int) or v < 3:
                raise ParameterError(f"mesh.{f.name}", "must be an integer >= 3")

    @property
    def n_x(self):
        return self.n_x_p + self.n_x_s + self.n_x_n


@dataclass(frozen=True)
class CellParameters:
    """All physical constants of the cell model (SI units throughout).

    Immutable after construction; safe to share across concurrent
    simulations.  Use :func:`dataclasses.replace` to derive variants.
    """

    # geometry
    A_cell: float
    L_p: float
    L_s: float
    L_n: float
    R_p: float
    R_n: float
    # transport
    t_plus: float
    brugg: float
    D_s_ref_p: float
    D_s_ref_n: float
    E_a_Ds_p: float
    E_a_Ds_n: float
    # kinetics
    k_p: float
    k_n: float
    alpha: float
    i0_pl: float
    k_f: float
    E_a_kf: float
    c_solv_surf: float
    # composition
    v_p: float
    v_n: float
    v_p_filler: float
    v_n_filler: float
    c_s_max_p: float
    c_s_max_n: float
    # stoichiometry windows
    theta_p_0: float
    theta_p_100: float
    theta_n_0: float
    theta_n_100: float
    # aging
    beta: float
    kprime_p: float
    kprime_n: float
    betaprime_p: float
    betaprime_n: float
    M_SEI: float
    M_Li: float
    rho_SEI: float
    rho_Li: float
    kappa_SEI: float
    # resistances / environment / constants
    R_l: float
    T: float
    T_ref: float
    F: float = 96485.33212
    R_gas: float = 8.314462618
    # electrolyte
    eps_s: float = 0.45
    c_e_init: float = 1000.0
    D_e_poly: tuple = (2.6e-10,)
    kappa_e_poly: tuple = (0.0, 1.8e-3, -0.9e-6, 1.4e-10)
    E_a_De: float = 0.0
    E_a_kappa: float = 0.0
    # open-circuit potentials
    ocp_p: OcpCurve = None
    ocp_n: OcpCurve = None

    def __post_init__(self):
        pos = ("A_cell", "L_p", "L_s", "L_n", "R_p", "R_n",
               "D_s_ref_p", "D_s_ref_n", "k_p", "k_n", "c_solv_surf",
               "v_p", "v_n", "c_s_max_p", "c_s_max_n",
               "M_SEI", "M_Li", "rho_SEI", "rho_Li", "kappa_SEI",
               "T", "T_ref", "F", "R_gas", "c_e_init")
        for name in pos:
            if not getattr(self, name) > 0.0:
                raise ParameterError(name, "must be strictly positive")
        nonneg = ("E_a_Ds_p", "E_a_Ds_n", "E_a_kf", "E_a_De", "E_a_kappa",
                  "i0_pl", "k_f", "v_p_filler", "v_n_filler", "R_l",
                  "kprime_p", "kprime_n", "betaprime_p", "betaprime_n")
        for name in nonneg:
            if getattr(self, name) < 0.0:
                raise ParameterError(name, "must be nonnegative")
        if not 0.0 < self.t_plus < 1.0:
            raise ParameterError("t_plus", "must lie in (0, 1)")
        if not 0.0 < self.alpha < 1.0:
            raise ParameterError("alpha", "must lie in (0, 1)")
        if not 0.0 <= self.beta <= 1.0:
            raise ParameterError("beta", "must lie in [0, 1]")
        if not 0.0 < self.eps_s < 1.0:
            raise ParameterError("eps_s", "must lie in (0, 1)")
        if not 0.0 <= self.theta_n_0 < self.theta_n_100 <= 1.0:
            raise ParameterError(
                "theta_n_0/theta_n_100", "need 0 <= theta_n_0 < theta_n_100 <= 1")
        if not 0.0 <= self.theta_p_100 < self.theta_p_0 <= 1.0:
            raise ParameterError(
                "theta_p_100/theta_p_0", "need 0 <= theta_p_100 < theta_p_0 <= 1")
        if not self.v_p + self.v_p_filler < 1.0:
            raise ParameterError("v_p/v_p_filler", "v_p + v_p_filler must be < 1")
        if not self.v_n + self.v_n_filler < 1.0:
            raise ParameterError("v_n/v_n_filler", "v_n + v_n_filler must be < 1")
        if self.ocp_p is None or self.ocp_n is None:
            raise ParameterError("ocp", "both OCP curves are required")
        object.__setattr__(self, "D_e_poly", tuple(float(c) for c in self.D_e_poly))
        object.__setattr__(self, "kappa_e_poly",
                           tuple(float(c) for c in self.kappa_e_poly))

    # initial porosities and geometric specific areas
    @property
    def eps_p_0(self):
        return 1.0 - self.v_p - self.v_p_filler

    @property
    def eps_n_0(self):
        return 1.0 - self.v_n - self.v_n_filler

    @property
    def a_p(self):
        return 3.0 / self.R_p

    @property
    def a_n(self):
        return 3.0 / self.R_n


# config (section, key) -> dataclass attribute
_CONFIG_FIELDS = [
    ("geometry", "A_cell_m2", "A_cell"),
    ("geometry", "L_p_m", "L_p"),
    ("geometry", "L_s_m", "L_s"),
    ("geometry", "L_n_m", "L_n"),
    ("geometry", "R_p_m", "R_p"),
    ("geometry", "R_n_m", "R_n"),
    ("transport", "t_plus", "t_plus"),
    ("transport", "brugg", "brugg"),
    ("transport", "D_s_ref_p_m2_s", "D_s_ref_p"),
    ("transport", "D_s_ref_n_m2_s", "D_s_ref_n"),
    ("transport", "E_a_Ds_p_J_mol", "E_a_Ds_p"),
    ("transport", "E_a_Ds_n_J_mol", "E_a_Ds_n"),
    ("kinetics", "k_p_m2p5_mol0p5_s", "k_p"),
    ("kinetics", "k_n_m2p5_mol0p5_s", "k_n"),
    ("kinetics", "alpha", "alpha"),
    ("kinetics", "i0_pl_A_m2", "i0_pl"),
    ("kinetics", "k_f_m_s", "k_f"),
    ("kinetics", "E_a_kf_J_mol", "E_a_kf"),
    ("kinetics", "c_solv_surf_mol_m3", "c_solv_surf"),
    ("composition", "v_p", "v_p"),
    ("composition", "v_n", "v_n"),
    ("composition", "v_p_filler", "v_p_filler"),
    ("composition", "v_n_filler", "v_n_filler"),
    ("composition", "c_s_max_p_mol_m3", "c_s_max_p"),
    ("composition", "c_s_max_n_mol_m3", "c_s_max_n"),
    ("stoichiometry", "theta_p_0", "theta_p_0"),
    ("stoichiometry", "theta_p_100", "theta_p_100"),
    ("stoichiometry", "theta_n_0", "theta_n_0"),
    ("stoichiometry", "theta_n_100", "theta_n_100"),
    ("aging", "beta", "beta"),
    ("aging", "kprime_p_per_s", "kprime_p"),
    ("aging", "kprime_n_per_s", "kprime_n"),
    ("aging", "betaprime_p_per_s", "betaprime_p"),
    ("aging", "betaprime_n_per_s", "betaprime_n"),
    ("aging", "M_SEI_kg_mol", "M_SEI"),
    ("aging", "M_Li_kg_mol", "M_Li"),
    ("aging", "rho_SEI_kg_m3", "rho_SEI"),
    ("aging", "rho_Li_kg_m3", "rho_Li"),
    ("aging", "kappa_SEI_S_m", "kappa_SEI"),
    ("resistances", "R_l_ohm", "R_l"),
    ("environment", "T_K", "T"),
    ("environment", "T_ref_K", "T_ref"),
    ("constants", "F_C_mol", "F"),
    ("constants", "R_gas_J_mol_K", "R_gas"),
    ("electrolyte", "eps_s", "eps_s"),
    ("electrolyte", "c_init_mol_m3", "c_e_init"),
    ("electrolyte", "diffusivity_poly", "D_e_poly"),
    ("electrolyte", "conductivity_poly", "kappa_e_poly"),
    ("electrolyte", "E_a_De_J_mol", "E_a_De"),
    ("electrolyte", "E_a_kappa_J_mol", "E_a_kappa"),
]


def load_parameters(path):
    """Load and validate :class:`CellParameters` from a JSON config file."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path}: invalid JSON ({exc})") from exc
    return parameters_from_dict(raw, base_dir=path.parent)


def parameters_from_dict(raw, base_dir="."):
    """Build :class:`CellParameters` from an already-parsed config dict."""
    kwargs = {}
    for section, key, attr in _CONFIG_FIELDS:
        sec = raw.get(section)
        if sec is None:
            raise ConfigError(f"missing config section '{section}'")
        if key not in sec:
            raise ConfigError(f"missing config field '{section}.{key}' ({attr})")
        value = sec[key]
        if attr.endswith("_poly"):
            kwargs[attr] = tuple(float(c) for c in value)
        else:
            kwargs[attr] = float(value)
    ocp = raw.get("ocp")
    if not ocp or "anode_csv" not in ocp or "cathode_csv" not in ocp:
        raise ConfigError("missing config fields 'ocp.anode_csv' / 'ocp.cathode_csv'")
    base = Path(base_dir)
    kwargs["ocp_n"] = OcpCurve.from_csv(_resolve(ocp["anode_csv"], base))
    kwargs["ocp_p"] = OcpCurve.from_csv(_resolve(ocp["cathode_csv"], base))
    return CellParameters(**kwargs)


def _resolve(name, base):
    p = Path(name)
    if p.is_absolute():
        return p
    cand = base / p
    if cand.exists():
        return cand
    # fall back to the packaged data directory
    packaged = data_path(p.name)
    return packaged if packaged.exists() else cand


def parameters_to_dict(params, ocp_anode_csv="ocp_anode.csv",
                       ocp_cathode_csv="ocp_cathode.csv"):
    """Config dict for ``params``; inverse of :func:`parameters_from_dict`
    for every numeric field."""
    out = {}
    for section, key, attr in _CONFIG_FIELDS:
        sec = out.setdefault(section, {})
        value = getattr(params, attr)
        sec[key] = list(value) if attr.endswith("_poly") else value
    out["ocp"] = {"anode_csv": str(ocp_anode_csv), "cathode_csv": str(ocp_cathode_csv)}
    return out


def save_parameters(params, path, ocp_anode_csv="ocp_anode.csv",
                    ocp_cathode_csv="ocp_cathode.csv"):
    """Write a JSON config that loads back bit-identically."""
    with open(path, "w") as fh:
        json.dump(parameters_to_dict(params, ocp_anode_csv, ocp_cathode_csv),
                  fh, indent=2, sort_keys=True)
        fh.write("\n")


def mesh_from_dict(raw):
    sec = raw.get("mesh", {})
    return Mesh(**{k: int(v) for k, v in sec.items()})


def pack_params(params):
    """Pack the scalar parameters into the kernel parameter vector."""
    v = np.zeros(K.N_PARAMS)
    v[K.P_A_CELL] = params.A_cell
    v[K.P_L_P] = params.L_p
    v[K.P_L_S] = params.L_s
    v[K.P_L_N] = params.L_n
    v[K.P_R_P] = params.R_p
    v[K.P_R_N] = params.R_n
    v[K.P_T_PLUS] = params.t_plus
    v[K.P_BRUGG] = params.brugg
    v[K.P_DS_REF_P] = params.D_s_ref_p
    v[K.P_DS_REF_N] = params.D_s_ref_n
    v[K.P_EA_DS_P] = params.E_a_Ds_p
    v[K.P_EA_DS_N] = params.E_a_Ds_n
    v[K.P_K_P] = params.k_p
    v[K.P_K_N] = params.k_n
    v[K.P_ALPHA] = params.alpha
    v[K.P_I0_PL] = params.i0_pl
    v[K.P_K_F] = params.k_f
    v[K.P_EA_KF] = params.E_a_kf
    v[K.P_C_SOLV] = params.c_solv_surf
    v[K.P_V_P] = params.v_p
    v[K.P_V_N] = params.v_n
    v[K.P_VF_P] = params.v_p_filler
    v[K.P_VF_N] = params.v_n_filler
    v[K.P_CSMAX_P] = params.c_s_max_p
    v[K.P_CSMAX_N] = params.c_s_max_n
    v[K.P_TH_P0] = params.theta_p_0
    v[K.P_TH_P100] = params.theta_p_100
    v[K.P_TH_N0] = params.theta_n_0
    v[K.P_TH_N100] = params.theta_n_100
    v[K.P_BETA] = params.beta
    v[K.P_KPRIME_P] = params.kprime_p
    v[K.P_KPRIME_N] = params.kprime_n
    v[K.P_BPRIME_P] = params.betaprime_p
    v[K.P_BPRIME_N] = params.betaprime_n
    v[K.P_M_SEI] = params.M_SEI
    v[K.P_M_LI] = params.M_Li
    v[K.P_RHO_SEI] = params.rho_SEI
    v[K.P_RHO_LI] = params.rho_Li
    v[K.P_KAPPA_SEI] = params.kappa_SEI
    v[K.P_R_L] = params.R_l
    v[K.P_T] = params.T
    v[K.P_T_REF] = params.T_ref
    v[K.P_F] = params.F
    v[K.P_R_GAS] = params.R_gas
    v[K.P_EPS_S] = params.eps_s
    v[K.P_CE_INIT] = params.c_e_init
    v[K.P_EA_DE] = params.E_a_De
    v[K.P_EA_KAPPA] = params.E_a_kappa
    return v


def pack_tables(params):
    """Kernel-ready correlation tables:
    (D_e poly, kappa poly, ocp_n x, ocp_n coeffs, ocp_p x, ocp_p coeffs)."""
    de = np.ascontiguousarray(params.D_e_poly, dtype=np.float64)
    ka = np.ascontiguousarray(params.kappa_e_poly, dtype=np.float64)
    return (de, ka, params.ocp_n.theta, params.ocp_n.coeffs,
            params.ocp_p.theta, params.ocp_p.coeffs)


def substituted(params, **values):
    """A copy of ``params`` with named fields replaced (re-validated)."""
    return replace(params, **values)
