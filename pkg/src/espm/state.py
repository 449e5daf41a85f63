"""Cell state container and initial/aged state construction."""

from dataclasses import dataclass, field

import numpy as np

from . import _kernels as K
from .errors import ParameterError, PorosityError


@dataclass
class CellState:
    """Discretized concentrations plus aging state.

    Arrays: ``c_s_p``/``c_s_n`` hold one solid concentration per radial
    shell (center first, surface last); ``c_e`` holds one electrolyte
    concentration per axial cell ordered anode | separator | cathode with
    the anode current collector at index 0.

    A state is a value object: simulations operate on a clone, never on a
    caller's instance.
    """

    c_s_p: np.ndarray
    c_s_n: np.ndarray
    c_e: np.ndarray
    c_SEI: float = 0.0
    c_Li: float = 0.0
    L_SEI: float = 0.0
    L_Li: float = 0.0
    a_f_p: float = 0.0
    a_f_n: float = 0.0
    a_ina_p: float = 0.0
    a_ina_n: float = 0.0
    a_t_p: float = 0.0
    a_t_n: float = 0.0
    eps_p: float = 0.0
    eps_n: float = 0.0
    t: float = 0.0

    @property
    def L_film(self):
        return self.L_SEI + self.L_Li

    def clone(self):
        return CellState(
            c_s_p=self.c_s_p.copy(), c_s_n=self.c_s_n.copy(),
            c_e=self.c_e.copy(), c_SEI=self.c_SEI, c_Li=self.c_Li,
            L_SEI=self.L_SEI, L_Li=self.L_Li,
            a_f_p=self.a_f_p, a_f_n=self.a_f_n,
            a_ina_p=self.a_ina_p, a_ina_n=self.a_ina_n,
            a_t_p=self.a_t_p, a_t_n=self.a_t_n,
            eps_p=self.eps_p, eps_n=self.eps_n, t=self.t)

    def pack_scalars(self):
        """Scalar state vector for the kernels."""
        sc = np.zeros(K.N_SCALARS)
        sc[K.S_C_SEI] = self.c_SEI
        sc[K.S_C_LI] = self.c_Li
        sc[K.S_L_SEI] = self.L_SEI
        sc[K.S_L_LI] = self.L_Li
        sc[K.S_AF_P] = self.a_f_p
        sc[K.S_AF_N] = self.a_f_n
        sc[K.S_AINA_P] = self.a_ina_p
        sc[K.S_AINA_N] = self.a_ina_n
        sc[K.S_AT_P] = self.a_t_p
        sc[K.S_AT_N] = self.a_t_n
        sc[K.S_EPS_P] = self.eps_p
        sc[K.S_EPS_N] = self.eps_n
        sc[K.S_TIME] = self.t
        return sc

    def unpack_scalars(self, sc):
        self.c_SEI = float(sc[K.S_C_SEI])
        self.c_Li = float(sc[K.S_C_LI])
        self.L_SEI = float(sc[K.S_L_SEI])
        self.L_Li = float(sc[K.S_L_LI])
        self.a_f_p = float(sc[K.S_AF_P])
        self.a_f_n = float(sc[K.S_AF_N])
        self.a_ina_p = float(sc[K.S_AINA_P])
        self.a_ina_n = float(sc[K.S_AINA_N])
        self.a_t_p = float(sc[K.S_AT_P])
        self.a_t_n = float(sc[K.S_AT_N])
        self.eps_p = float(sc[K.S_EPS_P])
        self.eps_n = float(sc[K.S_EPS_N])
        self.t = float(sc[K.S_TIME])


def _porosities(params, a_f_p, a_f_n, a_ina_p, a_ina_n, l_film):
    eps_p = params.eps_p_0 + (a_ina_p - a_f_p) * params.R_p / 3.0
    eps_n = params.eps_n_0 + (a_ina_n - a_f_n) * params.R_n / 3.0 \
        - params.v_n * 3.0 * l_film / params.R_n
    if not 0.0 < eps_p < 1.0:
        raise PorosityError(f"cathode porosity {eps_p:.4g} outside (0, 1)")
    if not 0.0 < eps_n < 1.0:
        raise PorosityError(f"anode porosity {eps_n:.4g} outside (0, 1)")
    return eps_p, eps_n


def initial_state(params, mesh, soc0, L_SEI0=0.0, L_Li0=0.0):
    """Uniform-concentration state at a given state of charge.

    ``L_SEI0``/``L_Li0`` model a pre-aged cell with an existing surface
    film; the corresponding cumulative side-species concentrations are
    back-computed so the film bookkeeping stays consistent.
    """
    if not 0.0 <= soc0 <= 1.0:
        raise ParameterError("soc0", "must lie in [0, 1]")
    theta_n = params.theta_n_0 + soc0 * (params.theta_n_100 - params.theta_n_0)
    theta_p = params.theta_p_0 - soc0 * (params.theta_p_0 - params.theta_p_100)
    c_s_n = np.full(mesh.n_r_n, theta_n * params.c_s_max_n)
    c_s_p = np.full(mesh.n_r_p, theta_p * params.c_s_max_p)
    c_e = np.full(mesh.n_x, params.c_e_init)
    a_n = params.a_n
    a_p = params.a_p
    c_sei0 = L_SEI0 * a_n * params.rho_SEI / params.M_SEI
    c_li0 = L_Li0 * a_n * params.rho_Li / params.M_Li
    eps_p, eps_n = _porosities(params, 0.0, 0.0, 0.0, 0.0, L_SEI0 + L_Li0)
    return CellState(
        c_s_p=c_s_p, c_s_n=c_s_n, c_e=c_e,
        c_SEI=c_sei0, c_Li=c_li0, L_SEI=float(L_SEI0), L_Li=float(L_Li0),
        a_t_p=a_p, a_t_n=a_n, eps_p=eps_p, eps_n=eps_n, t=0.0)


def aged_state(params, mesh, soc0, t_age, L_SEI0=0.0, L_Li0=0.0):
    """State after ``t_age`` seconds of loss-of-active-material evolution.

    The fracture/inactive areas follow the closed form of the linear area
    ODE, so jumping to a cycling horizon does not require integrating
    through it; surface films are imposed through ``L_SEI0``/``L_Li0``
    exactly as in :func:`initial_state`.
    """
    st = initial_state(params, mesh, soc0, L_SEI0=L_SEI0, L_Li0=L_Li0)
    for electrode in ("p", "n"):
        a = getattr(params, f"a_{electrode}")
        kp = getattr(params, f"kprime_{electrode}")
        bp = getattr(params, f"betaprime_{electrode}")
        a_f = a * kp * t_age
        if bp > 0.0:
            ratio = kp / bp
            a_t = a * (ratio + (1.0 - ratio) * np.exp(-bp * t_age))
        else:
            a_t = a + a_f
        setattr(st, f"a_f_{electrode}", a_f)
        setattr(st, f"a_ina_{electrode}", a + a_f - a_t)
        setattr(st, f"a_t_{electrode}", a_t)
    st.eps_p, st.eps_n = _porosities(
        params, st.a_f_p, st.a_f_n, st.a_ina_p, st.a_ina_n, st.L_film)
    st.t = float(t_age)
    return st
