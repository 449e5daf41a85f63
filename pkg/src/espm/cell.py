"""Assembled cell model: overpotentials, flux split, voltage, SOC and the
constant-current experiment driver.

The flux-split identity I/(A_cell*L_n) = j_int + j_SEI + j_pl holds exactly
at every step because j_int is defined by the difference; the driver tracks
the recomputed residual (same floating-point grouping) and exposes its
maximum, which is zero by construction.
"""

import csv
import math
from dataclasses import dataclass, replace as dc_replace

import numpy as np

from . import _kernels as K
from .errors import (PorosityError, SaturationError, SimulationError)
from .parameters import pack_params, pack_tables
from .state import initial_state

TRACE_HEADER = ["t_s", "V_cell_V", "soc_n", "soc_p", "capacity_Ah",
                "R_film_ohm", "j_sei_A_m3", "j_pl_A_m3"]


@dataclass(frozen=True)
class StepOutput:
    """Algebraic outputs of the cell model at one instant."""

    V_cell: float
    soc_n: float
    soc_p: float
    eta_p: float
    eta_n: float
    phi_s_n: float
    delta_phi_e: float
    R_film: float
    R_el: float
    j_int: float
    j_SEI: float
    j_pl: float
    # Coulomb-counted discharge capacity; filled by the driver, nan for a
    # standalone step evaluation.
    capacity_Ah: float = math.nan


@dataclass(frozen=True)
class TimestepPolicy:
    """Fixed-step policy; 1 s resolves a C/3 discharge comfortably."""

    dt_s: float = 1.0

    def dt(self, I, params):
        return self.dt_s


@dataclass
class SimulationTrace:
    """Time series of a constant-current run plus the terminating condition.

    ``t_s`` is absolute simulation time (an aged start offsets it);
    capacity is Coulomb-counted from the start of the run with the applied
    current.
    """

    t_s: np.ndarray
    V_cell_V: np.ndarray
    soc_n: np.ndarray
    soc_p: np.ndarray
    eta_p_V: np.ndarray
    eta_n_V: np.ndarray
    phi_s_n_V: np.ndarray
    delta_phi_e_V: np.ndarray
    R_film_ohm: np.ndarray
    R_el_ohm: np.ndarray
    j_int_A_m3: np.ndarray
    j_sei_A_m3: np.ndarray
    j_pl_A_m3: np.ndarray
    current_A: float
    termination: str
    max_flux_residual: float
    final_state: object

    @property
    def capacity_Ah(self):
        return self.current_A * (self.t_s - self.t_s[0]) / 3600.0

    def to_csv(self, path):
        """Write the trace in the export schema (8 columns, SI-suffixed)."""
        cap = self.capacity_Ah
        t_rel = self.t_s - self.t_s[0]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(TRACE_HEADER)
            for i in range(self.t_s.size):
                w.writerow([repr(float(t_rel[i])), repr(float(self.V_cell_V[i])),
                            repr(float(self.soc_n[i])), repr(float(self.soc_p[i])),
                            repr(float(cap[i])), repr(float(self.R_film_ohm[i])),
                            repr(float(self.j_sei_A_m3[i])),
                            repr(float(self.j_pl_A_m3[i]))])

    def summary(self):
        return {
            "end_capacity_Ah": float(self.capacity_Ah[-1]),
            "end_voltage_V": float(self.V_cell_V[-1]),
            "peak_R_film_ohm": float(np.max(self.R_film_ohm)),
            "end_soc_n": float(self.soc_n[-1]),
            "end_soc_p": float(self.soc_p[-1]),
            "duration_s": float(self.t_s[-1] - self.t_s[0]),
            "n_rows": int(self.t_s.size),
            "termination": self.termination,
            "max_flux_residual_A_m3": float(self.max_flux_residual),
        }


def exchange_current(c_s_surf, c_s_avg, c_e_local, params, electrode):
    """Butler-Volmer exchange current density (A/m2).

    The kinetic law uses only solid concentrations; ``c_e_local`` is part
    of the interface for correlation variants but does not enter here.
    """
    c_max = params.c_s_max_p if electrode == "p" else params.c_s_max_n
    k = params.k_p if electrode == "p" else params.k_n
    if not 0.0 < c_s_surf < c_max:
        raise SaturationError(
            f"{electrode} surface concentration {c_s_surf:.6g} outside (0, {c_max:g})")
    return k * params.F * math.sqrt(c_s_avg * c_s_surf * (c_max - c_s_surf))


def overpotential(I, a_t_i, L_i, i0, params, electrode):
    """Electrode overpotential (V), odd in I.

    The applied current enters with an electrode-specific sign so that on
    discharge eta_n > 0 and eta_p < 0, both reducing the cell voltage.
    """
    if not i0 > 0.0 or not a_t_i > 0.0:
        raise ValueError("exchange current and total area must be positive")
    signed = I if electrode == "n" else -I
    x = signed / (2.0 * params.A_cell * a_t_i * L_i * i0)
    return (params.R_gas * params.T / (0.5 * params.F)) * math.asinh(x)


def soc(state, params):
    """(SOC_n, SOC_p) from surface stoichiometries; not clamped to [0, 1].

    This zero-current estimate reads the outer shell directly; traces carry
    the flux-corrected surface values instead.
    """
    th_n = state.c_s_n[-1] / params.c_s_max_n
    th_p = state.c_s_p[-1] / params.c_s_max_p
    soc_n = (th_n - params.theta_n_0) / (params.theta_n_100 - params.theta_n_0)
    soc_p = (params.theta_p_0 - th_p) / (params.theta_p_0 - params.theta_p_100)
    return soc_n, soc_p


def _kernel_args(state, params, mesh):
    de, ka, onx, onc, opx, opc = pack_tables(params)
    return (np.ascontiguousarray(state.c_s_p), np.ascontiguousarray(state.c_s_n),
            np.ascontiguousarray(state.c_e), state.pack_scalars(),
            pack_params(params), de, ka, onx, onc, opx, opc,
            mesh.n_x_p, mesh.n_x_s, mesh.n_x_n)


def _raise_for(code, state, I, t0):
    cap = I * (state.t - t0) / 3600.0
    if code == K.TERM_SATURATION:
        raise SaturationError("particle surface concentration saturated",
                              t=state.t, capacity_ah=cap)
    if code == K.ERR_POROSITY:
        raise PorosityError("porosity left (0, 1)", t=state.t, capacity_ah=cap)
    if code == K.ERR_NONFINITE_V:
        raise SimulationError("non-finite cell voltage", t=state.t, capacity_ah=cap)
    if code == K.ERR_NONPOSITIVE_CE:
        raise SimulationError("nonpositive electrolyte concentration",
                              t=state.t, capacity_ah=cap)
    if code == K.ERR_SINGULAR:
        raise SimulationError("singular linear system", t=state.t, capacity_ah=cap)
    if code == K.ERR_AREA:
        raise SimulationError("total active area is nonpositive",
                              t=state.t, capacity_ah=cap)
    raise SimulationError(f"unexpected status code {code}", t=state.t, capacity_ah=cap)


def evaluate(state, I, params, mesh):
    """StepOutput of the model algebra at the given state and current."""
    cs_p, cs_n, ce, sc, pvec, de, ka, onx, onc, opx, opc, nxp, nxs, nxn = \
        _kernel_args(state, params, mesh)
    res = K.algebra(cs_p, cs_n, ce, sc, pvec, de, ka, onx, onc, opx, opc,
                    nxp, nxs, nxn, I)
    if res[0] != K.OK:
        _raise_for(res[0], state, I, state.t)
    return StepOutput(V_cell=res[1], soc_n=res[2], soc_p=res[3],
                      eta_p=res[4], eta_n=res[5], phi_s_n=res[6],
                      delta_phi_e=res[7], R_film=res[8], R_el=res[9],
                      j_int=res[10], j_SEI=res[11], j_pl=res[12])


def step(state, I, dt, params, mesh):
    """One time step: evaluate the algebra at ``state``, then advance the
    PDEs and aging ODEs by ``dt``.

    Returns (new_state, output), where the output is the algebra at the
    step start (the fluxes that drove the step).
    """
    if not dt > 0.0:
        raise ValueError("dt must be positive")
    cs_p, cs_n, ce, sc, pvec, de, ka, onx, onc, opx, opc, nxp, nxs, nxn = \
        _kernel_args(state, params, mesh)
    res = K.algebra(cs_p, cs_n, ce, sc, pvec, de, ka, onx, onc, opx, opc,
                    nxp, nxs, nxn, I)
    if res[0] != K.OK:
        _raise_for(res[0], state, I, state.t)
    out = StepOutput(V_cell=res[1], soc_n=res[2], soc_p=res[3],
                     eta_p=res[4], eta_n=res[5], phi_s_n=res[6],
                     delta_phi_e=res[7], R_film=res[8], R_el=res[9],
                     j_int=res[10], j_SEI=res[11], j_pl=res[12])
    code = K.advance(cs_p, cs_n, ce, sc, pvec, de, nxp, nxs, nxn,
                     I, dt, out.j_int, out.j_SEI, out.j_pl)
    if code != K.OK:
        _raise_for(code, state, I, state.t)
    new = state.clone()
    new.c_s_p = cs_p
    new.c_s_n = cs_n
    new.c_e = ce
    new.unpack_scalars(sc)
    return new, out


def run_constant_current(params, mesh, I, V_cutoff=None, soc0=1.0,
                         dt=TimestepPolicy(), t_max=None, initial=None):
    """Run a constant-current experiment.

    Steps until the voltage crosses ``V_cutoff`` (downward on discharge,
    upward on charge), the horizon ``t_max`` elapses, or a particle surface
    saturates (SOC exhaustion); each is a clean termination recorded on the
    trace.  Hard failures raise :class:`SimulationError` annotated with
    time and capacity.
    """
    dt_s = dt.dt(I, params) if isinstance(dt, TimestepPolicy) else float(dt)
    if not dt_s > 0.0:
        raise ValueError("dt must be positive")
    state = initial.clone() if initial is not None else \
        initial_state(params, mesh, soc0)
    t0 = state.t
    if t_max is None:
        if I != 0.0:
            nominal_s = 3600.0 * _window_capacity_ah(params) / abs(I)
            t_max = 1.5 * nominal_s
        else:
            t_max = 3600.0
    n_max = int(math.ceil(t_max / dt_s)) + 2
    trace_buf = np.empty((n_max, K.N_COLS))
    cs_p, cs_n, ce, sc, pvec, de, ka, onx, onc, opx, opc, nxp, nxs, nxn = \
        _kernel_args(state, params, mesh)
    use_cutoff = V_cutoff is not None and I != 0.0
    rows, code, max_resid = K.run_cc(
        cs_p, cs_n, ce, sc, pvec, de, ka, onx, onc, opx, opc,
        nxp, nxs, nxn, I, dt_s,
        float(V_cutoff) if use_cutoff else 0.0, use_cutoff,
        t0 + float(t_max), trace_buf)
    state.c_s_p = cs_p
    state.c_s_n = cs_n
    state.c_e = ce
    state.unpack_scalars(sc)
    if code < 0 or rows == 0:
        _raise_for(code if code < 0 else K.TERM_SATURATION, state, I, t0)
    termination = {K.TERM_CUTOFF: "voltage_cutoff",
                   K.TERM_MAX_TIME: "max_time",
                   K.TERM_SATURATION: "saturation"}[code]
    tr = trace_buf[:rows]
    return SimulationTrace(
        t_s=tr[:, K.C_T].copy(), V_cell_V=tr[:, K.C_V].copy(),
        soc_n=tr[:, K.C_SOC_N].copy(), soc_p=tr[:, K.C_SOC_P].copy(),
        eta_p_V=tr[:, K.C_ETA_P].copy(), eta_n_V=tr[:, K.C_ETA_N].copy(),
        phi_s_n_V=tr[:, K.C_PHI_SN].copy(),
        delta_phi_e_V=tr[:, K.C_DPHI_E].copy(),
        R_film_ohm=tr[:, K.C_R_FILM].copy(), R_el_ohm=tr[:, K.C_R_EL].copy(),
        j_int_A_m3=tr[:, K.C_J_INT].copy(), j_sei_A_m3=tr[:, K.C_J_SEI].copy(),
        j_pl_A_m3=tr[:, K.C_J_PL].copy(),
        current_A=I, termination=termination,
        max_flux_residual=max_resid, final_state=state)


def _window_capacity_ah(params):
    """Coulombic capacity of the anode stoichiometry window (Ah)."""
    return params.A_cell * params.L_n * params.F * params.c_s_max_n \
        * (params.theta_n_100 - params.theta_n_0) / 3600.0


def solid_total_lithium(state, params):
    """Region-volume-weighted solid lithium A*(L_n*cavg_n + L_p*cavg_p)
    (mol); conserved on any trajectory with side reactions and LAM off."""
    avg_n = K.solid_avg(np.ascontiguousarray(state.c_s_n), params.R_n)
    avg_p = K.solid_avg(np.ascontiguousarray(state.c_s_p), params.R_p)
    return params.A_cell * (params.L_n * avg_n + params.L_p * avg_p)


def side_species_lithium(state, params):
    """Lithium immobilized by the side reactions (mol): each cumulative
    species unit carries two elementary charges under the rate equations,
    so the total is 2 * A * L_n * (c_SEI + c_Li)."""
    return 2.0 * params.A_cell * params.L_n * (state.c_SEI + state.c_Li)
