"""Degradation mechanisms: SEI growth, lithium plating, active-material loss,
porosity evolution and film resistance.

Both side currents are cathodic (nonpositive) and share the same exponential
driving force; the side species only accumulate.  Fracture area grows
linearly in time while inactive area relaxes toward the instantaneous total
area, which admits a closed-form solution used as the test oracle.
"""

import enum
import math
from dataclasses import dataclass

from . import _kernels as K
from .errors import PorosityError


@dataclass(frozen=True)
class SideReactionRates:
    """Side current densities (A/m3, anode volume) and the induced species
    and film growth rates."""

    j_SEI: float
    j_pl: float
    dc_SEI_dt: float
    dc_Li_dt: float
    dL_SEI_dt: float
    dL_Li_dt: float


class LamRegime(enum.Enum):
    """Qualitative loss-of-active-material behavior, by 1 - k'/beta'."""

    COMPARABLE = "case (i): fracture and isolation rates comparable"
    FRACTURE_DOMINATED = "case (ii): fracture dominates, area grows"
    ISOLATION_DOMINATED = "case (iii): isolation dominates, area shrinks"
    BOUNDARY = "between case (i) and case (ii)"


@dataclass(frozen=True)
class LamClassification:
    regime: LamRegime
    one_minus_ratio: float


def _drive_exponential(phi_s_n, phi_e_n, R_film, I, params):
    arg = -params.alpha * params.F / (params.R_gas * params.T) \
        * (phi_s_n - phi_e_n - R_film * I)
    return math.exp(arg)


def sei_current_density(state, phi_s_n, phi_e_n, R_film, I, params):
    """Solvent-reduction side current density (A/m3, <= 0)."""
    if params.k_f == 0.0:
        return 0.0
    k_f = K.arrhenius(params.k_f, params.E_a_kf, params.T, params.T_ref,
                      params.R_gas)
    return -params.F * state.a_t_n * k_f * params.c_solv_surf \
        * _drive_exponential(phi_s_n, phi_e_n, R_film, I, params)


def plating_current_density(state, phi_s_n, phi_e_n, R_film, I, params):
    """Lithium-deposition side current density (A/m3, <= 0)."""
    if params.i0_pl == 0.0:
        return 0.0
    return -2.0 * state.a_t_n * params.i0_pl \
        * _drive_exponential(phi_s_n, phi_e_n, R_film, I, params)


def species_and_film_rates(j_SEI, j_pl, state, params):
    """Cumulative-species and layer-thickness rates from the side currents.

    SEI and plated-lithium thickness rates are kept separate so that
    L_film = L_SEI + L_Li holds identically along any trajectory.
    """
    two_f = 2.0 * params.F
    dc_sei = -(j_SEI / two_f + j_pl * params.beta / two_f)
    dc_li = -j_pl * (1.0 - params.beta) / two_f
    a_t = state.a_t_n
    return SideReactionRates(
        j_SEI=j_SEI, j_pl=j_pl,
        dc_SEI_dt=dc_sei, dc_Li_dt=dc_li,
        dL_SEI_dt=dc_sei * params.M_SEI / (params.rho_SEI * a_t),
        dL_Li_dt=dc_li * params.M_Li / (params.rho_Li * a_t))


def film_resistance(L_SEI, a_t_n, params):
    """Ohmic resistance of the SEI layer (Ohm); plated lithium is metallic
    and adds none.  Shrinking total area raises the resistance."""
    if not a_t_n > 0.0:
        raise ValueError("total anode area must be positive")
    return L_SEI / (a_t_n * params.A_cell * params.L_n * params.kappa_SEI)


def lam_rates(state, params, t):
    """Inactive-area growth rates and the (algebraic) fracture areas at t.

    Returns (da_ina_dt_p, da_ina_dt_n, a_f_p, a_f_n).
    """
    if t < 0.0:
        raise ValueError("time must be nonnegative")
    a_f_p = params.a_p * params.kprime_p * t
    a_f_n = params.a_n * params.kprime_n * t
    da_p = params.betaprime_p * (params.a_p + a_f_p - state.a_ina_p)
    da_n = params.betaprime_n * (params.a_n + a_f_n - state.a_ina_n)
    return da_p, da_n, a_f_p, a_f_n


def lam_total_area(a0, kprime, betaprime, t):
    """Closed-form total specific area a_t(t) of the linear area ODE."""
    if betaprime == 0.0:
        return a0 * (1.0 + kprime * t)
    ratio = kprime / betaprime
    return a0 * (ratio + (1.0 - ratio) * math.exp(-betaprime * t))


def integrate_lam(a0, kprime, betaprime, t_end, dt=500.0):
    """Explicit-Euler integration of the inactive-area ODE from a fresh
    electrode; returns (a_f, a_ina, a_t) at t_end.

    The default step keeps the relative error of a_t below 1e-6 across the
    coefficient ranges of interest over 1e7 s horizons.
    """
    return K.lam_integrate(float(a0), float(kprime), float(betaprime),
                           0.0, float(t_end), 0.0, 0.0, float(dt))


def classify_lam_regime(kprime, betaprime, tol=0.1):
    """Classify LAM behavior from x = 1 - k'/beta'.

    Case (i) when |x| <= tol, case (ii) when x < -1, case (iii) when
    tol < x <= 1; values in [-1, -tol) sit between cases and are reported
    as BOUNDARY together with the computed x.
    """
    if betaprime == 0.0:
        raise ValueError("betaprime must be positive: 1 - k'/beta' is undefined")
    x = 1.0 - kprime / betaprime
    if abs(x) <= tol:
        regime = LamRegime.COMPARABLE
    elif x < -1.0:
        regime = LamRegime.FRACTURE_DOMINATED
    elif x > tol:
        regime = LamRegime.ISOLATION_DOMINATED
    else:
        regime = LamRegime.BOUNDARY
    return LamClassification(regime=regime, one_minus_ratio=x)


def porosity_update(state, params):
    """Porosities from the current areas and film thickness.

    The anode carries the film-volume term; the cathode does not.  Values
    outside (0, 1) signal an unphysical parameter combination and raise.
    """
    eps_p = params.eps_p_0 + (state.a_ina_p - state.a_f_p) * params.R_p / 3.0
    eps_n = params.eps_n_0 + (state.a_ina_n - state.a_f_n) * params.R_n / 3.0 \
        - params.v_n * 3.0 * state.L_film / params.R_n
    if not 0.0 < eps_p < 1.0:
        raise PorosityError(f"cathode porosity {eps_p:.4g} outside (0, 1)")
    if not 0.0 < eps_n < 1.0:
        raise PorosityError(f"anode porosity {eps_n:.4g} outside (0, 1)")
    return eps_p, eps_n


def cycle_to_time_coefficients(k_cycle, beta_cycle, T_cycle):
    """Remap per-cycle fracture/isolation coefficients to per-second ones."""
    if not T_cycle > 0.0:
        raise ValueError("cycle duration must be positive")
    return k_cycle / T_cycle, beta_cycle / T_cycle
