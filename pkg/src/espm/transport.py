"""Electrolyte and solid-phase transport operations.

Axial arrays are ordered anode | separator | cathode with the anode current
collector at index 0 (the electrolyte-potential gauge lives there).  The
applied current is positive on discharge, which makes the anode pore-wall
flux positive and depletes the anode particle.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels as K
from .errors import SimulationError
from .parameters import pack_params, pack_tables


@dataclass(frozen=True)
class PoreWallFluxes:
    """Region-wise volumetric lithium sources in the electrolyte (mol/m3/s)."""

    J_p: float
    J_s: float
    J_n: float


@dataclass(frozen=True)
class ElectrolyteSolution:
    """Electrolyte potential profile and its lumped voltage contributions."""

    c_e: np.ndarray
    phi_e: np.ndarray
    R_el: float
    delta_phi_e: float
    phi_e_n: float


def pore_wall_fluxes(I, params):
    """Pore-wall fluxes for an applied current (A); J_s is identically 0."""
    denom = params.A_cell * params.F
    return PoreWallFluxes(
        J_p=-I / (denom * params.L_p),
        J_s=0.0,
        J_n=I / (denom * params.L_n))


def arrhenius_diffusivity(T, params, electrode):
    """Solid diffusivity with Arrhenius temperature correction.

    Uses exp(-E_a/R * (1/T - 1/T_ref)) so that D(T_ref) equals the
    reference value exactly.
    """
    if not T > 0.0:
        raise ValueError("temperature must be positive")
    ref = params.D_s_ref_p if electrode == "p" else params.D_s_ref_n
    ea = params.E_a_Ds_p if electrode == "p" else params.E_a_Ds_n
    return K.arrhenius(ref, ea, T, params.T_ref, params.R_gas)


def electrolyte_diffusivity(c_e, params, T=None):
    """Bulk electrolyte diffusivity correlation D(c, T)."""
    T = params.T if T is None else T
    fac = K.arrhenius(1.0, params.E_a_De, T, params.T_ref, params.R_gas)
    c = np.asarray(c_e, dtype=float)
    coeffs = np.asarray(params.D_e_poly)
    if c.ndim == 0:
        return K.poly_eval(coeffs, float(c)) * fac
    return np.array([K.poly_eval(coeffs, x) for x in c.ravel()]).reshape(c.shape) * fac


def electrolyte_conductivity(c_e, params, T=None):
    """Bulk electrolyte conductivity correlation kappa(c, T)."""
    T = params.T if T is None else T
    fac = K.arrhenius(1.0, params.E_a_kappa, T, params.T_ref, params.R_gas)
    c = np.asarray(c_e, dtype=float)
    coeffs = np.asarray(params.kappa_e_poly)
    if c.ndim == 0:
        return K.poly_eval(coeffs, float(c)) * fac
    return np.array([K.poly_eval(coeffs, x) for x in c.ravel()]).reshape(c.shape) * fac


def effective_coefficients(c_e, eps, params):
    """Bruggeman-scaled effective (D_eff, kappa_eff) for one region."""
    if not 0.0 < eps < 1.0:
        raise ValueError("porosity must lie in (0, 1)")
    scale = eps ** params.brugg
    return (electrolyte_diffusivity(c_e, params) * scale,
            electrolyte_conductivity(c_e, params) * scale)


def electrolyte_mass_rhs(state, fluxes, params, mesh):
    """dc_e/dt per axial cell for the current state.

    Zero-flux conditions hold at both collectors; interface fluxes between
    regions are continuous by the harmonic face conductances.  The fluxes
    argument fixes the applied current via J_n (J_s must be 0 and J_p is
    implied by the J formulas).
    """
    I = fluxes.J_n * params.A_cell * params.F * params.L_n
    de, _, _, _, _, _ = pack_tables(params)
    out, code = K.electrolyte_rhs(
        np.ascontiguousarray(state.c_e), pack_params(params), de,
        mesh.n_x_p, mesh.n_x_s, mesh.n_x_n, state.eps_p, state.eps_n, I)
    if code == K.ERR_NONPOSITIVE_CE:
        raise SimulationError("nonpositive electrolyte concentration encountered")
    return out


def solve_electrolyte_potential(c_e, fluxes, params, mesh, eps_p=None, eps_n=None):
    """Electrolyte potential with the gauge phi_e[0] = 0 at the anode
    collector, plus the lumped resistance R_el and the log-ratio diffusion
    overpotential delta_phi_e."""
    I = fluxes.J_n * params.A_cell * params.F * params.L_n
    eps_p = params.eps_p_0 if eps_p is None else eps_p
    eps_n = params.eps_n_0 if eps_n is None else eps_n
    _, ka, _, _, _, _ = pack_tables(params)
    phi, r_el, dphi, phi_en, code = K.solve_phi(
        np.ascontiguousarray(c_e, dtype=np.float64), pack_params(params), ka,
        mesh.n_x_p, mesh.n_x_s, mesh.n_x_n, eps_p, eps_n, I)
    if code == K.ERR_NONPOSITIVE_CE:
        raise SimulationError("nonpositive electrolyte concentration encountered")
    if code == K.ERR_SINGULAR:
        raise SimulationError("singular electrolyte charge system (degenerate kappa_eff)")
    return ElectrolyteSolution(c_e=np.asarray(c_e, dtype=float), phi_e=phi,
                               R_el=r_el, delta_phi_e=dphi, phi_e_n=phi_en)


def solid_diffusion_rhs(c_s, surface_flux, diffusivity, radius):
    """dc_s/dt per radial shell for a given surface flux (positive = into
    the particle); the center face is a symmetry condition."""
    if len(c_s) < 3:
        raise ValueError("need at least 3 radial shells")
    return K.solid_rhs(np.ascontiguousarray(c_s, dtype=np.float64),
                       float(surface_flux), float(diffusivity), float(radius))


def solid_average_concentration(c_s, radius):
    return K.solid_avg(np.ascontiguousarray(c_s, dtype=np.float64), float(radius))


def solid_surface_concentration(c_s, diffusivity, radius, surface_flux):
    return K.solid_surface(np.ascontiguousarray(c_s, dtype=np.float64),
                           float(diffusivity), float(radius), float(surface_flux))


def electrolyte_total_lithium(state, params, mesh):
    """sum(eps * c * dV) over all axial cells (mol); conserved at any
    constant current while porosities are constant."""
    widths = np.concatenate([
        np.full(mesh.n_x_n, params.L_n / mesh.n_x_n),
        np.full(mesh.n_x_s, params.L_s / mesh.n_x_s),
        np.full(mesh.n_x_p, params.L_p / mesh.n_x_p)])
    eps = np.concatenate([
        np.full(mesh.n_x_n, state.eps_n),
        np.full(mesh.n_x_s, params.eps_s),
        np.full(mesh.n_x_p, state.eps_p)])
    return float(np.sum(eps * state.c_e * widths) * params.A_cell)


def step_electrolyte(state, I, dt, params, mesh):
    """Implicit electrolyte update used by the cell driver (returns new c_e)."""
    de, _, _, _, _, _ = pack_tables(params)
    new, code = K.electrolyte_step(
        np.ascontiguousarray(state.c_e), pack_params(params), de,
        mesh.n_x_p, mesh.n_x_s, mesh.n_x_n, state.eps_p, state.eps_n, I, dt)
    if code == K.ERR_NONPOSITIVE_CE:
        raise SimulationError("nonpositive electrolyte concentration encountered")
    if code == K.ERR_SINGULAR:
        raise SimulationError("singular electrolyte mass system")
    return new


def step_solid(c_s, surface_flux, diffusivity, radius, dt):
    """Implicit spherical-diffusion update (returns new shell values)."""
    new = K.solid_step(np.ascontiguousarray(c_s, dtype=np.float64),
                       float(diffusivity), float(radius), float(surface_flux),
                       float(dt))
    if not np.all(np.isfinite(new)):
        raise SimulationError("singular solid diffusion system")
    return new
