"""Compiled per-timestep numerics.

Every hot routine operates on plain float64 arrays so that the public
operation wrappers and the constant-current driver share a single numerical
code path.  The layout contracts (parameter-vector indices, scalar-state
indices, trace columns, status codes) are defined once here and imported by
the wrapper modules.

Set NUMBA_DISABLE_JIT=1 to run everything in plain Python (slow, same
results).
"""

import math

import numpy as np
from numba import njit

_JIT = dict(cache=True, nogil=True)

# ---------------------------------------------------------------------------
# parameter vector layout (packed by parameters.pack_params)
# ---------------------------------------------------------------------------
P_A_CELL = 0
P_L_P = 1
P_L_S = 2
P_L_N = 3
P_R_P = 4
P_R_N = 5
P_T_PLUS = 6
P_BRUGG = 7
P_DS_REF_P = 8
P_DS_REF_N = 9
P_EA_DS_P = 10
P_EA_DS_N = 11
P_K_P = 12
P_K_N = 13
P_ALPHA = 14
P_I0_PL = 15
P_K_F = 16
P_EA_KF = 17
P_C_SOLV = 18
P_V_P = 19
P_V_N = 20
P_VF_P = 21
P_VF_N = 22
P_CSMAX_P = 23
P_CSMAX_N = 24
P_TH_P0 = 25
P_TH_P100 = 26
P_TH_N0 = 27
P_TH_N100 = 28
P_BETA = 29
P_KPRIME_P = 30
P_KPRIME_N = 31
P_BPRIME_P = 32
P_BPRIME_N = 33
P_M_SEI = 34
P_M_LI = 35
P_RHO_SEI = 36
P_RHO_LI = 37
P_KAPPA_SEI = 38
P_R_L = 39
P_T = 40
P_T_REF = 41
P_F = 42
P_R_GAS = 43
P_EPS_S = 44
P_CE_INIT = 45
P_EA_DE = 46
P_EA_KAPPA = 47
N_PARAMS = 48

# ---------------------------------------------------------------------------
# scalar state vector layout (packed by state.pack_state)
# ---------------------------------------------------------------------------
S_C_SEI = 0
S_C_LI = 1
S_L_SEI = 2
S_L_LI = 3
S_AF_P = 4
S_AF_N = 5
S_AINA_P = 6
S_AINA_N = 7
S_AT_P = 8
S_AT_N = 9
S_EPS_P = 10
S_EPS_N = 11
S_TIME = 12
N_SCALARS = 13

# trace columns written by run_cc
C_T = 0
C_V = 1
C_SOC_N = 2
C_SOC_P = 3
C_ETA_P = 4
C_ETA_N = 5
C_PHI_SN = 6
C_DPHI_E = 7
C_R_FILM = 8
C_R_EL = 9
C_J_INT = 10
C_J_SEI = 11
C_J_PL = 12
N_COLS = 13

# status codes: positive = clean termination, negative = hard failure
OK = 0
TERM_CUTOFF = 1
TERM_MAX_TIME = 2
TERM_SATURATION = 3
ERR_NONPOSITIVE_CE = -1
ERR_POROSITY = -2
ERR_NONFINITE_V = -3
ERR_SINGULAR = -4
ERR_AREA = -5


@njit(**_JIT)
def thomas(lo, di, up, rhs):
    """Solve a tridiagonal system; lo[0] and up[-1] are ignored.

    A singular pivot produces inf/nan which callers detect with isfinite.
    """
    n = di.shape[0]
    cp = np.empty(n)
    dp = np.empty(n)
    x = np.empty(n)
    cp[0] = up[0] / di[0]
    dp[0] = rhs[0] / di[0]
    for i in range(1, n):
        m = di[i] - lo[i] * cp[i - 1]
        cp[i] = up[i] / m
        dp[i] = (rhs[i] - lo[i] * dp[i - 1]) / m
    x[n - 1] = dp[n - 1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


@njit(**_JIT)
def poly_eval(coeffs, x):
    """Polynomial with ascending coefficients: c0 + c1*x + c2*x**2 + ..."""
    acc = 0.0
    for i in range(coeffs.shape[0] - 1, -1, -1):
        acc = acc * x + coeffs[i]
    return acc


@njit(**_JIT)
def pchip_eval(xk, ck, x):
    """Evaluate monotone piecewise-cubic coefficients ck (4, m-1) at x.

    ck follows the scipy PPoly convention (highest power first, local
    variable x - xk[i]).  x is clamped to the table range.
    """
    m = xk.shape[0]
    if x <= xk[0]:
        x = xk[0]
    elif x >= xk[m - 1]:
        x = xk[m - 1]
    lo = 0
    hi = m - 1
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if xk[mid] <= x:
            lo = mid
        else:
            hi = mid
    t = x - xk[lo]
    return ((ck[0, lo] * t + ck[1, lo]) * t + ck[2, lo]) * t + ck[3, lo]


@njit(**_JIT)
def arrhenius(ref, ea, T, T_ref, R_gas):
    return ref * math.exp(-ea / R_gas * (1.0 / T - 1.0 / T_ref))


# ---------------------------------------------------------------------------
# solid phase: spherical finite volumes, shells of equal thickness
# ---------------------------------------------------------------------------

@njit(**_JIT)
def solid_avg(cs, radius):
    """Volume-weighted average concentration of the particle."""
    n = cs.shape[0]
    dr = radius / n
    acc = 0.0
    for j in range(n):
        r_in = j * dr
        r_out = r_in + dr
        acc += (r_out ** 3 - r_in ** 3) * cs[j]
    return acc / radius ** 3


@njit(**_JIT)
def solid_surface(cs, diffusivity, radius, flux):
    """Surface concentration from the outer cell and the imposed gradient."""
    n = cs.shape[0]
    dr = radius / n
    return cs[n - 1] + 0.5 * dr * flux / diffusivity


@njit(**_JIT)
def solid_rhs(cs, flux, diffusivity, radius):
    """dc/dt of each shell for a given surface flux (positive = into the
    particle).  Interior faces use two-point fluxes; the center is a
    symmetry face."""
    n = cs.shape[0]
    dr = radius / n
    out = np.empty(n)
    for j in range(n):
        r_in = j * dr
        r_out = r_in + dr
        vol = (r_out ** 3 - r_in ** 3) / 3.0
        f_in = 0.0
        if j > 0:
            f_in = diffusivity * (cs[j] - cs[j - 1]) / dr
        if j < n - 1:
            f_out = diffusivity * (cs[j + 1] - cs[j]) / dr
        else:
            f_out = flux
        out[j] = (r_out * r_out * f_out - r_in * r_in * f_in) / vol
    return out


@njit(**_JIT)
def solid_step(cs, diffusivity, radius, flux, dt):
    """Backward-Euler update of the shell concentrations (conservative)."""
    n = cs.shape[0]
    dr = radius / n
    lo = np.zeros(n)
    di = np.zeros(n)
    up = np.zeros(n)
    rhs = np.zeros(n)
    for j in range(n):
        r_in = j * dr
        r_out = r_in + dr
        vol = (r_out ** 3 - r_in ** 3) / 3.0
        m = vol / dt
        di[j] += m
        rhs[j] = m * cs[j]
        if j > 0:
            g = diffusivity * r_in * r_in / dr
            di[j] += g
            lo[j] -= g
        if j < n - 1:
            g = diffusivity * r_out * r_out / dr
            di[j] += g
            up[j] -= g
    rhs[n - 1] += radius * radius * flux
    return thomas(lo, di, up, rhs)


# ---------------------------------------------------------------------------
# electrolyte: anode | separator | cathode finite volumes, anode at x = 0
# ---------------------------------------------------------------------------

@njit(**_JIT)
def _cell_geometry(pvec, nxp, nxs, nxn, eps_p, eps_n, I, k):
    """Width, porosity and (1 - t+)*J source of axial cell k."""
    a_cell = pvec[P_A_CELL]
    faraday = pvec[P_F]
    tp = pvec[P_T_PLUS]
    if k < nxn:
        return (pvec[P_L_N] / nxn, eps_n,
                (1.0 - tp) * I / (a_cell * faraday * pvec[P_L_N]))
    if k < nxn + nxs:
        return pvec[P_L_S] / nxs, pvec[P_EPS_S], 0.0
    return (pvec[P_L_P] / nxp, eps_p,
            -(1.0 - tp) * I / (a_cell * faraday * pvec[P_L_P]))


@njit(**_JIT)
def electrolyte_rhs(ce, pvec, de_coeffs, nxp, nxs, nxn, eps_p, eps_n, I):
    """dc/dt of each axial cell; returns (array, status code)."""
    n = ce.shape[0]
    out = np.zeros(n)
    dx = np.empty(n)
    eps = np.empty(n)
    src = np.empty(n)
    deff = np.empty(n)
    T = pvec[P_T]
    fac = math.exp(-pvec[P_EA_DE] / pvec[P_R_GAS] * (1.0 / T - 1.0 / pvec[P_T_REF]))
    for k in range(n):
        if ce[k] <= 0.0:
            return out, ERR_NONPOSITIVE_CE
        w, e, s = _cell_geometry(pvec, nxp, nxs, nxn, eps_p, eps_n, I, k)
        dx[k] = w
        eps[k] = e
        src[k] = s
        deff[k] = poly_eval(de_coeffs, ce[k]) * fac * e ** pvec[P_BRUGG]
    for k in range(n):
        div = src[k] * dx[k]
        if k > 0:
            g = 1.0 / (0.5 * dx[k - 1] / deff[k - 1] + 0.5 * dx[k] / deff[k])
            div -= g * (ce[k] - ce[k - 1])
        if k < n - 1:
            g = 1.0 / (0.5 * dx[k] / deff[k] + 0.5 * dx[k + 1] / deff[k + 1])
            div += g * (ce[k + 1] - ce[k])
        out[k] = div / (eps[k] * dx[k])
    return out, OK


@njit(**_JIT)
def electrolyte_step(ce, pvec, de_coeffs, nxp, nxs, nxn, eps_p, eps_n, I, dt):
    """Backward-Euler update with coefficients lagged at the old state.

    The scheme is in divergence form with zero-flux ends, so the discrete
    total lithium  sum(eps*c*dx)  is conserved exactly whenever the region
    sources cancel (they do: L_n*J_n + L_p*J_p = 0).
    """
    n = ce.shape[0]
    dx = np.empty(n)
    eps = np.empty(n)
    src = np.empty(n)
    deff = np.empty(n)
    T = pvec[P_T]
    fac = math.exp(-pvec[P_EA_DE] / pvec[P_R_GAS] * (1.0 / T - 1.0 / pvec[P_T_REF]))
    for k in range(n):
        if ce[k] <= 0.0:
            return ce, ERR_NONPOSITIVE_CE
        w, e, s = _cell_geometry(pvec, nxp, nxs, nxn, eps_p, eps_n, I, k)
        dx[k] = w
        eps[k] = e
        src[k] = s
        deff[k] = poly_eval(de_coeffs, ce[k]) * fac * e ** pvec[P_BRUGG]
    lo = np.zeros(n)
    di = np.zeros(n)
    up = np.zeros(n)
    rhs = np.zeros(n)
    for k in range(n):
        m = eps[k] * dx[k] / dt
        di[k] += m
        rhs[k] = m * ce[k] + src[k] * dx[k]
        if k > 0:
            g = 1.0 / (0.5 * dx[k - 1] / deff[k - 1] + 0.5 * dx[k] / deff[k])
            di[k] += g
            lo[k] -= g
        if k < n - 1:
            g = 1.0 / (0.5 * dx[k] / deff[k] + 0.5 * dx[k + 1] / deff[k + 1])
            di[k] += g
            up[k] -= g
    new = thomas(lo, di, up, rhs)
    for k in range(n):
        if not math.isfinite(new[k]):
            return ce, ERR_SINGULAR
        if new[k] <= 0.0:
            return ce, ERR_NONPOSITIVE_CE
    return new, OK


@njit(**_JIT)
def solve_phi(ce, pvec, ka_coeffs, nxp, nxs, nxn, eps_p, eps_n, I):
    """Electrolyte potential, lumped resistance and diffusion overpotential.

    Solves div(kappa_eff * grad(phi)) + fac * div(kappa_eff * grad(ln c))
    + F*J = 0 with zero total current at both collectors and the gauge
    phi[0] = 0 at the anode collector.

    Returns (phi, R_el, delta_phi_e, phi_e_anode_avg, code).
    """
    n = ce.shape[0]
    phi = np.zeros(n)
    T = pvec[P_T]
    r_gas = pvec[P_R_GAS]
    faraday = pvec[P_F]
    fac_arr = math.exp(-pvec[P_EA_KAPPA] / r_gas * (1.0 / T - 1.0 / pvec[P_T_REF]))
    fac_diff = 2.0 * r_gas * T * (1.0 - pvec[P_T_PLUS]) / faraday

    dx = np.empty(n)
    keff = np.empty(n)
    src = np.empty(n)
    for k in range(n):
        if ce[k] <= 0.0:
            return phi, 0.0, 0.0, 0.0, ERR_NONPOSITIVE_CE
        w, e, s = _cell_geometry(pvec, nxp, nxs, nxn, eps_p, eps_n, I, k)
        dx[k] = w
        kap = poly_eval(ka_coeffs, ce[k]) * fac_arr * e ** pvec[P_BRUGG]
        if kap <= 0.0 or not math.isfinite(kap):
            return phi, 0.0, 0.0, 0.0, ERR_SINGULAR
        keff[k] = kap
        # F*J per unit area of cell k; _cell_geometry returns (1-t+)*J
        src[k] = s / (1.0 - pvec[P_T_PLUS]) * faraday

    lo = np.zeros(n)
    di = np.zeros(n)
    up = np.zeros(n)
    rhs = np.zeros(n)
    for k in range(n):
        rhs[k] = src[k] * dx[k]
        if k > 0:
            g = 1.0 / (0.5 * dx[k - 1] / keff[k - 1] + 0.5 * dx[k] / keff[k])
            di[k] += g
            lo[k] -= g
            rhs[k] += fac_diff * g * (math.log(ce[k]) - math.log(ce[k - 1]))
        if k < n - 1:
            g = 1.0 / (0.5 * dx[k] / keff[k] + 0.5 * dx[k + 1] / keff[k + 1])
            di[k] += g
            up[k] -= g
            rhs[k] -= fac_diff * g * (math.log(ce[k + 1]) - math.log(ce[k]))
    # gauge at the anode collector
    di[0] = 1.0
    up[0] = 0.0
    rhs[0] = 0.0
    phi = thomas(lo, di, up, rhs)
    for k in range(n):
        if not math.isfinite(phi[k]):
            return phi, 0.0, 0.0, 0.0, ERR_SINGULAR

    # lumped electrolyte resistance from region-average concentrations
    cn = 0.0
    for k in range(nxn):
        cn += ce[k]
    cn /= nxn
    cs = 0.0
    for k in range(nxn, nxn + nxs):
        cs += ce[k]
    cs /= nxs
    cp = 0.0
    for k in range(nxn + nxs, n):
        cp += ce[k]
    cp /= nxp
    kn = poly_eval(ka_coeffs, cn) * fac_arr * eps_n ** pvec[P_BRUGG]
    ks = poly_eval(ka_coeffs, cs) * fac_arr * pvec[P_EPS_S] ** pvec[P_BRUGG]
    kp = poly_eval(ka_coeffs, cp) * fac_arr * eps_p ** pvec[P_BRUGG]
    if kn <= 0.0 or ks <= 0.0 or kp <= 0.0:
        return phi, 0.0, 0.0, 0.0, ERR_SINGULAR
    r_el = (pvec[P_L_N] / kn + 2.0 * pvec[P_L_S] / ks + pvec[P_L_P] / kp) \
        / (2.0 * pvec[P_A_CELL])

    delta_phi = fac_diff * math.log(ce[n - 1] / ce[0])

    phi_en = 0.0
    for k in range(nxn):
        phi_en += phi[k]
    phi_en /= nxn
    return phi, r_el, delta_phi, phi_en, OK


# ---------------------------------------------------------------------------
# full cell step
# ---------------------------------------------------------------------------

@njit(**_JIT)
def algebra(cs_p, cs_n, ce, sc, pvec, de_c, ka_c,
            ocpn_x, ocpn_c, ocpp_x, ocpp_c, nxp, nxs, nxn, I):
    """All algebraic outputs of the cell model at the current state.

    Returns (code, V, soc_n, soc_p, eta_p, eta_n, phi_sn, dphi_e, r_film,
    r_el, j_int, j_sei, j_pl, flux_residual).
    """
    zero = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    a_cell = pvec[P_A_CELL]
    faraday = pvec[P_F]
    r_gas = pvec[P_R_GAS]
    T = pvec[P_T]
    t_ref = pvec[P_T_REF]
    l_n = pvec[P_L_N]
    l_p = pvec[P_L_P]
    at_p = sc[S_AT_P]
    at_n = sc[S_AT_N]
    if at_p <= 0.0 or at_n <= 0.0:
        return (ERR_AREA,) + zero

    ds_p = arrhenius(pvec[P_DS_REF_P], pvec[P_EA_DS_P], T, t_ref, r_gas)
    ds_n = arrhenius(pvec[P_DS_REF_N], pvec[P_EA_DS_N], T, t_ref, r_gas)

    # Surface values are extrapolated with the applied-current flux; the
    # side-current correction enters only the PDE boundary flux (it is a
    # ~1e-4 relative effect on the extrapolation itself).
    q_n0 = -(I / (a_cell * l_n)) / (at_n * faraday)
    q_p0 = (I / (a_cell * l_p)) / (at_p * faraday)
    csn_avg = solid_avg(cs_n, pvec[P_R_N])
    csp_avg = solid_avg(cs_p, pvec[P_R_P])
    csn_surf = solid_surface(cs_n, ds_n, pvec[P_R_N], q_n0)
    csp_surf = solid_surface(cs_p, ds_p, pvec[P_R_P], q_p0)
    csmax_n = pvec[P_CSMAX_N]
    csmax_p = pvec[P_CSMAX_P]
    if csn_surf <= 0.0 or csn_surf >= csmax_n or csn_avg <= 0.0 \
            or csp_surf <= 0.0 or csp_surf >= csmax_p or csp_avg <= 0.0:
        return (TERM_SATURATION,) + zero

    th_n = csn_surf / csmax_n
    th_p = csp_surf / csmax_p
    soc_n = (th_n - pvec[P_TH_N0]) / (pvec[P_TH_N100] - pvec[P_TH_N0])
    soc_p = (pvec[P_TH_P0] - th_p) / (pvec[P_TH_P0] - pvec[P_TH_P100])
    u_n = pchip_eval(ocpn_x, ocpn_c, th_n)
    u_p = pchip_eval(ocpp_x, ocpp_c, th_p)

    i0_n = pvec[P_K_N] * faraday * math.sqrt(csn_avg * csn_surf * (csmax_n - csn_surf))
    i0_p = pvec[P_K_P] * faraday * math.sqrt(csp_avg * csp_surf * (csmax_p - csp_surf))
    two_rt_f = 2.0 * r_gas * T / faraday
    eta_n = two_rt_f * math.asinh(I / (2.0 * a_cell * at_n * l_n * i0_n))
    eta_p = two_rt_f * math.asinh(-I / (2.0 * a_cell * at_p * l_p * i0_p))

    r_film = sc[S_L_SEI] / (at_n * a_cell * l_n * pvec[P_KAPPA_SEI])
    phi_sn = u_n + eta_n + r_film * I

    phi, r_el, dphi_e, phi_en, code = solve_phi(
        ce, pvec, ka_c, nxp, nxs, nxn, sc[S_EPS_P], sc[S_EPS_N], I)
    if code != OK:
        return (code,) + zero

    drive = phi_sn - phi_en - r_film * I
    j_sei = 0.0
    j_pl = 0.0
    k_f = pvec[P_K_F]
    i0_pl = pvec[P_I0_PL]
    if k_f > 0.0 or i0_pl > 0.0:
        ex = math.exp(-pvec[P_ALPHA] * faraday / (r_gas * T) * drive)
        if k_f > 0.0:
            kf_T = arrhenius(k_f, pvec[P_EA_KF], T, t_ref, r_gas)
            j_sei = -faraday * at_n * kf_T * pvec[P_C_SOLV] * ex
        if i0_pl > 0.0:
            j_pl = -2.0 * at_n * i0_pl * ex

    j_tot = I / (a_cell * l_n)
    j_int = j_tot - j_sei - j_pl
    # recomputed with the identical grouping: zero by construction
    residual = (j_tot - j_sei - j_pl) - j_int

    v_cell = u_p - u_n + eta_p - eta_n + dphi_e \
        - I * (pvec[P_R_L] + r_el + r_film)
    if not math.isfinite(v_cell):
        return (ERR_NONFINITE_V,) + zero
    return (OK, v_cell, soc_n, soc_p, eta_p, eta_n, phi_sn, dphi_e,
            r_film, r_el, j_int, j_sei, j_pl, residual)


@njit(**_JIT)
def advance(cs_p, cs_n, ce, sc, pvec, de_c, nxp, nxs, nxn,
            I, dt, j_int, j_sei, j_pl):
    """Advance PDEs and aging ODEs by dt, in place.  Returns a status code.

    Solid/electrolyte updates are implicit; species, film and inactive-area
    updates are explicit with the rates held at the step start.
    """
    a_cell = pvec[P_A_CELL]
    faraday = pvec[P_F]
    r_gas = pvec[P_R_GAS]
    T = pvec[P_T]
    t_ref = pvec[P_T_REF]
    ds_p = arrhenius(pvec[P_DS_REF_P], pvec[P_EA_DS_P], T, t_ref, r_gas)
    ds_n = arrhenius(pvec[P_DS_REF_N], pvec[P_EA_DS_N], T, t_ref, r_gas)

    q_n = -j_int / (sc[S_AT_N] * faraday)
    q_p = (I / (a_cell * pvec[P_L_P])) / (sc[S_AT_P] * faraday)
    new_n = solid_step(cs_n, ds_n, pvec[P_R_N], q_n, dt)
    new_p = solid_step(cs_p, ds_p, pvec[P_R_P], q_p, dt)
    for j in range(new_n.shape[0]):
        if not math.isfinite(new_n[j]):
            return ERR_SINGULAR
    for j in range(new_p.shape[0]):
        if not math.isfinite(new_p[j]):
            return ERR_SINGULAR

    new_ce, code = electrolyte_step(ce, pvec, de_c, nxp, nxs, nxn,
                                    sc[S_EPS_P], sc[S_EPS_N], I, dt)
    if code != OK:
        return code

    # side species and film thicknesses (T.7 rates, explicit)
    beta = pvec[P_BETA]
    dc_sei = -(j_sei / (2.0 * faraday) + j_pl * beta / (2.0 * faraday))
    dc_li = -j_pl * (1.0 - beta) / (2.0 * faraday)
    at_n_old = sc[S_AT_N]
    sc[S_C_SEI] += dt * dc_sei
    sc[S_C_LI] += dt * dc_li
    sc[S_L_SEI] += dt * dc_sei * pvec[P_M_SEI] / (pvec[P_RHO_SEI] * at_n_old)
    sc[S_L_LI] += dt * dc_li * pvec[P_M_LI] / (pvec[P_RHO_LI] * at_n_old)

    # fracture area is algebraic in t, inactive area is explicit Euler
    t_new = sc[S_TIME] + dt
    a_p = 3.0 / pvec[P_R_P]
    a_n = 3.0 / pvec[P_R_N]
    sc[S_AINA_P] += dt * pvec[P_BPRIME_P] * sc[S_AT_P]
    sc[S_AINA_N] += dt * pvec[P_BPRIME_N] * sc[S_AT_N]
    sc[S_AF_P] = a_p * pvec[P_KPRIME_P] * t_new
    sc[S_AF_N] = a_n * pvec[P_KPRIME_N] * t_new
    sc[S_AT_P] = a_p + sc[S_AF_P] - sc[S_AINA_P]
    sc[S_AT_N] = a_n + sc[S_AF_N] - sc[S_AINA_N]
    sc[S_TIME] = t_new

    # porosity (T.3), film term on the anode only
    eps_p0 = 1.0 - pvec[P_V_P] - pvec[P_VF_P]
    eps_n0 = 1.0 - pvec[P_V_N] - pvec[P_VF_N]
    l_film = sc[S_L_SEI] + sc[S_L_LI]
    eps_p = eps_p0 + (sc[S_AINA_P] - sc[S_AF_P]) * pvec[P_R_P] / 3.0
    eps_n = eps_n0 + (sc[S_AINA_N] - sc[S_AF_N]) * pvec[P_R_N] / 3.0 \
        - pvec[P_V_N] * 3.0 * l_film / pvec[P_R_N]
    if eps_p <= 0.0 or eps_p >= 1.0 or eps_n <= 0.0 or eps_n >= 1.0:
        return ERR_POROSITY
    sc[S_EPS_P] = eps_p
    sc[S_EPS_N] = eps_n

    for j in range(new_n.shape[0]):
        cs_n[j] = new_n[j]
    for j in range(new_p.shape[0]):
        cs_p[j] = new_p[j]
    for k in range(new_ce.shape[0]):
        ce[k] = new_ce[k]
    return OK


@njit(**_JIT)
def run_cc(cs_p, cs_n, ce, sc, pvec, de_c, ka_c,
           ocpn_x, ocpn_c, ocpp_x, ocpp_c, nxp, nxs, nxn,
           I, dt, v_cutoff, use_cutoff, t_end, trace):
    """Constant-current driver.

    Records one trace row per step start, beginning at the initial state,
    and stops on cutoff crossing, t_end, saturation or a hard error.  The
    state arrays are left at the last recorded instant's successor only when
    stepping succeeded.  Returns (rows_written, code, max |flux residual|).
    """
    n_max = trace.shape[0]
    rows = 0
    max_resid = 0.0
    while True:
        (code, v, soc_n, soc_p, eta_p, eta_n, phi_sn, dphi_e, r_film,
         r_el, j_int, j_sei, j_pl, resid) = algebra(
            cs_p, cs_n, ce, sc, pvec, de_c, ka_c,
            ocpn_x, ocpn_c, ocpp_x, ocpp_c, nxp, nxs, nxn, I)
        if code != OK:
            return rows, code, max_resid
        trace[rows, C_T] = sc[S_TIME]
        trace[rows, C_V] = v
        trace[rows, C_SOC_N] = soc_n
        trace[rows, C_SOC_P] = soc_p
        trace[rows, C_ETA_P] = eta_p
        trace[rows, C_ETA_N] = eta_n
        trace[rows, C_PHI_SN] = phi_sn
        trace[rows, C_DPHI_E] = dphi_e
        trace[rows, C_R_FILM] = r_film
        trace[rows, C_R_EL] = r_el
        trace[rows, C_J_INT] = j_int
        trace[rows, C_J_SEI] = j_sei
        trace[rows, C_J_PL] = j_pl
        rows += 1
        if abs(resid) > max_resid:
            max_resid = abs(resid)
        if use_cutoff:
            if I > 0.0 and v <= v_cutoff:
                return rows, TERM_CUTOFF, max_resid
            if I < 0.0 and v >= v_cutoff:
                return rows, TERM_CUTOFF, max_resid
        if sc[S_TIME] >= t_end - 0.5 * dt or rows >= n_max:
            return rows, TERM_MAX_TIME, max_resid
        code = advance(cs_p, cs_n, ce, sc, pvec, de_c, nxp, nxs, nxn,
                       I, dt, j_int, j_sei, j_pl)
        if code != OK:
            return rows, code, max_resid


@njit(**_JIT)
def lam_integrate(a0, kprime, bprime, t0, t1, af0, aina0, dt):
    """Explicit-Euler integration of the inactive-area ODE from t0 to t1.

    The fracture area is algebraic (a0*kprime*t); only da_ina/dt =
    bprime * a_t is integrated.  Returns (a_f, a_ina, a_t) at t1.
    """
    t = t0
    af = af0
    aina = aina0
    at = a0 + af - aina
    while t < t1 - 1e-12:
        step = dt
        if t + step > t1:
            step = t1 - t
        aina += step * bprime * at
        t += step
        af = a0 * kprime * t
        at = a0 + af - aina
    return af, aina, at
