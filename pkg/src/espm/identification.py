"""Weighted-RMSE cost and the two-phase parameter-identification protocol.

Phase one fits the fresh-cell vector (geometry, kinetics, transport and
100%-stoichiometries) with both side reactions forced off.  Phase two holds
those values fixed and fits the film ratio L_SEI/kappa_SEI plus the two
aging-sensitive stoichiometries against aged-cell data; lithium plating is
activated only for the late-life dataset.
"""

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .cell import run_constant_current
from .errors import DatasetError, OptimizationError, SimulationError
from .parameters import substituted
from .pso import PsoConfig, pso_minimize
from .state import initial_state

log = logging.getLogger("espm.identification")

PENALTY_BASE = 1.0e3

PHASES = ("fresh", "aged1000", "aged3300")

# phase -> (field substitutions are positional by spec name)
FRESH_NAMES = ("A_cell", "R_l", "v_n", "R_p", "R_n",
               "D_s_ref_p", "D_s_ref_n", "theta_p_100", "theta_n_100")
AGED_NAMES = ("film_ratio", "theta_p_0", "theta_n_100")


@dataclass(frozen=True)
class ParameterSpec:
    """One searched parameter: bounds and an initial guess.

    Guesses outside the bounds are projected onto them with a warning (a
    published guess can disagree with its own printed bounds).
    """

    name: str
    lower: float
    upper: float
    guess: float

    def __post_init__(self):
        if not self.lower < self.upper:
            raise OptimizationError(f"{self.name}: lower bound must be below upper")
        if not self.lower <= self.guess <= self.upper:
            projected = min(max(self.guess, self.lower), self.upper)
            log.warning("guess %.6g for %s outside [%g, %g]; projected to %.6g",
                        self.guess, self.name, self.lower, self.upper, projected)
            object.__setattr__(self, "guess", projected)


@dataclass
class ExperimentalDataset:
    """Constant-current voltage samples over time/capacity.

    Samples are kept sorted by time, so the cost is invariant under any
    reordering of the input rows.
    """

    t_s: np.ndarray
    capacity_Ah: np.ndarray
    voltage_V: np.ndarray
    current_A: float
    temperature_K: float = 298.15
    cycle_label: str = "fresh"

    def __post_init__(self):
        order = np.argsort(self.t_s, kind="stable")
        self.t_s = np.asarray(self.t_s, dtype=float)[order]
        self.capacity_Ah = np.asarray(self.capacity_Ah, dtype=float)[order]
        self.voltage_V = np.asarray(self.voltage_V, dtype=float)[order]
        if self.t_s.size < 10:
            raise DatasetError("dataset needs at least 10 samples")
        if np.any(np.diff(self.capacity_Ah) < 0):
            raise DatasetError("capacity axis must be monotone")
        if self.current_A == 0.0:
            raise DatasetError("dataset current must be nonzero")

    @classmethod
    def from_csv(cls, path, current_A, temperature_K=298.15, cycle_label="fresh"):
        """Load ``capacity_Ah,voltage_V`` or ``t_s,voltage_V`` samples."""
        path = Path(path)
        if not path.exists():
            raise DatasetError(f"dataset file not found: {path}")
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DatasetError(f"{path}: empty file") from None
            header = [h.strip() for h in header]
            rows = []
            for lineno, row in enumerate(reader, start=2):
                if not row:
                    continue
                try:
                    rows.append([float(v) for v in row[:2]])
                except ValueError as exc:
                    raise DatasetError(f"{path}:{lineno}: {exc}") from exc
        if not rows:
            raise DatasetError(f"{path}: no data rows")
        data = np.asarray(rows)
        if header[:2] == ["capacity_Ah", "voltage_V"]:
            cap = data[:, 0]
            t = cap * 3600.0 / current_A
        elif header[:2] == ["t_s", "voltage_V"]:
            t = data[:, 0]
            cap = t * current_A / 3600.0
        else:
            raise DatasetError(
                f"{path}: header must be 'capacity_Ah,voltage_V' or 't_s,voltage_V'")
        return cls(t_s=t, capacity_Ah=cap, voltage_V=data[:, 1],
                   current_A=current_A, temperature_K=temperature_K,
                   cycle_label=cycle_label)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["capacity_Ah", "voltage_V"])
            for c, v in zip(self.capacity_Ah, self.voltage_V):
                w.writerow([repr(float(c)), repr(float(v))])


@dataclass
class IdentificationProblem:
    """Everything a cost evaluation needs.

    ``capacity_base`` is the Coulomb-counting normalization for the
    experimental SOC; by default the dataset's own full-discharge
    throughput (a full discharge spans SOC 1 -> 0).
    """

    phase: str
    specs: list
    dataset: ExperimentalDataset
    base_params: object
    mesh: object
    weights: tuple = (1.0, 1.0, 1.0)
    dt_s: float = 1.0
    soc0: float = 1.0
    capacity_base: float = None

    def __post_init__(self):
        if self.phase not in PHASES:
            raise OptimizationError(f"unknown phase {self.phase!r}")
        expected = FRESH_NAMES if self.phase == "fresh" else AGED_NAMES
        got = tuple(s.name for s in self.specs)
        if got != tuple(expected):
            raise OptimizationError(
                f"phase {self.phase} expects parameters {expected}, got {got}")
        if self.capacity_base is None:
            self.capacity_base = float(self.dataset.capacity_Ah[-1])

    def lower(self):
        return np.array([s.lower for s in self.specs])

    def upper(self):
        return np.array([s.upper for s in self.specs])

    def guess(self):
        return np.array([s.guess for s in self.specs])


def soc_exp_from_coulomb_counting(dataset, capacity_nominal, soc0=1.0):
    """Experimental SOC series: soc0 - I*t/(3600*capacity_nominal)."""
    return soc0 - dataset.current_A * dataset.t_s / (3600.0 * capacity_nominal)


def weighted_rmse_cost(v_sim, v_exp, socn_sim, socn_exp, socp_sim, socp_exp,
                       w1=1.0, w2=1.0, w3=1.0):
    """Sum of three per-channel root-mean-square errors."""
    def rmse(a, b):
        d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
        return float(np.sqrt(np.mean(d * d)))
    return w1 * rmse(v_sim, v_exp) + w2 * rmse(socn_sim, socn_exp) \
        + w3 * rmse(socp_sim, socp_exp)


def apply_phase_values(problem, values):
    """Substitute one candidate vector into the base parameters.

    Returns (params, initial film thickness).  Fresh candidates force both
    side reactions off; aged candidates carry the film as an initial SEI
    thickness ratio*kappa_SEI so R_film matches the searched ratio, with
    plating active only in the late-life phase.
    """
    base = problem.base_params
    if problem.phase == "fresh":
        subs = dict(zip(FRESH_NAMES, (float(v) for v in values)))
        subs["k_f"] = 0.0
        subs["i0_pl"] = 0.0
        return substituted(base, **subs), 0.0
    ratio, theta_p_0, theta_n_100 = (float(v) for v in values)
    subs = {"theta_p_0": theta_p_0, "theta_n_100": theta_n_100}
    if problem.phase == "aged1000":
        subs["i0_pl"] = 0.0
    return substituted(base, **subs), ratio * base.kappa_SEI


def cost(values, problem):
    """Eq.-style weighted RMSE of voltage and both SOCs on the dataset grid.

    A candidate that cannot complete the dataset horizon (saturation or a
    hard simulation failure) receives a finite penalty that grows with the
    missing fraction of the horizon, keeping the search informative.
    """
    ds = problem.dataset
    t_end = float(ds.t_s[-1])
    try:
        params, film = apply_phase_values(problem, values)
        init = initial_state(params, problem.mesh, problem.soc0, L_SEI0=film)
        trace = run_constant_current(
            params, problem.mesh, ds.current_A, V_cutoff=None,
            dt=problem.dt_s, t_max=t_end, initial=init)
    except SimulationError as exc:
        reached = getattr(exc, "t", None) or 0.0
        return PENALTY_BASE * (1.0 + max(0.0, 1.0 - reached / t_end))
    except (ValueError, OptimizationError):
        return PENALTY_BASE * 2.0
    t_rel = trace.t_s - trace.t_s[0]
    if t_rel[-1] < t_end - 1.5 * problem.dt_s:
        return PENALTY_BASE * (1.0 + (1.0 - t_rel[-1] / t_end))
    v_sim = np.interp(ds.t_s, t_rel, trace.V_cell_V)
    socn_sim = np.interp(ds.t_s, t_rel, trace.soc_n)
    socp_sim = np.interp(ds.t_s, t_rel, trace.soc_p)
    soc_exp = soc_exp_from_coulomb_counting(ds, problem.capacity_base,
                                            problem.soc0)
    w1, w2, w3 = problem.weights
    return weighted_rmse_cost(v_sim, ds.voltage_V, socn_sim, soc_exp,
                              socp_sim, soc_exp, w1, w2, w3)


@dataclass
class IdentificationResult:
    phase: str
    values: dict
    final_cost: float
    cost_history: list
    n_evaluations: int
    specs: list
    pso_config: PsoConfig
    weights: tuple

    def report(self, reference=None, resolved_config=None):
        """JSON-ready report; deterministic for a fixed seed (no clocks)."""
        rep = {
            "phase": self.phase,
            "final_cost": self.final_cost,
            "identified": self.values,
            "parameters": [
                {"name": s.name, "lower": s.lower, "upper": s.upper,
                 "guess": s.guess, "identified": self.values[s.name]}
                for s in self.specs],
            "cost_history": list(self.cost_history),
            "n_evaluations": self.n_evaluations,
            "pso": {"swarm_size": self.pso_config.swarm_size,
                    "iterations": self.pso_config.iterations,
                    "inertia": self.pso_config.inertia,
                    "cognitive": self.pso_config.cognitive,
                    "social": self.pso_config.social,
                    "seed": self.pso_config.seed,
                    "bound_handling": self.pso_config.bound_handling},
            "weights": {"w1": self.weights[0], "w2": self.weights[1],
                        "w3": self.weights[2]},
        }
        if reference is not None:
            rep["reference_values"] = reference
        if resolved_config is not None:
            rep["resolved_config"] = resolved_config
        return rep


def pso_identify(problem, config, jobs=1):
    """Run the swarm on an identification problem."""
    def objective(values):
        return cost(values, problem)

    result = pso_minimize(objective, problem.lower(), problem.upper(),
                          problem.guess(), config, jobs=jobs,
                          penalty_threshold=PENALTY_BASE)
    values = {s.name: float(v) for s, v in zip(problem.specs, result.best_values)}
    return IdentificationResult(
        phase=problem.phase, values=values, final_cost=result.best_cost,
        cost_history=result.cost_history, n_evaluations=result.n_evaluations,
        specs=problem.specs, pso_config=config, weights=problem.weights)


def identify_fresh(dataset, base_params, mesh, specs, pso_config,
                   weights=(1.0, 1.0, 1.0), dt_s=1.0, jobs=1):
    """Phase one: fit the fresh-cell vector with side reactions off."""
    pso_config.validate()
    problem = IdentificationProblem(phase="fresh", specs=list(specs),
                                    dataset=dataset, base_params=base_params,
                                    mesh=mesh, weights=weights, dt_s=dt_s)
    return pso_identify(problem, pso_config, jobs=jobs)


def identify_aged(dataset, base_params, cycle_label, mesh, specs, pso_config,
                  weights=(1.0, 1.0, 1.0), dt_s=1.0, jobs=1):
    """Phase two: fit the film ratio and aging-sensitive stoichiometries.

    ``base_params`` must already carry the phase-one values.  cycle_label
    1000 keeps plating off; 3300 activates it with the configured exchange
    current (which must be positive).
    """
    pso_config.validate()
    label = str(cycle_label)
    if label not in ("1000", "3300"):
        raise OptimizationError("cycle label must be 1000 or 3300")
    phase = "aged1000" if label == "1000" else "aged3300"
    if phase == "aged3300" and not base_params.i0_pl > 0.0:
        raise OptimizationError(
            "aged3300 requires a positive plating exchange current (i0_pl)")
    problem = IdentificationProblem(phase=phase, specs=list(specs),
                                    dataset=dataset, base_params=base_params,
                                    mesh=mesh, weights=weights, dt_s=dt_s)
    return pso_identify(problem, pso_config, jobs=jobs)


def write_report(report, path):
    """Deterministic JSON dump (sorted keys, repr floats, trailing newline)."""
    with open(path, "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
