"""Global-best particle swarm optimizer over box constraints.

The swarm works in coordinates normalized to [0, 1]^d so that parameters of
very different magnitudes share one velocity scale.  All randomness comes
from one seeded generator consumed in a fixed order, and per-iteration
evaluations are pure, so results are bit-reproducible for a fixed seed
regardless of how many worker threads evaluate the swarm.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import OptimizationError


@dataclass(frozen=True)
class PsoConfig:
    """Swarm hyperparameters.

    ``validate()`` enforces the production limits (swarm of at least 5,
    positive coefficients); library callers may use degenerate configs,
    e.g. a single frozen particle, without validating.
    """

    swarm_size: int = 30
    iterations: int = 150
    inertia: float = 0.729
    cognitive: float = 1.494
    social: float = 1.494
    seed: int = 0
    bound_handling: str = "clamp"
    # optional velocity limit per component, as a fraction of the box span;
    # None disables clamping
    v_max: float = None
    # population seeding: "uniform" or "lhs" (Latin hypercube)
    init: str = "uniform"
    # optional final inertia: linearly anneal from `inertia` to this value
    # over the iteration budget; None keeps the inertia constant
    inertia_final: float = None

    def validate(self):
        if self.swarm_size < 5:
            raise OptimizationError("swarm_size must be at least 5")
        if self.iterations < 1:
            raise OptimizationError("iterations must be at least 1")
        if min(self.inertia, self.cognitive, self.social) <= 0.0:
            raise OptimizationError("all PSO coefficients must be positive")
        if self.bound_handling != "clamp":
            raise OptimizationError("only 'clamp' bound handling is implemented")
        if self.v_max is not None and not 0.0 < self.v_max <= 1.0:
            raise OptimizationError("v_max must lie in (0, 1]")
        if self.init not in ("uniform", "lhs"):
            raise OptimizationError("init must be 'uniform' or 'lhs'")
        if self.inertia_final is not None and self.inertia_final <= 0.0:
            raise OptimizationError("inertia_final must be positive")
        return self


@dataclass
class PsoResult:
    best_values: np.ndarray
    best_cost: float
    cost_history: list = field(default_factory=list)
    n_evaluations: int = 0
    n_iterations: int = 0


def pso_minimize(objective, lower, upper, guess, config, jobs=1,
                 penalty_threshold=None):
    """Minimize ``objective(values)`` within [lower, upper].

    Particle 0 starts at ``guess`` (clamped into bounds), the rest start
    uniformly at random; all velocities start at zero.  Positions are
    clamped componentwise with the violated velocity component zeroed, so
    the objective is never evaluated outside the bounds.  The best-so-far
    cost history is monotone nonincreasing.

    ``penalty_threshold``: if every evaluation of the whole run sits at or
    above this value, the search is reported as failed.
    """
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    guess = np.asarray(guess, dtype=float)
    if lower.shape != upper.shape or lower.shape != guess.shape:
        raise OptimizationError("bounds and guess must share one shape")
    if np.any(upper <= lower):
        raise OptimizationError("upper bounds must exceed lower bounds")
    span = upper - lower
    d = lower.size
    n = config.swarm_size
    rng = np.random.default_rng(config.seed)

    x = np.empty((n, d))
    x[0] = np.clip((guess - lower) / span, 0.0, 1.0)
    if n > 1:
        if config.init == "lhs":
            # one stratum per particle and dimension, shuffled independently
            strata = (np.arange(n - 1)[:, None]
                      + rng.uniform(size=(n - 1, d))) / (n - 1)
            for k in range(d):
                rng.shuffle(strata[:, k])
            x[1:] = strata
        else:
            x[1:] = rng.uniform(0.0, 1.0, size=(n - 1, d))
    v = np.zeros((n, d))

    def run_batch(positions):
        values = [lower + span * positions[i] for i in range(positions.shape[0])]
        if jobs > 1:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                return list(pool.map(objective, values))
        return [objective(val) for val in values]

    pbest_x = x.copy()
    pbest_f = np.array(run_batch(x))
    g_idx = int(np.argmin(pbest_f))
    gbest_x = pbest_x[g_idx].copy()
    gbest_f = float(pbest_f[g_idx])
    history = [gbest_f]
    n_evals = n

    for it in range(config.iterations - 1):
        r1 = rng.uniform(size=(n, d))
        r2 = rng.uniform(size=(n, d))
        if config.inertia_final is None or config.iterations < 3:
            w = config.inertia
        else:
            frac = it / (config.iterations - 2)
            w = config.inertia + frac * (config.inertia_final - config.inertia)
        v = w * v \
            + config.cognitive * r1 * (pbest_x - x) \
            + config.social * r2 * (gbest_x[None, :] - x)
        if config.v_max is not None:
            np.clip(v, -config.v_max, config.v_max, out=v)
        x = x + v
        low_hit = x < 0.0
        high_hit = x > 1.0
        x[low_hit] = 0.0
        x[high_hit] = 1.0
        v[low_hit | high_hit] = 0.0

        f = np.array(run_batch(x))
        n_evals += n
        improved = f < pbest_f
        pbest_x[improved] = x[improved]
        pbest_f[improved] = f[improved]
        g_idx = int(np.argmin(pbest_f))
        if pbest_f[g_idx] < gbest_f:
            gbest_f = float(pbest_f[g_idx])
            gbest_x = pbest_x[g_idx].copy()
        history.append(gbest_f)

    if penalty_threshold is not None and gbest_f >= penalty_threshold:
        raise OptimizationError(
            f"all {n_evals} evaluations were penalized (best cost {gbest_f:.6g}); "
            "no candidate completed the dataset horizon")
    return PsoResult(best_values=lower + span * gbest_x, best_cost=gbest_f,
                     cost_history=history, n_evaluations=n_evals,
                     n_iterations=config.iterations)
