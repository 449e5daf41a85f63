"""Enhanced single-particle lithium-ion cell model with SEI growth, lithium
plating and loss-of-active-material dynamics, plus a particle-swarm
parameter-identification engine."""

from .aging import (LamClassification, LamRegime, SideReactionRates,
                    classify_lam_regime, cycle_to_time_coefficients,
                    film_resistance, integrate_lam, lam_rates, lam_total_area,
                    plating_current_density, porosity_update,
                    sei_current_density, species_and_film_rates)
from .cell import (SimulationTrace, StepOutput, TimestepPolicy, evaluate,
                   exchange_current, overpotential, run_constant_current,
                   side_species_lithium, soc, solid_total_lithium, step)
from .errors import (ConfigError, DatasetError, EspmError, OptimizationError,
                     ParameterError, PorosityError, SaturationError,
                     SimulationError)
from .identification import (ExperimentalDataset, IdentificationProblem,
                             IdentificationResult, ParameterSpec, cost,
                             identify_aged, identify_fresh,
                             soc_exp_from_coulomb_counting, weighted_rmse_cost,
                             write_report)
from .parameters import (CellParameters, Mesh, OcpCurve, data_path,
                         load_parameters, mesh_from_dict, parameters_from_dict,
                         parameters_to_dict, save_parameters, substituted)
from .pso import PsoConfig, PsoResult, pso_minimize
from .state import CellState, aged_state, initial_state
from .transport import (ElectrolyteSolution, PoreWallFluxes,
                        arrhenius_diffusivity, effective_coefficients,
                        electrolyte_conductivity, electrolyte_diffusivity,
                        electrolyte_mass_rhs, electrolyte_total_lithium,
                        pore_wall_fluxes, solid_average_concentration,
                        solid_diffusion_rhs, solid_surface_concentration,
                        solve_electrolyte_potential)

__version__ = "0.1.0"
