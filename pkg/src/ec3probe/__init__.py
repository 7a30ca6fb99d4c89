"""Classical simulator of probe-qubit spectroscopy for 3-bit exact cover."""

from .ec3_core import (
    Assignment,
    EC3Instance,
    InstanceError,
    ResourceError,
    SpectrumSummary,
    brute_force_solve,
    build_hp_diagonal,
    clause_energy,
    load_instance,
    parse_instance,
    problem_energy,
)
from .evolution import PropagatorSpec, propagate_exact, propagate_trotter
from .experiment import (
    DecayResult,
    SimulationParams,
    analytic_prediction,
    extract_solutions,
    run_algorithm,
    sweep_omega,
    sweep_tau,
)
from .operators import HamiltonianParams, apply_excitation, apply_full_h, build_htilde, prepare_reference

__version__ = "0.1.0"
