"""Quantum-control and Hamiltonian-identification via polynomial optimization.

Pipeline: truncated Magnus expansion of the controlled propagator
(magnus), Chebyshev/Bessel matrix exponential (chebexp), explicit
polynomial objectives for the control tasks (objective), moment
relaxation plus multistart refinement (popsolve), all validated against
direct Schrodinger propagation (oracle).
"""

__version__ = "0.1.0"

from .chebexp import ChebExpansion, bessel_j, cheb_exp, validate_exp
from .magnus import (
    ControlAnsatz,
    MagnusResult,
    QuantumSystem,
    convergence_functional,
    generator_poly,
    magnus_omega,
    simplex_monomial_integral,
)
from .objective import (
    CouplingPattern,
    GateTarget,
    PopProblem,
    StatePair,
    gate_objective,
    identification_objective,
    min_time_gate,
    min_time_state,
    state_objective,
)
from .oracle import PropagationResult, frob_distance_sq, propagate, state_distance_sq
from .polyalg import MatrixPolynomial, RealPolynomial
from .popsolve import (
    MomentRelaxation,
    SdpProblem,
    SdpSolution,
    SolveReport,
    build_relaxation,
    extract_minimizer,
    local_refine,
    multistart,
    solve,
    solve_sdp,
)
