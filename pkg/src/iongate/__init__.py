"""Simulator and verification suite for a single-pulse standing-wave phase
gate on trapped ions in thermal motion.

The package is organized as: `hilbert` (spaces, operators, states),
`dynamics` (Hamiltonians and propagators), `synthesis` (gate parameter
solving and GHZ recipes), `analysis` (fidelities, sweeps, convergence), and
`cli` (command-line front end).
"""

__version__ = "0.1.0"

from .analysis import (
    ConvergenceRow,
    GhzReport,
    SweepPoint,
    SweepResult,
    TruthTableReport,
    fidelity,
    ghz_check,
    ghz_fidelity,
    lamb_dicke_error_sweep,
    leakage_population,
    motional_independence_metric,
    partial_trace,
    truncation_convergence,
    truth_table_check,
    unitary_gate_fidelity,
)
from .dynamics import (
    PropagatorFactors,
    closed_form_propagator,
    evolve,
    expm_propagator,
    hamiltonian_full,
    hamiltonian_ld,
    propagator_at_tau,
)
from .hilbert import (
    PAULI,
    ModelParams,
    OperatorMatrix,
    QuantumState,
    ThermalSpec,
    collective_spin,
    composite_mixed,
    composite_pure,
    embed,
    fock_state,
    internal_product_state,
    ladder_operators,
    pm_product_states,
    position_sine_operator,
    standard_states,
    thermal_state,
)
from .synthesis import (
    GateSolution,
    GhzRecipe,
    ghz_recipe,
    ideal_gate_unitary,
    ideal_ghz_state,
    literal_params,
    solve_gate_params,
)

__all__ = [
    "__version__",
    "PAULI",
    "ModelParams",
    "OperatorMatrix",
    "QuantumState",
    "ThermalSpec",
    "collective_spin",
    "composite_mixed",
    "composite_pure",
    "embed",
    "fock_state",
    "internal_product_state",
    "ladder_operators",
    "pm_product_states",
    "position_sine_operator",
    "standard_states",
    "thermal_state",
    "PropagatorFactors",
    "closed_form_propagator",
    "evolve",
    "expm_propagator",
    "hamiltonian_full",
    "hamiltonian_ld",
    "propagator_at_tau",
    "GateSolution",
    "GhzRecipe",
    "ghz_recipe",
    "ideal_gate_unitary",
    "ideal_ghz_state",
    "literal_params",
    "solve_gate_params",
    "ConvergenceRow",
    "GhzReport",
    "SweepPoint",
    "SweepResult",
    "TruthTableReport",
    "fidelity",
    "ghz_check",
    "ghz_fidelity",
    "lamb_dicke_error_sweep",
    "leakage_population",
    "motional_independence_metric",
    "partial_trace",
    "truncation_convergence",
    "truth_table_check",
    "unitary_gate_fidelity",
]
