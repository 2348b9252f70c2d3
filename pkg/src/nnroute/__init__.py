"""Minimum-SWAP qubit routing for linear nearest-neighbor architectures."""
from .circuit import (
    CircuitFormatError,
    Gate,
    QuantumCircuit,
    UnsupportedGateError,
    decompose,
    emit_compliant,
    generate_qft,
    load_real,
    parse_compliant,
    parse_real,
)
from .ilp import (
    assignment_to_schedule,
    build_model,
    check_assignment,
    export_lp,
    parse_lp,
    schedule_to_assignment,
)
from .oracle import brute_force_oracle
from .permutation import (
    OrderSchedule,
    QubitOrder,
    SwapStep,
    apply_swap,
    kendall_tau,
    kendall_tau_naive,
    realize_swaps,
    verify_schedule,
)
from .solver import (
    Mode,
    SolverConfig,
    SolverTimeout,
    SolveResult,
    enumerate_feasible_orders,
    solve,
    solve_beam,
    solve_exact_dp,
    solve_greedy,
)

__version__ = "0.1.0"
