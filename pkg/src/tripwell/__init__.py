"""Entanglement of three fermions in a triple well: states, measures, protocol and SU(3) tunneling."""

from .fock import (
    PauliViolation,
    PureState,
    SlaterExpansion,
    antisymmetrize,
    from_slater_expansion,
    one_per_well_projector,
    reduced_density,
    slater_determinant,
    to_slater_expansion,
)
from .measures import (
    MeasureReport,
    concurrence2,
    concurrenceN,
    fermionic_concurrence,
    fermionic_tangle,
    measure_report,
    tangle3,
)
from .protocol import (
    Classification,
    NotUnitaryError,
    ProtocolOutcome,
    analytic_projected_state,
    evolve,
    ghz_no_go_scan,
    run_protocol,
    two_well_protocol,
)
from .qubitmap import freeze, verify_measure_identity
from .su3 import EulerAngles, euler_to_matrix, probability_curves, solve_equal_coefficients, symmetric_solution

__version__ = "0.1.0"

__all__ = [
    "Classification",
    "EulerAngles",
    "MeasureReport",
    "NotUnitaryError",
    "PauliViolation",
    "ProtocolOutcome",
    "PureState",
    "SlaterExpansion",
    "analytic_projected_state",
    "antisymmetrize",
    "concurrence2",
    "concurrenceN",
    "euler_to_matrix",
    "evolve",
    "fermionic_concurrence",
    "fermionic_tangle",
    "freeze",
    "from_slater_expansion",
    "ghz_no_go_scan",
    "measure_report",
    "one_per_well_projector",
    "probability_curves",
    "reduced_density",
    "run_protocol",
    "slater_determinant",
    "solve_equal_coefficients",
    "symmetric_solution",
    "tangle3",
    "to_slater_expansion",
    "two_well_protocol",
    "verify_measure_identity",
]
