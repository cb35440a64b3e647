# Mechanics modules
from .sode import (
    LIFT_PRESETS,
    PointField,
    SecondOrderSystem,
    SodeSymmetryReport,
    default_base_coords,
    evolution_box,
    evolution_lift,
    lift_symmetry,
    prolong,
    prolongation_divergence_check,
    sode_invariant,
    sode_lift,
    sode_symmetry_conditions,
    velocity_name,
)
from .lagrangian import (
    LagrangianData,
    determinant,
    el_residual_report,
    hojman_invariant_lagrangian,
    lagrangian_analyze,
    lagrangian_invariant_expr,
    lagrangian_multiplier,
)
from .hamiltonian import hamiltonian_invariant, hamiltonian_vector_field, nonautonomous_hamiltonian_expansion

__all__ = [
    "LIFT_PRESETS", "PointField", "SecondOrderSystem", "SodeSymmetryReport",
    "default_base_coords", "evolution_box", "evolution_lift", "lift_symmetry", "prolong",
    "prolongation_divergence_check", "sode_invariant", "sode_lift", "sode_symmetry_conditions",
    "velocity_name",
    "LagrangianData", "determinant", "el_residual_report", "hojman_invariant_lagrangian",
    "lagrangian_analyze", "lagrangian_invariant_expr", "lagrangian_multiplier",
    "hamiltonian_invariant", "hamiltonian_vector_field", "nonautonomous_hamiltonian_expansion",
]
