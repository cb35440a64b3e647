# Geometry modules
from .chart import Chart, Multiplier, VectorField, coordinate_field, same_chart, zero_field
from .operations import (
    FieldReport,
    bracket_divergence_residual,
    divergence,
    is_multiplier,
    is_zero_field,
    lie_bracket,
    lie_derivative,
    multiplier_report,
    multiplier_residual,
    scale_divergence_check,
)
from .normalizer import NormalizerKind, NormalizerResult, normalizer_factor

__all__ = [
    "Chart", "Multiplier", "VectorField", "coordinate_field", "same_chart", "zero_field",
    "FieldReport", "bracket_divergence_residual", "divergence", "is_multiplier",
    "is_zero_field", "lie_bracket", "lie_derivative", "multiplier_report",
    "multiplier_residual", "scale_divergence_check",
    "NormalizerKind", "NormalizerResult", "normalizer_factor",
]
