# Invariant constructors
from .results import InvariantResult, TheoremTag
from .constructors import (
    certify,
    invariant_divfree,
    invariant_multiplier,
    invariant_nonautonomous,
    invariant_normalizer,
)

__all__ = [
    "InvariantResult", "TheoremTag", "certify",
    "invariant_divfree", "invariant_multiplier", "invariant_nonautonomous", "invariant_normalizer",
]
