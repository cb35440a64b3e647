# Numeric modules
from .integrator import BLOWUP, Trajectory, integrate, write_csv
from .drift import (
    DRIFT_TOL,
    NOISE_FLOOR,
    RATIO_BAND,
    CertificationSuite,
    CertificationVerdict,
    DriftReport,
    DriftRun,
    certify_invariant,
    drift,
    judge_drift,
)

__all__ = [
    "BLOWUP", "Trajectory", "integrate", "write_csv",
    "DRIFT_TOL", "NOISE_FLOOR", "RATIO_BAND",
    "CertificationSuite", "CertificationVerdict", "DriftReport", "DriftRun",
    "certify_invariant", "drift", "judge_drift",
]
