from .displacement import DisplacementCurve, displacement, displacement_curve, displacement_sweep
from .estimate import (
    DEFAULT_N_SCHEDULE,
    DriftEstimate,
    IndependenceCheck,
    classify_drift,
    drift_estimate,
    drift_independence_check,
    drift_values,
    zero_drift_diagnostic,
)
from .pipeline import TheoremBReport, almost_invariance_contradiction, theorem_B_pipeline
