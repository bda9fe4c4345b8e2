from .base import (
    GOLDEN_ALPHA,
    BasePoint,
    BaseSystem,
    CircleRotation,
    FiniteCyclic,
    SampleGrid,
    TorusRotation,
    make_grid,
    point_grid,
)
from .cocycle import CocycleSpec, SkewState, attractor_trace, cocycle_n, hyperbolized_step, skew_step
