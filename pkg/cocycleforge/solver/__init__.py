from .sections import LambdaSweep, Section, SweepEntry, grid_distances
from .hyperbolized import (
    DEFAULT_LAMBDAS,
    ZeroMeanReport,
    build_sweep,
    fixed_point_u_lambda,
    residual,
    script_S,
    script_S_grid,
    series_u_lambda,
    solve_u_lambda,
    sweep,
    zero_mean_test,
)
