from .summation import CompensatedSum, block_sum, compensated_sum
from .twisted import (
    TwistedSequence,
    abel_twisted,
    abel_twisted_grid,
    birkhoff_average,
    cesaro_means,
    cesaro_twisted,
    cesaro_twisted_grid,
    exp_average,
    frobenius_kernel_form,
    invariant_function_residual,
    space_average,
    truncation_index,
    twisted_isometry_invariance,
    von_neumann_residual,
)
from .summability import AveragingReport, frobenius_compare, scalar_sequence, tauberian_probe
