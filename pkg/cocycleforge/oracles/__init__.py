from .cyclic import CyclicOracle, block_system, cyclic_solve, haar_orthogonal, random_cyclic_spec
from .fourier import DEFAULT_DENOM_THRESHOLD, FourierOracle, fourier_solve
from .structural import (StructuralReport, frame_residual, homogeneous_spec, limit_function_h,
                         verify_invariant_function, verify_section_to_function)

__all__ = [
    "CyclicOracle", "block_system", "cyclic_solve", "haar_orthogonal", "random_cyclic_spec",
    "DEFAULT_DENOM_THRESHOLD", "FourierOracle", "fourier_solve",
    "StructuralReport", "frame_residual", "homogeneous_spec", "limit_function_h",
    "verify_invariant_function", "verify_section_to_function",
]
