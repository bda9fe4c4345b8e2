"""
Structural checks for invariant sections and invariant functions.

A frame 𝒳 : X -> O(l) is an invariant section when 𝒳(Tx) = 𝒳(x)𝓕(x);
then f(x) = 𝒳(x)^{-1}e solves f(Tx) = 𝓕(x)^{-1}f(x) for any fixed e.
"""

from typing import List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..dynamics.base import BaseSystem, SampleGrid
from ..dynamics.cocycle import CocycleSpec
from ..dynamics.fields import (ConstantField, InverseField, OrthogonalField, PulledBackField, VectorField,
                               ZeroField)
from ..logging_config import get_logger
from ..solver.sections import Section

logger = get_logger("oracles.structural")

CHAIN_TOL = 1e-12


class StructuralReport(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True)

    e: List[float]
    frame_residual: float
    function_residual: float
    chain_holds: bool
    section: Optional[Section] = Field(default=None, exclude=True)


def _values(f: Union[Section, VectorField], system: BaseSystem, coords: np.ndarray) -> np.ndarray:
    if isinstance(f, Section):
        return f.evaluate(coords)
    return f.evaluate(system, coords)


def verify_invariant_function(system: BaseSystem, twist: OrthogonalField,
                              f: Union[Section, VectorField], grid: SampleGrid) -> float:
    """sup over the grid of |f(Tx) - 𝓕(x)^{-1}f(x)|."""
    here = _values(f, system, grid.coords)
    ahead = _values(f, system, grid.stepped(1))
    m = twist.evaluate(system, grid.coords)
    return float(np.max(np.linalg.norm(ahead - np.einsum("mji,mj->mi", m, here), axis=-1)))


def frame_residual(system: BaseSystem, frame: OrthogonalField, twist: OrthogonalField,
                   grid: SampleGrid) -> float:
    """sup over the grid of the operator norm of 𝒳(Tx) - 𝒳(x)𝓕(x)."""
    ahead = frame.evaluate(system, grid.stepped(1))
    here = frame.evaluate(system, grid.coords)
    diff = ahead - here @ twist.evaluate(system, grid.coords)
    return float(np.max(np.linalg.norm(diff, ord=2, axis=(-2, -1))))


def verify_section_to_function(system: BaseSystem, frame: OrthogonalField, twist: OrthogonalField,
                               e: Sequence[float], grid: SampleGrid) -> StructuralReport:
    """
    Build f(x) = 𝒳(x)^{-1}e and check both the frame and the function equation.

    Raises:
        ValueError: If e is zero or has the wrong dimension
    """
    vec = np.asarray(e, dtype=float)
    if vec.shape != (frame.dim,):
        raise ValueError(f"Vector e must have dimension {frame.dim}, got shape {vec.shape}")
    if not np.any(vec):
        raise ValueError("Vector e must be nonzero")

    field = PulledBackField(frame, ConstantField(vec))
    section = Section.from_field(grid, field, name="frame_pullback")
    frame_res = frame_residual(system, frame, twist, grid)
    function_res = verify_invariant_function(system, twist, section, grid)
    chain = frame_res > CHAIN_TOL or function_res <= CHAIN_TOL
    if not chain:
        logger.warning(f"Frame residual {frame_res:.3e} is small but the function residual is {function_res:.3e}")
    return StructuralReport(e=vec.tolist(), frame_residual=frame_res, function_residual=function_res,
                            chain_holds=bool(chain), section=section)


def limit_function_h(system: BaseSystem, frame: OrthogonalField, f: Union[Section, VectorField],
                     grid: SampleGrid) -> Section:
    """h(x) = 𝒳(x)^{-1}c with c the grid quadrature of 𝒳(x)f(x)."""
    lifted = np.einsum("mij,mj->mi", frame.evaluate(system, grid.coords), _values(f, system, grid.coords))
    c = grid.mean(lifted)
    return Section.from_field(grid, PulledBackField(frame, ConstantField(c)), name="limit_h")


def homogeneous_spec(system: BaseSystem, frame: OrthogonalField, twist: OrthogonalField,
                     name: str = "homogeneous") -> CocycleSpec:
    """Cocycle Ψ = 𝓕^{-1}, ρ = 0: sections 𝒳^{-1}e then solve v(Tx) = Ψ(x)v(x)."""
    return CocycleSpec(system, InverseField(twist), ZeroField(frame.dim), name=name)
