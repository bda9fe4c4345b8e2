"""Displacement of sections by the cocycle."""

from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from ..dynamics.base import SampleGrid
from ..dynamics.cocycle import CocycleSpec
from ..solver.hyperbolized import residual_values, solve_u_lambda, validate_schedule
from ..solver.sections import Section


class DisplacementCurve(BaseModel):
    """Disp(u_λ) along a λ schedule, next to the identity value (1-λ)·sup|u_λ(Tx)|."""
    lambdas: List[float]
    values: List[float] = Field(default_factory=list)
    bounds: List[float] = Field(default_factory=list)
    identity_errors: List[float] = Field(default_factory=list)
    decreasing: bool = False
    reduction: Optional[float] = None


def _on_grid(v: Section, grid: Optional[SampleGrid]) -> Section:
    if grid is None or grid is v.grid:
        return v
    return Section(grid, v.evaluate(grid.coords), step_values=v.evaluate(grid.stepped(1)),
                   evaluator=v.evaluator, representation=v.representation, lam=v.lam,
                   tolerance=v.tolerance, name=v.name)


def displacement(spec: CocycleSpec, v: Section, grid: Optional[SampleGrid] = None) -> float:
    """
    sup over the grid of |v(Tx) - Ψ(x)v(x) - ρ(x)|.

    Raises:
        ValueError: If v cannot be evaluated on the requested grid
    """
    return float(np.max(residual_values(spec, 1.0, _on_grid(v, grid))))


def displacement_curve(spec: CocycleSpec, sections: Sequence[Section]) -> DisplacementCurve:
    """Displacements of precomputed u_λ sections."""
    lams = validate_schedule([s.lam for s in sections])
    curve = DisplacementCurve(lambdas=lams)
    for section in sections:
        value = displacement(spec, section)
        bound = (1.0 - section.lam) * float(np.max(np.linalg.norm(section.at_step(), axis=-1)))
        curve.values.append(value)
        curve.bounds.append(bound)
        curve.identity_errors.append(abs(value - bound))

    # Values already within series tolerance of zero count as converged.
    floors = [2.0 * (s.tolerance or 0.0) for s in sections]
    curve.decreasing = all(b < a or b <= floor
                           for a, b, floor in zip(curve.values, curve.values[1:], floors[1:]))
    if curve.values[-1] > 0:
        curve.reduction = curve.values[0] / curve.values[-1]
    return curve


def displacement_sweep(spec: CocycleSpec, grid: SampleGrid, schedule: Sequence[float],
                       eps: float = 1e-10) -> DisplacementCurve:
    lams = validate_schedule(schedule)
    return displacement_curve(spec, [solve_u_lambda(spec, lam, grid, eps) for lam in lams])
