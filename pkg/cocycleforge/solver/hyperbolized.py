"""
The λ-hyperbolized twisted cohomological equation

    λ u(Tx) - Ψ(x) u(x) = ρ(x),

solved by the series u_λ(x) = -Σ_j λ^j Ψ(x)^{-1}⋯Ψ(T^j x)^{-1} ρ(T^j x).
"""

from functools import partial
from typing import List, Optional, Sequence, Union

import numpy as np
from pydantic import BaseModel, Field

from ..averaging.twisted import TwistedSequence, discounted_sum, truncation_index
from ..dynamics.base import BasePoint, SampleGrid
from ..dynamics.cocycle import CocycleSpec
from ..dynamics.fields import InverseField, PulledBackField, ShiftedField, VectorField
from ..isometry.euclidean import FiberVector
from ..logging_config import get_logger
from .sections import LambdaSweep, Section, SweepEntry, grid_distances

logger = get_logger("solver")

DEFAULT_LAMBDAS = (0.9, 0.99, 0.999, 0.9999)


def _check_lambda(lam: float, allow_zero: bool = False) -> None:
    low_ok = lam >= 0.0 if allow_zero else lam > 0.0
    if not (low_ok and lam < 1.0):
        raise ValueError(f"λ must lie in {'[0, 1)' if allow_zero else '(0, 1)'}, got {lam}")


def validate_schedule(schedule: Sequence[float]) -> List[float]:
    """A λ schedule must be non-empty and strictly increasing inside (0, 1)."""
    lams = [float(v) for v in schedule]
    if not lams:
        raise ValueError("λ schedule must not be empty")
    for lam in lams:
        _check_lambda(lam)
    if any(b <= a for a, b in zip(lams, lams[1:])):
        raise ValueError(f"λ schedule must be strictly increasing, got {lams}")
    return lams


def u_lambda_sequence(spec: CocycleSpec) -> TwistedSequence:
    """z_j = Ψ(x)^{-1}⋯Ψ(T^j x)^{-1} ρ(T^j x), the terms of the series for u_λ."""
    return TwistedSequence(spec.system, InverseField(spec.psi), spec.pulled_back_rho(), name="u_lambda")


def series_terms(spec: CocycleSpec, lam: float, eps: float) -> int:
    return truncation_index(lam, eps, spec.rho_bound)


def series_u_lambda(spec: CocycleSpec, lam: float, coords: np.ndarray, eps: float) -> np.ndarray:
    """
    Evaluate the truncated series for u_λ on a coordinate batch.

    λ = 0 is accepted and gives u_0 = -Ψ^{-1}ρ.

    Returns:
        np.ndarray: Shape (M, l)
    """
    _check_lambda(lam, allow_zero=True)
    n_terms = series_terms(spec, lam, eps)
    return -discounted_sum(u_lambda_sequence(spec), coords, lam, n_terms)


def section_from_values(spec: CocycleSpec, lam: float, grid: SampleGrid, eps: float,
                        values: np.ndarray, step_values: np.ndarray) -> Section:
    """Wrap series values at the grid and at T(grid) as a Section of u_λ."""
    return Section(grid, values, step_values=step_values,
                   evaluator=partial(series_u_lambda, spec, lam, eps=eps),
                   representation="series", lam=lam, tolerance=eps,
                   sup_bound=spec.rho_bound / (1.0 - lam), name=f"u_lambda[{lam:g}]")


def solve_u_lambda(spec: CocycleSpec, lam: float, grid: SampleGrid, eps: float = 1e-10) -> Section:
    """
    u_λ on a grid with tail at most ε.

    The values at T(grid) come from running the series again at Tx, never
    from interpolation.

    Raises:
        ValueError: If λ is not in [0, 1) or ε is not positive
    """
    _check_lambda(lam, allow_zero=True)
    size = len(grid)
    coords = np.concatenate([grid.coords, grid.stepped(1)])
    values = series_u_lambda(spec, lam, coords, eps)
    logger.debug(f"u_λ at λ={lam}: {series_terms(spec, lam, eps)} terms on {size} points")
    return section_from_values(spec, lam, grid, eps, values[:size], values[size:])


def residual_values(spec: CocycleSpec, lam: float, u: Section) -> np.ndarray:
    """|λu(Tx) - Ψ(x)u(x) - ρ(x)| at each grid point."""
    system = u.grid.system
    coords = u.grid.coords
    psi = spec.psi.evaluate(system, coords)
    rho = spec.rho.evaluate(system, coords)
    r = lam * u.at_step() - np.einsum("mij,mj->mi", psi, u.values) - rho
    return np.linalg.norm(r, axis=-1)


def residual(spec: CocycleSpec, lam: float, u: Section) -> float:
    """sup over the grid of |λu(Tx) - Ψ(x)u(x) - ρ(x)|; λ = 1 is the genuine equation."""
    return float(np.max(residual_values(spec, lam, u)))


def _script_s_sequence(spec: CocycleSpec, f: Union[Section, VectorField]) -> TwistedSequence:
    field = f.as_field() if isinstance(f, Section) else f
    observable = PulledBackField(spec.psi, ShiftedField(field))
    return TwistedSequence(spec.system, InverseField(spec.psi), observable, name="script_S")


def script_S_grid(spec: CocycleSpec, lam: float, f: Union[Section, VectorField],
                  coords: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    """(1-λ) Σ_j λ^j Ψ(x)^{-1}⋯Ψ(T^j x)^{-1} f(T^{j+1}x) on a coordinate batch."""
    _check_lambda(lam)
    seq = _script_s_sequence(spec, f)
    n_terms = truncation_index(lam, eps, seq.sup_bound)
    return (1.0 - lam) * discounted_sum(seq, coords, lam, n_terms)


def script_S(spec: CocycleSpec, lam: float, f: Union[Section, VectorField], x: BasePoint,
             eps: float = 1e-12) -> FiberVector:
    return FiberVector(script_S_grid(spec, lam, f, x.as_array(), eps)[0])


class ZeroMeanReport(BaseModel):
    """sup over the grid of |𝒮_λ(u, ·)| along a λ schedule."""
    lambdas: List[float]
    sup_values: List[float] = Field(default_factory=list)
    decreasing: bool = False


def zero_mean_test(spec: CocycleSpec, u: Union[Section, VectorField], schedule: Sequence[float],
                   grid: SampleGrid, eps: float = 1e-12) -> ZeroMeanReport:
    """A decreasing-to-zero trend certifies, numerically, exponential zero mean."""
    lams = validate_schedule(schedule)
    report = ZeroMeanReport(lambdas=lams)
    for lam in lams:
        values = script_S_grid(spec, lam, u, grid.coords, eps)
        report.sup_values.append(float(np.max(np.linalg.norm(values, axis=-1))))
    report.decreasing = all(b < a for a, b in zip(report.sup_values, report.sup_values[1:]))
    return report


def build_sweep(spec: CocycleSpec, sections: Sequence[Section], eps: float,
                oracle: Optional[Union[Section, VectorField]] = None) -> LambdaSweep:
    """Assemble a LambdaSweep from already computed u_λ sections."""
    lams = validate_schedule([s.lam for s in sections])
    result = LambdaSweep(schedule=lams, eps=eps, sections=list(sections))

    oracle_values = None
    if oracle is not None:
        grid = sections[0].grid
        if isinstance(oracle, Section):
            oracle_values = oracle.values
        else:
            oracle_values = oracle.evaluate(grid.system, grid.coords)

    for section in sections:
        entry = SweepEntry(lam=section.lam, n_terms=series_terms(spec, section.lam, eps),
                           sup_u=section.sup_norm,
                           residual_lambda=residual(spec, section.lam, section),
                           residual_one=residual(spec, 1.0, section))
        if oracle_values is not None:
            entry.sup_dist, entry.l1_dist, entry.l2_dist = grid_distances(section.values, oracle_values)
        result.entries.append(entry)

    if oracle_values is not None:
        dists = [e.sup_dist for e in result.entries]
        result.distances_decreasing = all(b < a for a, b in zip(dists, dists[1:]))
        result.possible_discontinuous_limit = not result.distances_decreasing
        if result.possible_discontinuous_limit:
            logger.warning("Sup-distance to the oracle is not decreasing along the λ schedule")
    return result


def sweep(spec: CocycleSpec, schedule: Sequence[float], grid: SampleGrid, eps: float = 1e-10,
          oracle: Optional[Union[Section, VectorField]] = None) -> LambdaSweep:
    """u_λ along the schedule with residuals at λ and at 1, and distances to an oracle."""
    lams = validate_schedule(schedule)
    sections = [solve_u_lambda(spec, lam, grid, eps) for lam in lams]
    return build_sweep(spec, sections, eps, oracle)


def fixed_point_u_lambda(spec: CocycleSpec, lam: float, coords: np.ndarray, eps: float = 1e-10) -> np.ndarray:
    """
    u_λ as the limit of G_λ orbits.

    Starting from v = 0 above T^n x and applying G_λ n times lands above x
    within λ^n·sup|u_λ| ≤ ε of u_λ(x).
    """
    _check_lambda(lam)
    n_terms = series_terms(spec, lam, eps)
    system = spec.system
    y = np.asarray(coords)
    for _ in range(n_terms):
        y = system.advance(y)
    v = np.zeros((y.shape[0], spec.dim))
    for _ in range(n_terms):
        y = system.retreat(y)
        psi = spec.psi.evaluate(system, y)
        rho = spec.rho.evaluate(system, y)
        v = np.einsum("mji,mj->mi", psi, lam * v - rho)
    return v
