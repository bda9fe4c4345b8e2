"""
Maximal drift estimates.

D_n = (1/n)·sup_x |I(n,x)v₀ - v₀| is read from the twisted sums of the u_λ
series: with S_n = Σ_{j<n} Ψ(x)^{-1}⋯Ψ(T^j x)^{-1}ρ(T^j x) and
P_n = Ψ(x)^{-1}⋯Ψ(T^{n-1}x)^{-1} one has |I(n,x)v₀ - v₀| = |v₀ + S_n - P_n v₀|.
"""

import math
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, Field

from ..averaging.twisted import cesaro_twisted_grid, partial_sums
from ..dynamics.base import SampleGrid
from ..dynamics.cocycle import CocycleSpec
from ..logging_config import get_logger
from ..solver.hyperbolized import u_lambda_sequence

logger = get_logger("drift")

DEFAULT_N_SCHEDULE = (100, 1000, 10000, 100000)
# Zero drift needs D_{n_max} below this fraction of sup|ρ| ...
ZERO_DRIFT_RATIO = 1e-2
# ... and D_n ≈ C/n explaining at least this share of Σ D_n².
ZERO_DRIFT_MIN_R2 = 0.99


class DriftEstimate(BaseModel):
    """D_n along an n schedule, with the zero-drift classification."""
    n_schedule: List[int]
    values: List[float] = Field(default_factory=list)
    scaled: List[float] = Field(default_factory=list)
    c_fit: float = 0.0
    decay_exponent: Optional[float] = None
    fit_r2: Optional[float] = None
    zero_drift: bool = False
    rho_sup: float = 0.0
    v0: List[float] = Field(default_factory=list)


class IndependenceCheck(BaseModel):
    """Change of D_n under random base vectors v₀, against the bound 2|v₀|/n."""
    n_schedule: List[int]
    samples: int
    max_excess: float
    passed: bool
    deviations: List[List[float]] = Field(default_factory=list)


def validate_n_schedule(schedule: Sequence[int]) -> List[int]:
    points = [int(n) for n in schedule]
    if not points:
        raise ValueError("n schedule must not be empty")
    if points[0] < 1 or any(b <= a for a, b in zip(points, points[1:])):
        raise ValueError(f"n schedule must be positive and strictly increasing, got {points}")
    return points


def drift_values(spec: CocycleSpec, coords: np.ndarray, n_schedule: Sequence[int],
                 v0: Optional[np.ndarray] = None) -> List[float]:
    """D_n for each n, as sup over the coordinate batch."""
    points = validate_n_schedule(n_schedule)
    base = np.zeros(spec.dim) if v0 is None else np.asarray(v0, dtype=float)
    out = []
    for n, s, prod in partial_sums(u_lambda_sequence(spec), coords, points):
        moved = base + s - np.einsum("mij,j->mi", prod, base)
        out.append(float(np.max(np.linalg.norm(moved, axis=-1))) / n)
    return out


def classify_drift(estimate: DriftEstimate) -> DriftEstimate:
    """
    Fill in the fit and the zero-drift classification.

    C_fit is max n·D_n. fit_r2 is the share of Σ D_n² explained by the
    least-squares line D_n ≈ C/n through the origin. Zero drift is declared
    when sup|ρ| = 0 or every D_n vanishes, and otherwise needs both
    fit_r2 ≥ 0.99 and D_{n_max} < 1e-2·sup|ρ|. The decay exponent (minus the
    log-log slope) is reported but takes no part in the decision.
    """
    ns = np.asarray(estimate.n_schedule, dtype=float)
    ds = np.asarray(estimate.values, dtype=float)
    estimate.scaled = (ns * ds).tolist()
    estimate.c_fit = float(np.max(ns * ds))

    inv_n = 1.0 / ns
    total = float(np.sum(ds ** 2))
    if total > 0:
        slope = float(np.dot(inv_n, ds) / np.dot(inv_n, inv_n))
        estimate.fit_r2 = 1.0 - float(np.sum((ds - slope * inv_n) ** 2)) / total
    else:
        estimate.fit_r2 = 1.0

    positive = ds > 0
    if np.count_nonzero(positive) >= 2:
        slope, _ = np.polyfit(np.log(ns[positive]), np.log(ds[positive]), 1)
        estimate.decay_exponent = float(-slope)

    if estimate.rho_sup == 0.0 or not np.any(positive):
        estimate.zero_drift = True
    else:
        small = ds[-1] < ZERO_DRIFT_RATIO * estimate.rho_sup
        estimate.zero_drift = bool(small and estimate.fit_r2 >= ZERO_DRIFT_MIN_R2)
    return estimate


def drift_estimate(spec: CocycleSpec, grid: SampleGrid, n_schedule: Sequence[int] = DEFAULT_N_SCHEDULE,
                   v0: Optional[Sequence[float]] = None) -> DriftEstimate:
    """D_n on the grid along the schedule; v₀ = 0 unless given."""
    points = validate_n_schedule(n_schedule)
    base = np.zeros(spec.dim) if v0 is None else np.asarray(v0, dtype=float)
    estimate = DriftEstimate(n_schedule=points, rho_sup=spec.rho_sup, v0=base.tolist(),
                             values=drift_values(spec, grid.coords, points, base))
    classify_drift(estimate)
    logger.debug(f"Drift: C_fit={estimate.c_fit:.3e} r2={estimate.fit_r2:.4f} p={estimate.decay_exponent} "
                 f"zero={estimate.zero_drift}")
    return estimate


def zero_drift_diagnostic(spec: CocycleSpec, grid: SampleGrid, n: int) -> float:
    """sup over the grid of |(1/N) Σ_{j<N} Ψ(x)^{-1}⋯Ψ(T^j x)^{-1} ρ(T^j x)|."""
    means = cesaro_twisted_grid(u_lambda_sequence(spec), grid.coords, n)
    return float(np.max(np.linalg.norm(means, axis=-1)))


def drift_independence_check(spec: CocycleSpec, grid: SampleGrid, n_schedule: Sequence[int],
                             rng: np.random.Generator, samples: int = 3,
                             scale: float = 1.0) -> IndependenceCheck:
    """Rerun drift_values with random v₀ and compare with v₀ = 0."""
    points = validate_n_schedule(n_schedule)
    reference = drift_values(spec, grid.coords, points)
    deviations = []
    excess = -math.inf
    for _ in range(samples):
        v0 = rng.normal(size=spec.dim) * scale
        values = drift_values(spec, grid.coords, points, v0)
        norm = float(np.linalg.norm(v0))
        row = [abs(a - b) for a, b in zip(values, reference)]
        deviations.append(row)
        excess = max(excess, max(d - 2.0 * norm / n for d, n in zip(row, points)))
    return IndependenceCheck(n_schedule=points, samples=samples, max_excess=float(excess),
                             passed=bool(excess <= 1e-12), deviations=deviations)
