"""
Zero drift implies vanishing displacement of u_λ as λ -> 1⁻: the pipeline runs
both sides and flags any inconsistency instead of failing silently.
"""

from typing import List, Optional, Sequence

from pydantic import BaseModel, Field

from ..averaging.summability import AveragingReport, frobenius_compare
from ..dynamics.base import SampleGrid
from ..dynamics.cocycle import CocycleSpec
from ..logging_config import get_logger
from ..solver.hyperbolized import solve_u_lambda, u_lambda_sequence, validate_schedule
from ..solver.sections import Section
from .displacement import DisplacementCurve, displacement, displacement_curve
from .estimate import DEFAULT_N_SCHEDULE, DriftEstimate, drift_estimate

logger = get_logger("pipeline")

DEFAULT_FROBENIUS_SCHEDULE = (100, 1000, 10000)


class TheoremBReport(BaseModel):
    drift: DriftEstimate
    displacement: DisplacementCurve
    frobenius: Optional[AveragingReport] = None
    hypothesis_holds: bool = False
    anomalies: List[str] = Field(default_factory=list)


def almost_invariance_contradiction(drift: DriftEstimate, sections: Sequence[Section],
                                    displacements: Optional[Sequence[float]] = None,
                                    spec: Optional[CocycleSpec] = None) -> List[str]:
    """
    Flag sections that are too invariant for the measured drift.

    |I(n,x)·0| ≤ n·Disp(v) + 2·sup|v| gives Disp(v) ≥ d := max_n (D_n - 2·sup|v|/n).
    A section with Disp(v) < d/2 contradicts the drift data.

    Args:
        drift: Drift estimate with v₀ = 0
        sections: Section family to test
        displacements: Precomputed displacements; computed from spec otherwise

    Raises:
        ValueError: If neither displacements nor spec is given
    """
    if displacements is None:
        if spec is None:
            raise ValueError("Either displacements or spec is required")
        displacements = [displacement(spec, s) for s in sections]

    messages = []
    for section, disp in zip(sections, displacements):
        sup_v = section.bound()
        d = max(dn - 2.0 * sup_v / n for n, dn in zip(drift.n_schedule, drift.values))
        if d > 0 and disp < d / 2:
            messages.append(f"{section.name}: displacement {disp:.3e} below half the drift bound {d:.3e}")
    return messages


def theorem_B_pipeline(spec: CocycleSpec, grid: SampleGrid, lambdas: Sequence[float],
                       n_schedule: Sequence[int] = DEFAULT_N_SCHEDULE, eps: float = 1e-10,
                       frobenius_schedule: Optional[Sequence[int]] = DEFAULT_FROBENIUS_SCHEDULE,
                       point_index: int = 0, sections: Optional[Sequence[Section]] = None) -> TheoremBReport:
    """
    Drift estimate, displacement curve and Abel-Cesàro comparison of the
    u_λ series terms at one grid point.

    If zero drift is classified the displacement curve must be strictly
    decreasing; otherwise the report carries an anomaly. With nonzero drift,
    sections that violate the almost-invariance bound are flagged too.
    """
    lams = validate_schedule(lambdas)
    drift = drift_estimate(spec, grid, n_schedule)
    if sections is None:
        sections = [solve_u_lambda(spec, lam, grid, eps) for lam in lams]
    curve = displacement_curve(spec, sections)

    frobenius = None
    if frobenius_schedule:
        point = grid.system.point(grid.coords[point_index])
        frobenius = frobenius_compare(u_lambda_sequence(spec), point, frobenius_schedule)

    report = TheoremBReport(drift=drift, displacement=curve, frobenius=frobenius,
                            hypothesis_holds=drift.zero_drift)
    if drift.zero_drift and not curve.decreasing:
        report.anomalies.append(
            "Drift classified as zero but displacement of u_λ is not strictly decreasing: "
            + ", ".join(f"{v:.3e}" for v in curve.values))
    if not drift.zero_drift:
        report.anomalies.extend(almost_invariance_contradiction(drift, sections, curve.values))

    for message in report.anomalies:
        logger.warning(message)
    return report
