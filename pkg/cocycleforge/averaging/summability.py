"""
Numeric comparisons of Cesàro and Abel summation along a paired schedule
λ_k = 1 - 1/N_k.
"""

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..dynamics.base import BasePoint, CircleRotation, FiniteCyclic
from ..dynamics.fields import CallableField, ConstantField, ConstantOrthogonalField, IdentityField
from ..logging_config import get_logger
from .twisted import TwistedSequence, abel_twisted_grid, cesaro_means, iter_term_blocks

logger = get_logger("summability")

DEFAULT_SCHEDULE = (100, 1000, 10000)
ABEL_TAIL = 1e-13


class AveragingReport(BaseModel):
    """Cesàro and Abel values along a paired schedule."""
    sequence: str
    schedule: List[int]
    cesaro: List[Tuple[int, List[float]]] = Field(default_factory=list)
    abel: List[Tuple[float, List[float]]] = Field(default_factory=list)
    discrepancies: List[float] = Field(default_factory=list)
    discrepancy: float = 0.0
    cesaro_envelope: List[float] = Field(default_factory=list)
    sup_bound: float = 0.0
    bounded: bool = True
    tracking: Optional[bool] = None


def _validate_schedule(schedule: Sequence[int]) -> List[int]:
    points = [int(n) for n in schedule]
    if not points:
        raise ValueError("Schedule must not be empty")
    if any(n < 2 for n in points):
        raise ValueError(f"Schedule entries must be at least 2 so that λ = 1 - 1/N lies in (0, 1), got {points}")
    if any(b <= a for a, b in zip(points, points[1:])):
        raise ValueError(f"Schedule must be strictly increasing, got {points}")
    return points


def _observed_sup(seq: TwistedSequence, x: BasePoint, n: int) -> float:
    sup = 0.0
    for _, z, _ in iter_term_blocks(seq, x.as_array(), n):
        sup = max(sup, float(np.max(np.linalg.norm(z, axis=-1))))
    return sup


def frobenius_compare(seq: TwistedSequence, x: BasePoint, schedule: Sequence[int] = DEFAULT_SCHEDULE,
                      eps_tail: float = ABEL_TAIL) -> AveragingReport:
    """
    Pair σ_{N_k}(x) with the Abel mean at λ_k = 1 - 1/N_k.

    When the Cesàro means converge the discrepancies tend to zero along the
    schedule.
    """
    points = _validate_schedule(schedule)
    coords = x.as_array()
    means = cesaro_means(seq, coords, points)

    report = AveragingReport(sequence=seq.name, schedule=points, sup_bound=seq.sup_bound)
    for n in points:
        lam = 1.0 - 1.0 / n
        abel = abel_twisted_grid(seq, coords, lam, eps_tail)[0]
        cesaro = means[n][0]
        report.cesaro.append((n, cesaro.tolist()))
        report.abel.append((lam, abel.tolist()))
        report.cesaro_envelope.append(float(np.linalg.norm(cesaro)))
        report.discrepancies.append(float(np.linalg.norm(abel - cesaro)))
        logger.debug(f"{seq.name}: N={n} |σ|={report.cesaro_envelope[-1]:.3e} "
                     f"discrepancy={report.discrepancies[-1]:.3e}")

    report.discrepancy = max(report.discrepancies)
    return report


def tauberian_probe(seq: TwistedSequence, x: BasePoint, schedule: Sequence[int] = DEFAULT_SCHEDULE,
                    tolerance: float = 1e-12, eps_tail: float = ABEL_TAIL) -> AveragingReport:
    """
    Check numerically that Cesàro values track Abel values for a bounded sequence.

    The sequence counts as tracking when the last discrepancy is at most
    max(tolerance, 10·sup|z|/N_last). This is a diagnostic, not a proof.
    """
    report = frobenius_compare(seq, x, schedule, eps_tail)
    observed = _observed_sup(seq, x, report.schedule[-1])
    report.bounded = math.isfinite(observed) and observed <= seq.sup_bound * (1.0 + 1e-9) + 1e-15
    if not report.bounded:
        logger.warning(f"{seq.name}: observed |z_j| up to {observed:.3e} exceeds the bound {seq.sup_bound:.3e}")
        report.tracking = False
        return report

    allowed = max(tolerance, 10.0 * seq.sup_bound / report.schedule[-1])
    report.tracking = report.discrepancies[-1] <= allowed
    return report


def scalar_sequence(kind: str, value: float = 1.0) -> Tuple[TwistedSequence, BasePoint]:
    """
    Real scalar test sequences, one-dimensional fibers throughout.

    "constant" (z_j = c) and "alternating" (z_j = c·(-1)^j) twist a constant
    over a one-point base by 1 or -1. "cosine" (z_j = c·cos j) is the
    untwisted orbit of c·cos(2πθ) under the circle rotation by 1/(2π),
    started at θ = 0.

    Returns:
        tuple: (sequence, base point)
    """
    amplitude = float(value)
    if kind == "constant":
        system = FiniteCyclic(1)
        seq = TwistedSequence(system, IdentityField(1), ConstantField([amplitude]), name=kind)
    elif kind == "alternating":
        system = FiniteCyclic(1)
        seq = TwistedSequence(system, ConstantOrthogonalField([[-1.0]], name="reflection"),
                              ConstantField([amplitude]), name=kind)
    elif kind == "cosine":
        system = CircleRotation(1.0 / (2.0 * math.pi))
        wave = CallableField(lambda theta: amplitude * np.cos(2.0 * math.pi * np.asarray(theta)),
                             dim=1, sup_bound=abs(amplitude), name="cosine")
        seq = TwistedSequence.untwisted(system, wave, name=kind)
    else:
        raise ValueError(f"Unknown scalar sequence: {kind}")
    return seq, system.point(0)
