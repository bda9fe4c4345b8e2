"""
Exact Fourier solution of the vortex equation

    λ u(θ + α) - e^{iβ} u(θ) = ρ(θ)

on the circle, coefficient by coefficient: û_k = ρ̂_k / (λ e^{2πikα} - e^{iβ}).
"""

import math
from typing import Dict, List, Mapping, Optional

import numpy as np
from pydantic import BaseModel, Field

from ..dynamics.fields import FourierField
from ..logging_config import get_logger

logger = get_logger("oracles.fourier")

DEFAULT_DENOM_THRESHOLD = 1e-8


class FourierOracle(BaseModel):
    """Solution coefficients with the small-denominator report."""
    alpha: float
    beta: float
    lam: float = 1.0
    denom_threshold: float = DEFAULT_DENOM_THRESHOLD
    rho: List[List[float]] = Field(default_factory=list)
    solution: List[List[float]] = Field(default_factory=list)
    denominators: List[List[float]] = Field(default_factory=list)
    min_denominator: Optional[float] = None
    rejected: List[int] = Field(default_factory=list)

    @property
    def complete(self) -> bool:
        return not self.rejected

    def solution_coefficients(self) -> Dict[int, complex]:
        return {int(k): complex(re, im) for k, re, im in self.solution}

    def as_field(self) -> FourierField:
        """The retained part of the solution as a closed-form field."""
        return FourierField(self.solution_coefficients(), name="fourier_oracle")

    def evaluate(self, theta) -> np.ndarray:
        """u(θ) as complex values, θ in turns."""
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape, dtype=complex)
        for k, c in self.solution_coefficients().items():
            out += c * np.exp(2j * math.pi * k * theta)
        return out

    def analytic_residual(self) -> float:
        """max_k |û_k (λe^{2πikα} - e^{iβ}) - ρ̂_k| over the retained harmonics."""
        rho = {int(k): complex(re, im) for k, re, im in self.rho}
        worst = 0.0
        for k, c in self.solution_coefficients().items():
            d = self.lam * np.exp(2j * math.pi * k * self.alpha) - np.exp(1j * self.beta)
            worst = max(worst, abs(c * d - rho.get(k, 0j)))
        return float(worst)


def fourier_solve(alpha: float, beta: float, rho_hat: Mapping[int, complex],
                  denom_threshold: float = DEFAULT_DENOM_THRESHOLD, lam: float = 1.0) -> FourierOracle:
    """
    Solve the vortex equation for a trigonometric polynomial ρ.

    Harmonics whose denominator falls below denom_threshold are rejected and
    listed in the report; they are never dropped silently.

    Args:
        alpha: Rotation number in turns
        beta: Fiber rotation in radians
        rho_hat: Finite map k -> ρ̂_k
        denom_threshold: Smallest accepted |λe^{2πikα} - e^{iβ}|
        lam: 1 for the genuine equation, λ in (0, 1) for the hyperbolized one

    Raises:
        ValueError: If λ is not in (0, 1] or the threshold is negative
    """
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"λ must lie in (0, 1], got {lam}")
    if denom_threshold < 0:
        raise ValueError(f"Denominator threshold must be non-negative, got {denom_threshold}")

    oracle = FourierOracle(alpha=alpha, beta=beta, lam=lam, denom_threshold=denom_threshold)
    for k in sorted(rho_hat):
        c = complex(rho_hat[k])
        if c == 0:
            continue
        d = lam * np.exp(2j * math.pi * k * alpha) - np.exp(1j * beta)
        size = float(abs(d))
        oracle.rho.append([int(k), c.real, c.imag])
        oracle.denominators.append([int(k), size])
        if size < denom_threshold or size == 0.0:
            oracle.rejected.append(int(k))
            continue
        u = c / d
        oracle.solution.append([int(k), u.real, u.imag])

    if oracle.denominators:
        oracle.min_denominator = min(size for _, size in oracle.denominators)
    if oracle.rejected:
        logger.warning(f"Small denominators rejected harmonics {oracle.rejected} "
                       f"(threshold {denom_threshold:g})")
    return oracle
