"""Sections x -> R^l sampled on a grid or given in closed form."""

from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..dynamics.base import SampleGrid
from ..dynamics.fields import CallableField, VectorField

Evaluator = Callable[[np.ndarray], np.ndarray]


class Section:
    """
    Values of a section on a grid, together with its values one T-step ahead.

    A section is evaluable off the grid when it carries an evaluator (series
    or closed form) or when its base is cyclic and the grid covers every
    state; otherwise only the stored grid and stepped-grid values are known.
    """

    def __init__(self, grid: SampleGrid, values, *, step_values=None,
                 evaluator: Optional[Evaluator] = None, representation: str = "grid",
                 lam: Optional[float] = None, tolerance: Optional[float] = None,
                 sup_bound: Optional[float] = None, name: str = "section"):
        v = np.asarray(values, dtype=float)
        if v.ndim != 2 or v.shape[0] != len(grid):
            raise ValueError(f"Section values must have shape ({len(grid)}, l), got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"Section {name!r} has non-finite values")
        v.setflags(write=False)

        self.grid = grid
        self.values = v
        self.evaluator = evaluator
        self.representation = representation
        self.lam = lam
        self.tolerance = tolerance
        self.name = name
        self.sup_norm = float(np.max(np.linalg.norm(v, axis=-1))) if len(v) else 0.0
        self._sup_bound = sup_bound
        self.step_values = None

        self._state_index = None
        if grid.system.kind == "cyclic" and len(grid) == grid.system.period:
            index = np.empty(grid.system.period, dtype=np.int64)
            index[np.asarray(grid.coords, dtype=np.int64)] = np.arange(len(grid))
            self._state_index = index

        if step_values is None and (evaluator is not None or self._state_index is not None):
            step_values = self.evaluate(grid.stepped(1))
        if step_values is not None:
            step_values = np.asarray(step_values, dtype=float)
            if step_values.shape != v.shape:
                raise ValueError(f"Stepped values must have shape {v.shape}, got {step_values.shape}")
            step_values.setflags(write=False)
        self.step_values = step_values

    @classmethod
    def from_field(cls, grid: SampleGrid, field: VectorField, name: str = "closed_form") -> "Section":
        """A closed-form section sampled on a grid."""
        system = grid.system
        return cls(grid, field.evaluate(system, grid.coords),
                   evaluator=lambda coords: field.evaluate(system, coords),
                   representation="closed_form", sup_bound=field.bound(), name=name)

    @property
    def dim(self) -> int:
        return self.values.shape[1]

    def evaluate(self, coords: np.ndarray) -> np.ndarray:
        """
        Values at arbitrary base coordinates.

        Raises:
            ValueError: If the section has no way to be evaluated at coords
        """
        if self.evaluator is not None:
            return np.asarray(self.evaluator(coords), dtype=float)
        if self._state_index is not None:
            return self.values[self._state_index[np.asarray(coords, dtype=np.int64)]]
        if np.array_equal(coords, self.grid.coords):
            return self.values
        if self.step_values is not None and np.array_equal(coords, self.grid.stepped(1)):
            return self.step_values
        raise ValueError(f"Section {self.name!r} is grid-sampled and cannot be evaluated off its grid")

    def at_step(self) -> np.ndarray:
        """Values at T(grid)."""
        if self.step_values is None:
            raise ValueError(f"Section {self.name!r} is not evaluable one step ahead of its grid")
        return self.step_values

    def bound(self) -> float:
        """Bound used to truncate series built on this section."""
        if self._sup_bound is not None:
            return float(self._sup_bound)
        step_sup = 0.0 if self.step_values is None else float(np.max(np.linalg.norm(self.step_values, axis=-1)))
        return max(self.sup_norm, step_sup)

    def as_field(self) -> VectorField:
        return CallableField(self.evaluate, self.dim, self.bound(), name=self.name)

    def metadata(self) -> Dict[str, Any]:
        return {"name": self.name, "representation": self.representation, "lam": self.lam,
                "tolerance": self.tolerance, "sup_norm": self.sup_norm, "grid": self.grid.descriptor}

    def __repr__(self) -> str:
        return f"Section({self.name}, {self.representation}, sup={self.sup_norm:.3e})"


def grid_distances(a: np.ndarray, b: np.ndarray) -> Tuple[float, float, float]:
    """(sup, L¹, L²) distances between sampled values under grid quadrature."""
    norms = np.linalg.norm(np.asarray(a) - np.asarray(b), axis=-1)
    return float(np.max(norms)), float(np.mean(norms)), float(np.sqrt(np.mean(norms * norms)))


class SweepEntry(BaseModel):
    lam: float
    n_terms: int
    sup_u: float
    residual_lambda: float
    residual_one: float
    sup_dist: Optional[float] = None
    l1_dist: Optional[float] = None
    l2_dist: Optional[float] = None


class LambdaSweep(BaseModel):
    """u_λ along an increasing λ schedule."""
    model_config = ConfigDict(arbitrary_types_allowed=True)

    schedule: List[float]
    eps: float
    entries: List[SweepEntry] = Field(default_factory=list)
    sections: List[Any] = Field(default_factory=list, exclude=True)
    distances_decreasing: Optional[bool] = None
    possible_discontinuous_limit: bool = False
