"""
Cocycles of isometries over a base system, the skew-product map and its
hyperbolized inverse-time version.
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel, Field

from ..isometry.euclidean import EuclideanIsometry, FiberVector
from ..isometry.orthogonal import REORTHONORMALIZE_EVERY, gram_schmidt
from ..logging_config import get_logger
from .base import BasePoint, BaseSystem, make_grid
from .fields import OrthogonalField, PulledBackField, VectorField

logger = get_logger("cocycle")

SUP_GRID_SIZE = 1024
# Default predicted distance below which attractor errors are not taken relative.
RELATIVE_FLOOR = 1e-4


class CocycleSpec:
    """
    The pair (Ψ, ρ) over a base system.

    Attributes:
        system: Base map T
        psi: Orthogonal part Ψ
        rho: Translation part ρ
        rho_sup: max |ρ| over the default sup grid (plus golden-offset grid)
        rho_bound: Guaranteed upper bound on sup |ρ| used for tail estimates
    """

    def __init__(self, system: BaseSystem, psi: OrthogonalField, rho: VectorField, name: str = "custom"):
        if psi.dim != rho.dim:
            raise ValueError(f"Ψ has dimension {psi.dim} but ρ has dimension {rho.dim}")
        self.system = system
        self.psi = psi
        self.rho = rho
        self.name = name

        sup = 0.0
        for golden in (False, True):
            grid = make_grid(system, SUP_GRID_SIZE, golden_offset=golden)
            values = rho.evaluate(system, grid.coords)
            if not np.all(np.isfinite(values)):
                raise ValueError("ρ takes non-finite values on the sample grid")
            sup = max(sup, float(np.max(np.linalg.norm(values, axis=-1))))
        self.rho_sup = sup
        self.rho_bound = max(float(rho.bound()), sup)

    @property
    def dim(self) -> int:
        return self.psi.dim

    def pulled_back_rho(self) -> VectorField:
        """y -> Ψ(y)^{-1} ρ(y), the observable of the twisted series."""
        return PulledBackField(self.psi, self.rho)

    def isometry_at(self, x: BasePoint) -> EuclideanIsometry:
        coords = x.as_array()
        return EuclideanIsometry(self.psi.evaluate(self.system, coords)[0],
                                 self.rho.evaluate(self.system, coords)[0])

    def describe(self) -> dict:
        return {"name": self.name, "system": self.system.describe(),
                "psi": self.psi.describe(), "rho": self.rho.describe()}

    def __repr__(self) -> str:
        return f"CocycleSpec({self.name}, dim={self.dim}, base={self.system.kind})"


class SkewState:
    """A point (x, v) of X × R^l."""

    __slots__ = ("x", "v")

    def __init__(self, x: BasePoint, v):
        self.x = x
        self.v = v if isinstance(v, FiberVector) else FiberVector(v)

    def __repr__(self) -> str:
        return f"SkewState({self.x!r}, {self.v!r})"


def cocycle_n_grid(spec: CocycleSpec, coords: np.ndarray, n: int):
    """
    Vectorised I(n, x) over a coordinate batch.

    Returns:
        tuple: (Q, t) with Q of shape (M, l, l) and t of shape (M, l), so that
        I(n, x) v = Q v + t
    """
    if n < 0:
        raise ValueError(f"Cocycle power must be non-negative, got {n}")
    count = np.shape(coords)[0]
    q = np.broadcast_to(np.eye(spec.dim), (count, spec.dim, spec.dim)).copy()
    t = np.zeros((count, spec.dim))
    y = np.asarray(coords)
    for j in range(n):
        psi = spec.psi.evaluate(spec.system, y)
        rho = spec.rho.evaluate(spec.system, y)
        q = psi @ q
        t = np.einsum("mij,mj->mi", psi, t) + rho
        y = spec.system.advance(y)
        if (j + 1) % REORTHONORMALIZE_EVERY == 0:
            q = gram_schmidt(q)
    return q, t


def cocycle_n(spec: CocycleSpec, x: BasePoint, n: int) -> EuclideanIsometry:
    """I(n, x) = I(T^{n-1}x) ∘ ... ∘ I(x); I(0, x) is the identity."""
    q, t = cocycle_n_grid(spec, x.as_array(), n)
    return EuclideanIsometry(q[0], t[0])


def skew_step(spec: CocycleSpec, state: SkewState) -> SkewState:
    """(x, v) -> (Tx, Ψ(x)v + ρ(x))."""
    g = spec.isometry_at(state.x)
    return SkewState(spec.system.step(state.x, 1), g.apply(state.v))


def hyperbolized_step(spec: CocycleSpec, lam: float, state: SkewState,
                      direction: str = "forward") -> SkewState:
    """
    One step of the hyperbolized skew product.

    "forward" applies F_λ(x, v) = (Tx, (Ψ(x)v + ρ(x)) / λ). "backward"
    applies its inverse G_λ(x, v) = (T^{-1}x, Ψ(T^{-1}x)^{-1}(λv - ρ(T^{-1}x))),
    whose fiber maps are λ-contractions and whose attractor is the graph of u_λ.

    Raises:
        ValueError: If λ is not in (0, 1) or the direction is unknown
    """
    if not 0.0 < lam < 1.0:
        raise ValueError(f"λ must lie in (0, 1), got {lam}")
    if direction == "forward":
        g = spec.isometry_at(state.x)
        return SkewState(spec.system.step(state.x, 1), g.apply(state.v).coords / lam)
    elif direction == "backward":
        prev = spec.system.step(state.x, -1)
        g = spec.isometry_at(prev)
        v = g.psi.inverse().apply(lam * state.v.coords - g.rho)
        return SkewState(prev, v)
    else:
        raise ValueError(f"Unknown direction: {direction}")


class AttractorTrace(BaseModel):
    """Distances of a G_λ orbit to the graph of u_λ."""
    lam: float
    eps: float
    relative_floor: float = RELATIVE_FLOOR
    steps: List[int] = Field(default_factory=list)
    distances: List[float] = Field(default_factory=list)
    predicted: List[float] = Field(default_factory=list)
    max_abs_error: float = 0.0
    max_rel_error: Optional[float] = None


def attractor_trace(spec: CocycleSpec, lam: float, x: BasePoint, v0, n_max: int,
                    eps: float = 1e-14, relative_floor: float = RELATIVE_FLOOR) -> AttractorTrace:
    """
    Follow G_λ from (x, v0) and compare |v_n - u_λ(T^{-n}x)| with λ^n·|v0 - u_λ(x)|.

    max_rel_error is taken over the steps whose predicted distance exceeds
    relative_floor; below it only the absolute error counts. It is None when
    no step qualifies.
    """
    from ..solver.hyperbolized import series_u_lambda

    if n_max < 0:
        raise ValueError(f"Number of steps must be non-negative, got {n_max}")
    if not relative_floor > 0.0:
        raise ValueError(f"Relative floor must be positive, got {relative_floor}")

    state = SkewState(x, v0)
    u0 = series_u_lambda(spec, lam, x.as_array(), eps)[0]
    d0 = float(np.linalg.norm(state.v.coords - u0))

    trace = AttractorTrace(lam=lam, eps=eps, relative_floor=relative_floor)
    rel_errors = []
    for n in range(n_max + 1):
        if n > 0:
            state = hyperbolized_step(spec, lam, state, "backward")
        un = series_u_lambda(spec, lam, state.x.as_array(), eps)[0]
        dist = float(np.linalg.norm(state.v.coords - un))
        pred = lam ** n * d0
        trace.steps.append(n)
        trace.distances.append(dist)
        trace.predicted.append(pred)
        trace.max_abs_error = max(trace.max_abs_error, abs(dist - pred))
        if pred > relative_floor:
            rel_errors.append(abs(dist - pred) / pred)

    trace.max_rel_error = max(rel_errors) if rel_errors else None
    logger.debug(f"Attractor trace λ={lam}: d0={d0:.3e}, max abs error {trace.max_abs_error:.3e}")
    return trace
