"""
Brute-force solver for λ u(x+1) - Ψ(x) u(x) = ρ(x) on Z/p.

The lp×lp block system is assembled for its residual and conditioning. The
solution itself is found by closing the backward recursion
u(x) = Ψ(x)^{-1}(λ u(x+1) - ρ(x)) around the cycle, an l×l solve whose
propagation step is a λ-contraction. At λ = 1 a singular monodromy falls
back to the minimum-norm solution of the block system.
"""

from typing import List, Optional

import numpy as np
from pydantic import BaseModel

from ..dynamics.base import FiniteCyclic
from ..dynamics.cocycle import CocycleSpec
from ..dynamics.fields import TableOrthogonalField, TableVectorField
from ..logging_config import get_logger

logger = get_logger("oracles.cyclic")

SINGULAR_TOL = 1e-10


class CyclicOracle(BaseModel):
    period: int
    dim: int
    lam: float
    solution: Optional[List[List[float]]] = None
    residual: Optional[float] = None
    condition_number: float
    kernel_dim: int = 0
    solvable: bool = True
    method: str = "monodromy"

    @property
    def singular(self) -> bool:
        return self.kernel_dim > 0

    def values(self) -> np.ndarray:
        if self.solution is None:
            raise ValueError("System has no solution")
        return np.asarray(self.solution, dtype=float)


def block_system(psi: np.ndarray, lam: float) -> np.ndarray:
    """Matrix of u -> (λu(x+1) - Ψ(x)u(x))_x acting on stacked states."""
    period, dim = psi.shape[0], psi.shape[-1]
    a = np.zeros((period * dim, period * dim))
    for x in range(period):
        rows = slice(x * dim, (x + 1) * dim)
        nxt = (x + 1) % period
        a[rows, nxt * dim:(nxt + 1) * dim] += lam * np.eye(dim)
        a[rows, x * dim:(x + 1) * dim] -= psi[x]
    return a


def _backward(psi: np.ndarray, rho: np.ndarray, lam: float, start: np.ndarray) -> np.ndarray:
    """u(p) = start, u(x) = Ψ(x)ᵀ(λu(x+1) - ρ(x)) for x = p-1, ..., 0."""
    period, dim = rho.shape
    out = np.empty((period + 1, dim))
    out[period] = start
    for x in range(period - 1, -1, -1):
        out[x] = psi[x].T @ (lam * out[x + 1] - rho[x])
    return out


def cyclic_solve(spec: CocycleSpec, lam: float) -> CyclicOracle:
    """
    Exact solution of the hyperbolized (λ < 1) or genuine (λ = 1) equation on a cyclic base.

    Raises:
        ValueError: If the base is not cyclic or λ is not in (0, 1]
    """
    if not isinstance(spec.system, FiniteCyclic):
        raise ValueError(f"cyclic_solve needs a cyclic base, got {spec.system.kind}")
    if not 0.0 < lam <= 1.0:
        raise ValueError(f"λ must lie in (0, 1], got {lam}")

    period, dim = spec.system.period, spec.dim
    states = np.arange(period, dtype=np.int64)
    psi = spec.psi.evaluate(spec.system, states)
    rho = spec.rho.evaluate(spec.system, states)
    a = block_system(psi, lam)
    rhs = rho.reshape(-1)

    # Affine return map u(0) -> L u(0) + e of the backward recursion.
    e = _backward(psi, rho, lam, np.zeros(dim))[0]
    linear = np.column_stack([_backward(psi, np.zeros_like(rho), lam, col)[0] for col in np.eye(dim)])
    closing = np.eye(dim) - linear
    closing_cond = float(np.linalg.cond(closing))

    oracle = CyclicOracle(period=period, dim=dim, lam=lam, condition_number=float(np.linalg.cond(a)))
    if lam < 1.0 or closing_cond < 1.0 / SINGULAR_TOL:
        u0 = np.linalg.solve(closing, e)
        u = _backward(psi, rho, lam, u0)[:period]
    else:
        oracle.method = "min_norm"
        s = np.linalg.svd(a, compute_uv=False)
        oracle.kernel_dim = int(np.count_nonzero(s < SINGULAR_TOL * s[0]))
        flat, *_ = np.linalg.lstsq(a, rhs, rcond=SINGULAR_TOL)
        u = flat.reshape(period, dim)

    res = float(np.max(np.abs(a @ u.reshape(-1) - rhs)))
    oracle.residual = res
    oracle.solvable = res <= SINGULAR_TOL * max(1.0, float(np.max(np.abs(rhs))))
    if oracle.solvable:
        oracle.solution = u.tolist()
    else:
        logger.warning(f"Cyclic system with p={period}, λ={lam} is inconsistent (residual {res:.3e})")
    if oracle.kernel_dim:
        logger.info(f"Cyclic system with p={period}, λ={lam} has a {oracle.kernel_dim}-dimensional kernel")
    return oracle


def haar_orthogonal(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed element of O(dim) from the QR factorization of a Gaussian matrix."""
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    d = np.diag(r)
    return q * (np.sign(d) + (d == 0))


def random_cyclic_spec(period: int, dim: int, rng: np.random.Generator) -> CocycleSpec:
    """Random Ψ (Haar per state) and Gaussian ρ on Z/period."""
    system = FiniteCyclic(period)
    psi = np.stack([haar_orthogonal(dim, rng) for _ in range(period)])
    rho = rng.standard_normal((period, dim))
    return CocycleSpec(system, TableOrthogonalField(psi, name="cyclic_random"),
                       TableVectorField(rho, name="cyclic_random"), name=f"cyclic_random[p={period},l={dim}]")
