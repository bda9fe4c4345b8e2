"""
Twisted Birkhoff sums and their Cesàro and Abel averages.

For a twist 𝓕 and an observable f the terms are
z_j(x) = 𝓕(x)𝓕(Tx)⋯𝓕(T^{j-1}x) f(T^j x). Terms are produced in blocks of
shape (B, M, l) for a batch of M base points; every point is computed
independently, so splitting a grid into chunks gives bitwise identical
results. Long sums are pairwise within a block and compensated across blocks.
"""

import math
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..dynamics.base import BasePoint, BaseSystem, SampleGrid
from ..dynamics.fields import IdentityField, OrthogonalField, VectorField
from ..isometry.euclidean import FiberVector
from ..isometry.orthogonal import REORTHONORMALIZE_EVERY, gram_schmidt
from ..logging_config import get_logger
from .summation import CompensatedSum, block_sum

logger = get_logger("averaging")

BLOCK_SIZE = 1024


class TwistedSequence:
    """The sequence z_j for a twist 𝓕 and an observable f over a base system."""

    def __init__(self, system: BaseSystem, twist: OrthogonalField, observable: VectorField,
                 name: str = "twisted"):
        if twist.dim != observable.dim:
            raise ValueError(f"Twist has dimension {twist.dim} but observable has dimension {observable.dim}")
        self.system = system
        self.twist = twist
        self.observable = observable
        self.name = name

    @classmethod
    def untwisted(cls, system: BaseSystem, observable: VectorField, name: str = "birkhoff") -> "TwistedSequence":
        return cls(system, IdentityField(observable.dim), observable, name=name)

    @property
    def dim(self) -> int:
        return self.observable.dim

    @property
    def sup_bound(self) -> float:
        """Upper bound on every |z_j|; the twist is isometric."""
        return float(self.observable.bound())

    def describe(self) -> dict:
        return {"name": self.name, "twist": self.twist.describe(),
                "observable": self.observable.describe()}


def _power_stack(matrix: np.ndarray, count: int) -> np.ndarray:
    """A^0, ..., A^count, each re-orthonormalized."""
    dim = matrix.shape[0]
    out = np.empty((count + 1, dim, dim))
    out[0] = np.eye(dim)
    for i in range(count):
        out[i + 1] = out[i] @ matrix
    return gram_schmidt(out)


def iter_term_blocks(seq: TwistedSequence, coords: np.ndarray, n_terms: int,
                     stops: Sequence[int] = ()) -> Iterator[Tuple[int, np.ndarray, np.ndarray]]:
    """
    Generate the terms z_0, ..., z_{n_terms-1} block by block.

    Args:
        seq: The twisted sequence
        coords: Base coordinates, shape (M,) or (M, d)
        n_terms: Number of terms
        stops: Indices at which a block must end (partial sums are read there)

    Yields:
        tuple: (j0, z, product) where z has shape (B, M, l) holding
        z_{j0}, ..., z_{j0+B-1} and product is 𝓕(x)⋯𝓕(T^{j0+B-1}x)
    """
    system = seq.system
    y = np.asarray(coords)
    count = y.shape[0]
    dim = seq.dim
    prod = np.broadcast_to(np.eye(dim), (count, dim, dim)).copy()
    const = seq.twist.constant_matrix()
    powers = _power_stack(const, BLOCK_SIZE) if const is not None else None

    boundaries = sorted({int(s) for s in stops if 0 < s < n_terms} | {int(n_terms)})
    j0 = 0
    factors = 0
    for end in boundaries:
        while j0 < end:
            size = min(BLOCK_SIZE, end - j0)
            ys = np.empty((size,) + y.shape, dtype=y.dtype)
            for i in range(size):
                ys[i] = y
                y = system.advance(y)
            flat = ys.reshape((size * count,) + y.shape[1:])
            f = seq.observable.evaluate(system, flat).reshape(size, count, dim)

            if powers is not None:
                twisted_f = np.einsum("bij,bmj->bmi", powers[:size], f)
                z = np.einsum("mij,bmj->bmi", prod, twisted_f)
                prod = gram_schmidt(prod @ powers[size])
            else:
                tw = seq.twist.evaluate(system, flat).reshape(size, count, dim, dim)
                z = np.empty((size, count, dim))
                for i in range(size):
                    z[i] = np.einsum("mij,mj->mi", prod, f[i])
                    prod = prod @ tw[i]
                    factors += 1
                    if factors % REORTHONORMALIZE_EVERY == 0:
                        prod = gram_schmidt(prod)
            yield j0, z, prod
            j0 += size


def partial_sums(seq: TwistedSequence, coords: np.ndarray,
                 checkpoints: Sequence[int]) -> List[Tuple[int, np.ndarray, np.ndarray]]:
    """
    Partial sums S_N = Σ_{j<N} z_j at each checkpoint, in one pass.

    Returns:
        list: (N, S_N, product through index N-1) for each checkpoint N
    """
    points = sorted({int(n) for n in checkpoints})
    if not points or points[0] < 1:
        raise ValueError(f"Checkpoints must be positive integers, got {list(checkpoints)}")
    coords = np.asarray(coords)
    acc = CompensatedSum((coords.shape[0], seq.dim))
    out = []
    wanted = set(points)
    for j0, z, prod in iter_term_blocks(seq, coords, points[-1], stops=points):
        acc.add(block_sum(z))
        end = j0 + z.shape[0]
        if end in wanted:
            out.append((end, acc.value.copy(), prod.copy()))
    return out


def discounted_sum(seq: TwistedSequence, coords: np.ndarray, lam: float, n_terms: int) -> np.ndarray:
    """Σ_{j<n_terms} λ^j z_j over a coordinate batch."""
    coords = np.asarray(coords)
    acc = CompensatedSum((coords.shape[0], seq.dim))
    for j0, z, _ in iter_term_blocks(seq, coords, n_terms):
        weights = np.power(float(lam), j0 + np.arange(z.shape[0]))
        acc.add(block_sum(weights[:, None, None] * z))
    return acc.value


def truncation_index(lam: float, eps: float, sup: float) -> int:
    """
    Smallest N with λ^N·sup/(1-λ) ≤ ε, the tail bound of a geometric series.

    Raises:
        ValueError: If λ is not in [0, 1) or ε is not positive
    """
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"λ must lie in [0, 1), got {lam}")
    if not eps > 0.0:
        raise ValueError(f"Tail tolerance must be positive, got {eps}")
    if sup <= 0.0 or lam == 0.0:
        return 1
    ratio = eps * (1.0 - lam) / sup
    if ratio >= 1.0:
        return 1
    return max(1, int(math.ceil(math.log(ratio) / math.log(lam))))


def _check_lambda(lam: float) -> None:
    if not 0.0 < lam < 1.0:
        raise ValueError(f"λ must lie in (0, 1), got {lam}")


def cesaro_means(seq: TwistedSequence, coords: np.ndarray, schedule: Sequence[int]) -> Dict[int, np.ndarray]:
    """σ_N = S_N / N for every N in the schedule, from one pass."""
    return {n: s / n for n, s, _ in partial_sums(seq, coords, schedule)}


def cesaro_twisted_grid(seq: TwistedSequence, coords: np.ndarray, n: int) -> np.ndarray:
    if n < 1:
        raise ValueError(f"Cesàro mean needs N ≥ 1, got {n}")
    return cesaro_means(seq, coords, [n])[n]


def cesaro_twisted(seq: TwistedSequence, x: BasePoint, n: int) -> FiberVector:
    """(1/N) Σ_{j<N} z_j(x)."""
    return FiberVector(cesaro_twisted_grid(seq, x.as_array(), n)[0])


def abel_twisted_grid(seq: TwistedSequence, coords: np.ndarray, lam: float, eps_tail: float) -> np.ndarray:
    _check_lambda(lam)
    n_terms = truncation_index(lam, eps_tail, seq.sup_bound)
    logger.debug(f"Abel mean λ={lam}: {n_terms} terms for tail {eps_tail:g}")
    return (1.0 - lam) * discounted_sum(seq, coords, lam, n_terms)


def abel_twisted(seq: TwistedSequence, x: BasePoint, lam: float, eps_tail: float) -> FiberVector:
    """(1-λ) Σ λ^j z_j(x), truncated so the tail is at most eps_tail."""
    return FiberVector(abel_twisted_grid(seq, x.as_array(), lam, eps_tail)[0])


def exp_average(system: BaseSystem, f: VectorField, x: BasePoint, lam: float,
                eps_tail: float, normalised: bool = True) -> FiberVector:
    """
    The λ-average of f along the orbit of x.

    With `normalised` this is S_λ(f, x) = Σλ^j f(T^j x) / Σλ^j; otherwise the
    raw discounted sum Σλ^j f(T^j x) is returned.
    """
    value = abel_twisted(TwistedSequence.untwisted(system, f), x, lam, eps_tail)
    if normalised:
        return value
    return FiberVector(value.coords / (1.0 - lam))


def birkhoff_average(system: BaseSystem, f: VectorField, x: BasePoint, n: int) -> FiberVector:
    """(1/N) Σ_{j<N} f(T^j x)."""
    return cesaro_twisted(TwistedSequence.untwisted(system, f), x, n)


def space_average(f: VectorField, grid: SampleGrid) -> np.ndarray:
    """Grid quadrature of ∫ f dμ."""
    return grid.mean(f.evaluate(grid.system, grid.coords))


def von_neumann_residual(seq: TwistedSequence, grid: SampleGrid, n: int) -> float:
    """Grid-L² distance between the N-th and 2N-th Cesàro means of z_j."""
    if n < 1:
        raise ValueError(f"Cesàro mean needs N ≥ 1, got {n}")
    means = cesaro_means(seq, grid.coords, [n, 2 * n])
    diff = means[n] - means[2 * n]
    return float(math.sqrt(np.mean(np.sum(diff * diff, axis=-1))))


def invariant_function_residual(seq: TwistedSequence, grid: SampleGrid, n: int) -> float:
    """
    sup over the grid of |h(Tx) - 𝓕(x)^{-1} h(x)| for h the N-th Cesàro mean.

    For convergent twisted means the limit h solves h(Tx) = 𝓕(x)^{-1} h(x),
    so this tends to 0 like 2·sup|f|/N.
    """
    system = grid.system
    coords = np.concatenate([grid.coords, grid.stepped(1)])
    h = cesaro_twisted_grid(seq, coords, n)
    size = len(grid)
    twist = seq.twist.evaluate(system, grid.coords)
    pulled = np.einsum("mji,mj->mi", twist, h[:size])
    return float(np.max(np.linalg.norm(h[size:] - pulled, axis=-1)))


def twisted_isometry_invariance(seq: TwistedSequence, x: BasePoint, n: int, matrix) -> float:
    """
    |mean of A·z_j - A·(mean of z_j)| for a fixed orthogonal A.

    The lifted sequence is the twisted sum seen from the point (x, A) of X × U(l).
    """
    a = np.asarray(matrix, dtype=float)
    means = cesaro_twisted_grid(seq, x.as_array(), n)[0]
    coords = x.as_array()
    acc = CompensatedSum((seq.dim,))
    for _, z, _ in iter_term_blocks(seq, coords, n):
        acc.add(block_sum(np.einsum("ij,bj->bi", a, z[:, 0, :])))
    lifted = acc.value / n
    return float(np.linalg.norm(lifted - a @ means))


def frobenius_kernel_form(seq: TwistedSequence, x: BasePoint, lam: float,
                          n_terms: Optional[int] = None, eps_tail: float = 1e-12) -> FiberVector:
    """
    The Abel mean rewritten through Cesàro means,
    (1-λ)Σλ^j z_j = (1-λ)² Σ_n (n+1)λ^n σ_{n+1}.

    Args:
        n_terms: Number of terms; by default enough for the tail of
            (1-λ)²·sup·Σ_{n≥N}(n+1)λ^n to fall below eps_tail
    """
    _check_lambda(lam)
    sup = seq.sup_bound
    if n_terms is None:
        n_terms = truncation_index(lam, eps_tail * (1.0 - lam), sup)
        # (n+1)λ^n decays slower than λ^n; pad until the polynomial factor is covered.
        while sup > 0 and ((n_terms + 1) * (1.0 - lam) + lam) * lam ** n_terms * sup > eps_tail:
            n_terms += max(1, n_terms // 8)

    coords = x.as_array()
    running = CompensatedSum((coords.shape[0], seq.dim))
    acc = CompensatedSum((coords.shape[0], seq.dim))
    for j0, z, _ in iter_term_blocks(seq, coords, n_terms):
        for i in range(z.shape[0]):
            running.add(z[i])
            # λ^n s_n with s_n = (n+1)σ_{n+1}
            acc.add(lam ** (j0 + i) * running.value)
    return FiberVector((1.0 - lam) ** 2 * acc.value[0])
