"""
Isometries v -> Ψv + ρ of R^l and fiber vectors.

For l = 2 a fiber vector can be read as a complex number, which is how the
closed-form oracles and the vortex examples are written.
"""

from typing import Union

import numpy as np

from .orthogonal import OrthogonalMap


class FiberVector:
    """A vector in the fiber R^l."""

    __slots__ = ("_coords",)

    def __init__(self, coords):
        c = np.atleast_1d(np.asarray(coords, dtype=float)).copy()
        if c.ndim != 1:
            raise ValueError(f"FiberVector must be one-dimensional, got shape {c.shape}")
        c.setflags(write=False)
        self._coords = c

    @classmethod
    def zeros(cls, dim: int) -> "FiberVector":
        return cls(np.zeros(dim))

    @classmethod
    def from_complex(cls, z: complex) -> "FiberVector":
        return cls([z.real, z.imag])

    @property
    def coords(self) -> np.ndarray:
        return self._coords

    @property
    def dim(self) -> int:
        return self._coords.shape[0]

    def as_complex(self) -> complex:
        if self.dim != 2:
            raise ValueError("Complex view is only defined in dimension 2")
        return complex(self._coords[0], self._coords[1])

    def norm(self) -> float:
        return float(np.linalg.norm(self._coords))

    def __sub__(self, other: "FiberVector") -> "FiberVector":
        return FiberVector(self._coords - other._coords)

    def __add__(self, other: "FiberVector") -> "FiberVector":
        return FiberVector(self._coords + other._coords)

    def __repr__(self) -> str:
        return f"FiberVector({np.array2string(self._coords, precision=6)})"


VectorLike = Union[FiberVector, np.ndarray, list, tuple]


def _coords_of(v: VectorLike) -> np.ndarray:
    if isinstance(v, FiberVector):
        return v.coords
    return np.asarray(v, dtype=float)


class EuclideanIsometry:
    """The pair (Ψ, ρ) acting as v -> Ψv + ρ."""

    __slots__ = ("_psi", "_rho")

    def __init__(self, psi, rho):
        if not isinstance(psi, OrthogonalMap):
            psi = OrthogonalMap(psi)
        r = np.atleast_1d(np.asarray(_coords_of(rho), dtype=float)).copy()
        if r.shape != (psi.dim,):
            raise ValueError(f"Translation of shape {r.shape} does not match dimension {psi.dim}")
        if not np.all(np.isfinite(r)):
            raise ValueError("Translation entries must be finite")
        r.setflags(write=False)
        self._psi = psi
        self._rho = r

    @classmethod
    def identity(cls, dim: int) -> "EuclideanIsometry":
        return cls(OrthogonalMap.identity(dim), np.zeros(dim))

    @classmethod
    def translation(cls, rho) -> "EuclideanIsometry":
        r = np.atleast_1d(np.asarray(_coords_of(rho), dtype=float))
        return cls(OrthogonalMap.identity(r.shape[0]), r)

    @property
    def psi(self) -> OrthogonalMap:
        return self._psi

    @property
    def rho(self) -> np.ndarray:
        return self._rho

    @property
    def dim(self) -> int:
        return self._psi.dim

    def compose(self, other: "EuclideanIsometry") -> "EuclideanIsometry":
        """self ∘ other = (Ψa Ψb, Ψa ρb + ρa)."""
        if other.dim != self.dim:
            raise ValueError(f"Dimension mismatch: {self.dim} vs {other.dim}")
        return EuclideanIsometry(self._psi.compose(other._psi),
                                 self._psi.apply(other._rho) + self._rho)

    def inverse(self) -> "EuclideanIsometry":
        inv = self._psi.inverse()
        return EuclideanIsometry(inv, -inv.apply(self._rho))

    def apply(self, v: VectorLike) -> FiberVector:
        coords = _coords_of(v)
        if coords.shape != (self.dim,):
            raise ValueError(f"Vector of shape {coords.shape} does not fit dimension {self.dim}")
        return FiberVector(self._psi.apply(coords) + self._rho)

    def distance(self, other: "EuclideanIsometry") -> float:
        """Largest entrywise difference between the (Ψ, ρ) pairs."""
        return float(max(np.max(np.abs(self._psi.matrix - other._psi.matrix)),
                         np.max(np.abs(self._rho - other._rho))))

    def __matmul__(self, other):
        if isinstance(other, EuclideanIsometry):
            return self.compose(other)
        return self.apply(other)

    def __repr__(self) -> str:
        return f"EuclideanIsometry(dim={self.dim}, rho={np.array2string(self._rho, precision=6)})"


def compose(a: EuclideanIsometry, b: EuclideanIsometry) -> EuclideanIsometry:
    return a.compose(b)


def inverse(g: EuclideanIsometry) -> EuclideanIsometry:
    return g.inverse()


def apply(g: EuclideanIsometry, v: VectorLike) -> FiberVector:
    return g.apply(v)
