"""
Closed-form fields over a base system.

An OrthogonalField gives Ψ(x) (or a frame 𝒳(x)) as a stack of matrices, a
VectorField gives ρ(x) or an observable f(x). Both are evaluated on flat
coordinate batches: `field.evaluate(system, coords)` with coords of shape
(K,) or (K, d) returns (K, l, l) or (K, l).
"""

import math
from typing import Any, Callable, Dict, Mapping, Optional, Sequence

import numpy as np

from ..isometry.orthogonal import block_rotations, gram_schmidt
from .base import BaseSystem


class OrthogonalField:
    """x -> element of U(l)."""

    dim = 1

    def evaluate(self, system: BaseSystem, coords: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def constant_matrix(self) -> Optional[np.ndarray]:
        """The matrix when the field does not depend on x, else None."""
        return None

    def inverse(self) -> "OrthogonalField":
        return InverseField(self)

    def describe(self) -> Dict[str, Any]:
        raise NotImplementedError


class ConstantOrthogonalField(OrthogonalField):
    def __init__(self, matrix, name: str = "constant"):
        m = gram_schmidt(np.asarray(matrix, dtype=float))
        if m.ndim != 2:
            raise ValueError("Constant field needs a single matrix")
        self._matrix = m
        self.dim = m.shape[0]
        self.name = name

    def evaluate(self, system, coords):
        count = np.shape(coords)[0]
        return np.broadcast_to(self._matrix, (count, self.dim, self.dim)).copy()

    def constant_matrix(self):
        return self._matrix

    def describe(self):
        return {"kind": self.name, "dim": self.dim}


class IdentityField(ConstantOrthogonalField):
    def __init__(self, dim: int):
        if int(dim) < 1:
            raise ValueError(f"Fiber dimension must be positive, got {dim}")
        super().__init__(np.eye(int(dim)), name="identity")


class ConstantRotationField(ConstantOrthogonalField):
    """Every 2x2 block rotates by β; for dim 2 this is multiplication by e^{iβ}."""

    def __init__(self, beta: float, dim: int = 2):
        if dim < 2 or dim % 2:
            raise ValueError(f"Constant rotation needs an even dimension, got {dim}")
        self.beta = float(beta)
        super().__init__(block_rotations(np.full(dim // 2, self.beta), dim), name="constant_rotation")

    def describe(self):
        return {"kind": self.name, "dim": self.dim, "beta": self.beta}


class AngleFunction:
    """β(θ) = offset + 2π·winding·θ + amplitude·sin(2π·harmonic·θ), θ in turns."""

    def __init__(self, offset: float = 0.0, winding: int = 0,
                 amplitude: float = 0.0, harmonic: int = 1):
        if int(winding) != winding:
            raise ValueError("Winding must be an integer for the angle to be continuous")
        self.offset = float(offset)
        self.winding = int(winding)
        self.amplitude = float(amplitude)
        self.harmonic = int(harmonic)

    def __call__(self, theta: np.ndarray) -> np.ndarray:
        return (self.offset + 2.0 * math.pi * self.winding * theta
                + self.amplitude * np.sin(2.0 * math.pi * self.harmonic * theta))

    @property
    def is_constant(self) -> bool:
        return self.winding == 0 and self.amplitude == 0.0

    def describe(self) -> Dict[str, Any]:
        return {"offset": self.offset, "winding": self.winding,
                "amplitude": self.amplitude, "harmonic": self.harmonic}


class DiagonalRotationField(OrthogonalField):
    """Block-diagonal rotations with angles depending on the base point."""

    def __init__(self, angles: Sequence[AngleFunction], dim: Optional[int] = None):
        self.angles = list(angles)
        if not self.angles:
            raise ValueError("At least one rotation angle is required")
        self.dim = int(dim) if dim is not None else 2 * len(self.angles)
        if 2 * len(self.angles) > self.dim:
            raise ValueError(f"{len(self.angles)} rotation blocks do not fit in dimension {self.dim}")

    def evaluate(self, system, coords):
        theta = system.angle(coords)
        stacked = np.stack([a(theta) for a in self.angles], axis=-1)
        return block_rotations(stacked, self.dim)

    def constant_matrix(self):
        if all(a.is_constant for a in self.angles):
            return block_rotations(np.array([a.offset for a in self.angles]), self.dim)
        return None

    def describe(self):
        return {"kind": "diagonal_rotations", "dim": self.dim,
                "angles": [a.describe() for a in self.angles]}


class TableOrthogonalField(OrthogonalField):
    """One matrix per state of a cyclic base."""

    def __init__(self, matrices, name: str = "table"):
        m = gram_schmidt(np.asarray(matrices, dtype=float))
        if m.ndim != 3:
            raise ValueError("Table field needs a stack of matrices")
        self._matrices = m
        self.dim = m.shape[-1]
        self.name = name

    @property
    def matrices(self) -> np.ndarray:
        return self._matrices

    def evaluate(self, system, coords):
        idx = np.asarray(coords, dtype=np.int64)
        if np.any(idx < 0) or np.any(idx >= len(self._matrices)):
            raise ValueError("Cyclic state out of range for table field")
        return self._matrices[idx]

    def describe(self):
        return {"kind": self.name, "dim": self.dim, "period": len(self._matrices)}


class InverseField(OrthogonalField):
    """x -> field(x)^{-1} = field(x)ᵀ."""

    def __init__(self, field: OrthogonalField):
        self.field = field
        self.dim = field.dim

    def evaluate(self, system, coords):
        return np.swapaxes(self.field.evaluate(system, coords), -1, -2)

    def constant_matrix(self):
        m = self.field.constant_matrix()
        return None if m is None else m.T

    def inverse(self):
        return self.field

    def describe(self):
        return {"kind": "inverse", "of": self.field.describe()}


class VectorField:
    """x -> vector in R^l, with a guaranteed bound on its sup-norm."""

    dim = 1

    def evaluate(self, system: BaseSystem, coords: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def bound(self) -> float:
        raise NotImplementedError

    def describe(self) -> Dict[str, Any]:
        raise NotImplementedError


class ZeroField(VectorField):
    def __init__(self, dim: int):
        self.dim = int(dim)

    def evaluate(self, system, coords):
        return np.zeros((np.shape(coords)[0], self.dim))

    def bound(self):
        return 0.0

    def describe(self):
        return {"kind": "zero", "dim": self.dim}


class ConstantField(VectorField):
    def __init__(self, value):
        self.value = np.atleast_1d(np.asarray(value, dtype=float))
        self.dim = self.value.shape[0]

    def evaluate(self, system, coords):
        return np.broadcast_to(self.value, (np.shape(coords)[0], self.dim)).copy()

    def bound(self):
        return float(np.linalg.norm(self.value))

    def describe(self):
        return {"kind": "constant", "value": self.value.tolist()}


class FourierField(VectorField):
    """Σ_k c_k e^{2πikθ} read in R^2 = C."""

    dim = 2

    def __init__(self, coefficients: Mapping[int, complex], name: str = "fourier"):
        self.coefficients = {int(k): complex(c) for k, c in coefficients.items() if c != 0}
        self.name = name
        self._modes = np.array(sorted(self.coefficients), dtype=float)
        self._values = np.array([self.coefficients[int(k)] for k in self._modes], dtype=complex)

    def complex_values(self, system: BaseSystem, coords: np.ndarray) -> np.ndarray:
        theta = system.angle(coords)
        if not len(self._modes):
            return np.zeros(np.shape(theta), dtype=complex)
        phase = 2.0 * math.pi * np.mod(np.multiply.outer(theta, self._modes), 1.0)
        return np.exp(1j * phase) @ self._values

    def evaluate(self, system, coords):
        z = self.complex_values(system, coords)
        return np.stack([z.real, z.imag], axis=-1)

    def bound(self):
        return float(np.sum(np.abs(self._values)))

    def describe(self):
        return {"kind": self.name,
                "coefficients": [[k, c.real, c.imag] for k, c in sorted(self.coefficients.items())]}


class TableVectorField(VectorField):
    """One vector per state of a cyclic base."""

    def __init__(self, values, name: str = "table"):
        self.values = np.asarray(values, dtype=float)
        if self.values.ndim != 2:
            raise ValueError("Table vector field needs shape (p, l)")
        self.dim = self.values.shape[1]
        self.name = name

    def evaluate(self, system, coords):
        idx = np.asarray(coords, dtype=np.int64)
        if np.any(idx < 0) or np.any(idx >= len(self.values)):
            raise ValueError("Cyclic state out of range for table field")
        return self.values[idx]

    def bound(self):
        return float(np.max(np.linalg.norm(self.values, axis=-1)))

    def describe(self):
        return {"kind": self.name, "dim": self.dim, "period": len(self.values)}


class PulledBackField(VectorField):
    """y -> matrix(y)^{-1} f(y)."""

    def __init__(self, matrix_field: OrthogonalField, field: VectorField):
        if matrix_field.dim != field.dim:
            raise ValueError(f"Dimension mismatch: {matrix_field.dim} vs {field.dim}")
        self.matrix_field = matrix_field
        self.field = field
        self.dim = field.dim

    def evaluate(self, system, coords):
        m = self.matrix_field.evaluate(system, coords)
        return np.einsum("kji,kj->ki", m, self.field.evaluate(system, coords))

    def bound(self):
        return self.field.bound()

    def describe(self):
        return {"kind": "pulled_back", "matrix": self.matrix_field.describe(),
                "field": self.field.describe()}


class ShiftedField(VectorField):
    """y -> f(Ty)."""

    def __init__(self, field: VectorField):
        self.field = field
        self.dim = field.dim

    def evaluate(self, system, coords):
        return self.field.evaluate(system, system.advance(coords))

    def bound(self):
        return self.field.bound()

    def describe(self):
        return {"kind": "shifted", "field": self.field.describe()}


class CallableField(VectorField):
    """Wrap an evaluator coords -> (K, l) with a known sup bound."""

    def __init__(self, func: Callable[[np.ndarray], np.ndarray], dim: int, sup_bound: float,
                 name: str = "callable"):
        self.func = func
        self.dim = int(dim)
        self.sup_bound = float(sup_bound)
        self.name = name

    def evaluate(self, system, coords):
        return np.asarray(self.func(coords), dtype=float).reshape(np.shape(coords)[0], self.dim)

    def bound(self):
        return self.sup_bound

    def describe(self):
        return {"kind": self.name, "dim": self.dim}


def coboundary_fourier(alpha: float, solution: Mapping[int, complex]) -> FourierField:
    """Fourier coefficients of u∘T - u for u = Σ û_k e^{2πikθ}."""
    coeffs = {k: c * (np.exp(2j * math.pi * k * alpha) - 1.0) for k, c in solution.items()}
    return FourierField(coeffs, name="coboundary")


def fourier_from_rows(rows: Sequence[Sequence[float]]) -> Dict[int, complex]:
    """[[k, re, im], ...] -> {k: re + i im}; repeated modes are added."""
    coeffs: Dict[int, complex] = {}
    for row in rows:
        if len(row) != 3:
            raise ValueError(f"Fourier rows are [k, re, im], got {list(row)}")
        k = int(row[0])
        if k != row[0]:
            raise ValueError(f"Fourier mode must be an integer, got {row[0]}")
        coeffs[k] = coeffs.get(k, 0j) + complex(float(row[1]), float(row[2]))
    return coeffs


def unit_rotation_field(winding: int) -> DiagonalRotationField:
    """θ -> e^{2πi·winding·θ} as a 2x2 rotation field."""
    return DiagonalRotationField([AngleFunction(winding=winding)], dim=2)


def matrices_to_complex(matrices: np.ndarray) -> np.ndarray:
    """Read 2x2 rotation matrices as unit complex numbers."""
    return matrices[..., 0, 0] + 1j * matrices[..., 1, 0]
