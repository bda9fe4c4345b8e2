"""
Orthogonal maps of R^l.

Everything here works on stacks of matrices with shape (..., l, l) so that the
kernels can carry one product per grid point without a Python loop.
"""

import numpy as np

# Inputs further than this from orthogonal are rejected rather than repaired.
NEAR_ORTHOGONAL_TOL = 1e-6
DETERMINANT_TOL = 1e-10
# Long products are re-orthonormalized after this many factors.
REORTHONORMALIZE_EVERY = 1024


def gram_schmidt(matrices: np.ndarray) -> np.ndarray:
    """
    Re-orthonormalize the columns of a stack of square matrices.

    Modified Gram-Schmidt applied column by column; for an input within
    rounding of U(l) the output differs from it by the same order.

    Args:
        matrices: Array of shape (..., l, l)

    Returns:
        np.ndarray: Array of the same shape with orthonormal columns

    Raises:
        ValueError: If a column collapses to zero
    """
    q = np.array(matrices, dtype=float, copy=True)
    if q.ndim < 2 or q.shape[-1] != q.shape[-2]:
        raise ValueError(f"Expected square matrices, got shape {q.shape}")

    dim = q.shape[-1]
    for k in range(dim):
        for i in range(k):
            proj = np.sum(q[..., :, i] * q[..., :, k], axis=-1, keepdims=True)
            q[..., :, k] -= proj * q[..., :, i]
        norm = np.linalg.norm(q[..., :, k], axis=-1, keepdims=True)
        if np.any(norm == 0.0):
            raise ValueError("Matrix is singular and cannot be re-orthonormalized")
        q[..., :, k] /= norm
    return q


def orthogonality_defect(matrices: np.ndarray) -> float:
    """Largest entry of |QᵀQ - I| over a stack."""
    m = np.asarray(matrices, dtype=float)
    gram = np.einsum("...ki,...kj->...ij", m, m)
    return float(np.max(np.abs(gram - np.eye(m.shape[-1]))))


def planar_rotation(angle) -> np.ndarray:
    """Rotation matrices [[cos, -sin], [sin, cos]] for scalar or array angles (radians)."""
    a = np.asarray(angle, dtype=float)
    c, s = np.cos(a), np.sin(a)
    out = np.empty(a.shape + (2, 2))
    out[..., 0, 0] = c
    out[..., 0, 1] = -s
    out[..., 1, 0] = s
    out[..., 1, 1] = c
    return out


def block_rotations(angles: np.ndarray, dim: int) -> np.ndarray:
    """
    Block-diagonal rotations of R^dim.

    Args:
        angles: Array of shape (..., m) with one angle per 2x2 block
        dim: Ambient dimension, at least 2m; leftover coordinates are fixed

    Returns:
        np.ndarray: Array of shape (..., dim, dim)
    """
    a = np.asarray(angles, dtype=float)
    blocks = a.shape[-1]
    if 2 * blocks > dim:
        raise ValueError(f"{blocks} rotation blocks do not fit in dimension {dim}")

    out = np.zeros(a.shape[:-1] + (dim, dim))
    idx = np.arange(dim)
    out[..., idx, idx] = 1.0
    rot = planar_rotation(a)
    for b in range(blocks):
        out[..., 2 * b:2 * b + 2, 2 * b:2 * b + 2] = rot[..., b, :, :]
    return out


class OrthogonalMap:
    """An element of U(l), stored re-orthonormalized and read-only."""

    __slots__ = ("_matrix",)

    def __init__(self, matrix):
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
            raise ValueError(f"OrthogonalMap needs a square matrix, got shape {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("OrthogonalMap entries must be finite")
        if orthogonality_defect(m) > NEAR_ORTHOGONAL_TOL:
            raise ValueError("Matrix is not orthogonal")

        q = gram_schmidt(m)
        if abs(abs(np.linalg.det(q)) - 1.0) > DETERMINANT_TOL:
            raise ValueError("Determinant is not +-1 after re-orthonormalization")
        q.setflags(write=False)
        self._matrix = q

    @classmethod
    def identity(cls, dim: int) -> "OrthogonalMap":
        return cls(np.eye(dim))

    @classmethod
    def rotation(cls, angle: float) -> "OrthogonalMap":
        """Planar rotation by `angle` radians, the matrix form of e^{i angle}."""
        return cls(planar_rotation(angle))

    @property
    def matrix(self) -> np.ndarray:
        return self._matrix

    @property
    def dim(self) -> int:
        return self._matrix.shape[0]

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self._matrix))

    def inverse(self) -> "OrthogonalMap":
        return OrthogonalMap(self._matrix.T)

    def compose(self, other: "OrthogonalMap") -> "OrthogonalMap":
        if other.dim != self.dim:
            raise ValueError(f"Dimension mismatch: {self.dim} vs {other.dim}")
        return OrthogonalMap(self._matrix @ other._matrix)

    def apply(self, vector) -> np.ndarray:
        v = np.asarray(vector, dtype=float)
        if v.shape[-1] != self.dim:
            raise ValueError(f"Vector of length {v.shape[-1]} does not fit dimension {self.dim}")
        return v @ self._matrix.T

    def __matmul__(self, other):
        if isinstance(other, OrthogonalMap):
            return self.compose(other)
        return self.apply(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, OrthogonalMap):
            return NotImplemented
        return self.dim == other.dim and np.array_equal(self._matrix, other._matrix)

    def __hash__(self) -> int:
        return hash(self._matrix.tobytes())

    def __repr__(self) -> str:
        return f"OrthogonalMap(dim={self.dim}, det={self.determinant:+.0f})"
