import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cocycleforge.isometry.orthogonal import (
    OrthogonalMap,
    block_rotations,
    gram_schmidt,
    orthogonality_defect,
    planar_rotation,
)

angles = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False)


class TestGramSchmidt:
    """Re-orthonormalization of matrix stacks."""

    def test_orthonormalizes_perturbed_rotation(self):
        m = planar_rotation(0.3) + 1e-9
        q = gram_schmidt(m)
        assert orthogonality_defect(q) < 1e-14
        assert np.max(np.abs(q - m)) < 1e-8

    def test_works_on_stacks(self):
        stack = planar_rotation(np.linspace(0.0, 3.0, 5))
        q = gram_schmidt(stack)
        assert q.shape == (5, 2, 2)
        assert np.allclose(q, stack, atol=1e-15)

    def test_rejects_singular(self):
        with pytest.raises(ValueError, match="singular"):
            gram_schmidt(np.zeros((2, 2)))

    def test_rejects_non_square(self):
        with pytest.raises(ValueError, match="square"):
            gram_schmidt(np.ones((2, 3)))


class TestBlockRotations:
    def test_leftover_coordinate_fixed(self):
        m = block_rotations(np.array([math.pi / 2]), 3)
        assert np.allclose(m @ np.array([1.0, 0.0, 0.0]), [0.0, 1.0, 0.0])
        assert m[2, 2] == 1.0

    def test_too_many_blocks(self):
        with pytest.raises(ValueError):
            block_rotations(np.array([0.1, 0.2]), 3)


class TestOrthogonalMap:
    """Group operations on U(l)."""

    def test_identity_and_inverse(self):
        r = OrthogonalMap.rotation(0.7)
        assert np.allclose((r @ r.inverse()).matrix, np.eye(2), atol=1e-15)
        assert OrthogonalMap.identity(3).dim == 3

    def test_rotation_matches_complex_multiplication(self):
        r = OrthogonalMap.rotation(1.0)
        v = r.apply([1.0, 0.0])
        z = complex(v[0], v[1])
        assert abs(z - np.exp(1j)) < 1e-15

    def test_rejects_non_orthogonal(self):
        with pytest.raises(ValueError, match="not orthogonal"):
            OrthogonalMap([[2.0, 0.0], [0.0, 1.0]])

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError, match="finite"):
            OrthogonalMap([[np.nan, 0.0], [0.0, 1.0]])

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="Dimension mismatch"):
            OrthogonalMap.identity(2).compose(OrthogonalMap.identity(3))
        with pytest.raises(ValueError):
            OrthogonalMap.identity(2).apply([1.0, 2.0, 3.0])

    def test_reflection_allowed(self):
        m = OrthogonalMap([[1.0, 0.0], [0.0, -1.0]])
        assert m.determinant == pytest.approx(-1.0)

    def test_matrix_is_read_only(self):
        m = OrthogonalMap.rotation(0.2)
        with pytest.raises(ValueError):
            m.matrix[0, 0] = 5.0

    @settings(max_examples=50)
    @given(a=angles, b=angles, c=angles)
    def test_associativity(self, a, b, c):
        ra, rb, rc = (OrthogonalMap.rotation(t) for t in (a, b, c))
        left = (ra @ rb) @ rc
        right = ra @ (rb @ rc)
        assert np.max(np.abs(left.matrix - right.matrix)) < 1e-14

    @settings(max_examples=50)
    @given(a=angles, x=st.floats(-1e3, 1e3), y=st.floats(-1e3, 1e3))
    def test_preserves_length(self, a, x, y):
        v = np.array([x, y])
        w = OrthogonalMap.rotation(a).apply(v)
        assert abs(np.linalg.norm(w) - np.linalg.norm(v)) <= 1e-12 * max(1.0, np.linalg.norm(v))
