import math

import numpy as np
import pytest

from cocycleforge.dynamics.base import (
    DIRECT_STEP_THRESHOLD,
    GOLDEN_ALPHA,
    CircleRotation,
    FiniteCyclic,
    TorusRotation,
    make_grid,
    point_grid,
)


class TestCircleRotation:
    """θ -> θ + α mod 1."""

    def test_step_and_wrap(self, circle):
        x = circle.point(0.9)
        y = circle.step(x, 1)
        assert float(y.coords) == pytest.approx((0.9 + GOLDEN_ALPHA) % 1.0)
        assert 0.0 <= float(y.coords) < 1.0

    def test_retreat_inverts_advance(self, circle):
        coords = np.linspace(0.0, 1.0, 17, endpoint=False)
        back = circle.retreat(circle.advance(coords))
        wrapped = np.minimum(np.abs(back - coords), 1.0 - np.abs(back - coords))
        assert np.max(wrapped) < 1e-15

    def test_direct_step_for_long_jumps(self, circle):
        n = DIRECT_STEP_THRESHOLD + 10
        x = circle.point(0.25)
        y = circle.step(x, n)
        expected = (0.25 + n * GOLDEN_ALPHA) % 1.0
        assert abs(float(y.coords) - expected) < 1e-9

    def test_wrong_point_kind(self, circle):
        with pytest.raises(ValueError, match="does not belong"):
            circle.step(FiniteCyclic(3).point(1), 1)

    def test_rejects_non_finite_alpha(self):
        with pytest.raises(ValueError):
            CircleRotation(math.inf)


class TestTorusRotation:
    def test_step_componentwise(self):
        torus = TorusRotation([0.5, 0.25])
        y = torus.step(torus.point([0.75, 0.5]), 1)
        assert np.allclose(y.coords, [0.25, 0.75])

    def test_grid_shape(self):
        torus = TorusRotation([GOLDEN_ALPHA, math.sqrt(2) - 1])
        grid = make_grid(torus, 100)
        assert grid.coords.shape == (100, 2)
        assert np.all((grid.coords >= 0.0) & (grid.coords < 1.0))

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            TorusRotation([])


class TestFiniteCyclic:
    def test_period_wraps(self, cyclic8):
        assert int(cyclic8.step(cyclic8.point(7), 1).coords) == 0
        assert int(cyclic8.step(cyclic8.point(0), -1).coords) == 7

    def test_grid_is_every_state(self, cyclic8):
        grid = make_grid(cyclic8, 1024)
        assert grid.coords.tolist() == list(range(8))

    def test_rejects_bad_period(self):
        with pytest.raises(ValueError, match="at least 1"):
            FiniteCyclic(0)


class TestSampleGrid:
    """Grids, chunks and quadrature."""

    def test_uniform_grid(self, circle):
        grid = make_grid(circle, 8)
        assert np.allclose(grid.coords, np.arange(8) / 8)
        assert grid.descriptor["size"] == 8

    def test_descriptor_records_ergodicity_assumption(self):
        grid = make_grid(CircleRotation(0.25, uniquely_ergodic_extension=True), 4)
        assert grid.descriptor["system"] == {"kind": "circle", "alpha": 0.25, "uniquely_ergodic_extension": True}

    def test_golden_offset(self, circle):
        grid = make_grid(circle, 8, golden_offset=True)
        assert grid.coords[0] == pytest.approx(GOLDEN_ALPHA / 8)

    def test_chunks_cover_grid_in_order(self, small_grid):
        chunks = small_grid.chunks(5)
        assert len(chunks) == 5
        assert np.array_equal(np.concatenate(chunks), small_grid.coords)

    def test_more_chunks_than_points(self, cyclic8):
        assert len(make_grid(cyclic8).chunks(100)) == 8

    def test_with_image(self, small_grid):
        extended = small_grid.with_image(1)
        assert len(extended) == 2 * len(small_grid)
        assert np.array_equal(extended.coords[:len(small_grid)], small_grid.coords)
        assert np.array_equal(extended.coords[len(small_grid):], small_grid.stepped(1))
        assert extended.descriptor["image_step"] == 1

    def test_quadrature_exact_for_trig_polynomial(self, small_grid):
        values = np.cos(2 * math.pi * 3 * small_grid.coords)[:, None]
        assert abs(small_grid.mean(values)[0]) < 1e-15

    def test_coords_read_only(self, small_grid):
        with pytest.raises(ValueError):
            small_grid.coords[0] = 0.5

    def test_rejects_empty_grid(self, circle):
        with pytest.raises(ValueError, match="positive"):
            make_grid(circle, 0)

    def test_point_grid(self, circle):
        grid = point_grid(circle, circle.point(0.3))
        assert len(grid) == 1
