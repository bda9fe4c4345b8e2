import numpy as np
import pytest

from cocycleforge.dynamics.base import make_grid
from cocycleforge.dynamics.fields import FourierField
from cocycleforge.solver.sections import LambdaSweep, Section, SweepEntry, grid_distances


class TestSection:
    def test_shape_check(self, small_grid):
        with pytest.raises(ValueError, match="shape"):
            Section(small_grid, np.zeros((3, 2)))

    def test_rejects_non_finite(self, small_grid):
        values = np.zeros((len(small_grid), 2))
        values[5, 1] = np.inf
        with pytest.raises(ValueError, match="non-finite"):
            Section(small_grid, values)

    def test_values_read_only(self, small_grid):
        section = Section(small_grid, np.ones((len(small_grid), 2)))
        with pytest.raises(ValueError):
            section.values[0, 0] = 2.0

    def test_closed_form_section(self, small_grid):
        field = FourierField({1: 2.0})
        section = Section.from_field(small_grid, field)
        assert section.representation == "closed_form"
        assert section.sup_norm == pytest.approx(2.0)
        assert section.bound() == pytest.approx(2.0)
        assert np.allclose(section.at_step(), field.evaluate(small_grid.system, small_grid.stepped(1)))

    def test_grid_sampled_section_stays_on_grid(self, small_grid):
        values = np.ones((len(small_grid), 2))
        section = Section(small_grid, values, name="sampled")
        assert section.evaluate(small_grid.coords) is section.values
        with pytest.raises(ValueError, match="not evaluable one step ahead"):
            section.at_step()
        with pytest.raises(ValueError, match="cannot be evaluated off its grid"):
            section.evaluate(np.array([0.123]))

    def test_step_values_shape(self, small_grid):
        values = np.ones((len(small_grid), 2))
        with pytest.raises(ValueError, match="Stepped values"):
            Section(small_grid, values, step_values=np.ones((2, 2)))

    def test_cyclic_section_is_evaluable(self, cyclic8):
        grid = make_grid(cyclic8)
        values = np.arange(16, dtype=float).reshape(8, 2)
        section = Section(grid, values)
        assert np.array_equal(section.at_step(), np.roll(values, -1, axis=0))
        assert np.array_equal(section.evaluate(np.array([7, 0])), values[[7, 0]])

    def test_bound_without_hint(self, cyclic8):
        grid = make_grid(cyclic8)
        values = np.zeros((8, 1))
        values[3] = 4.0
        assert Section(grid, values).bound() == 4.0

    def test_as_field_round_trip(self, small_grid):
        section = Section.from_field(small_grid, FourierField({-1: 1j}))
        field = section.as_field()
        assert np.allclose(field.evaluate(small_grid.system, small_grid.coords), section.values)

    def test_metadata(self, small_grid):
        section = Section(small_grid, np.zeros((len(small_grid), 2)), lam=0.9, tolerance=1e-10)
        meta = section.metadata()
        assert meta["lam"] == 0.9
        assert meta["grid"]["size"] == len(small_grid)


class TestGridDistances:
    def test_distances(self):
        a = np.array([[0.0, 0.0], [3.0, 4.0]])
        b = np.zeros((2, 2))
        sup, l1, l2 = grid_distances(a, b)
        assert sup == 5.0
        assert l1 == 2.5
        assert l2 == pytest.approx(np.sqrt(12.5))


class TestSweepModels:
    def test_sections_not_serialized(self):
        sweep = LambdaSweep(schedule=[0.5], eps=1e-10, sections=[object()],
                            entries=[SweepEntry(lam=0.5, n_terms=10, sup_u=1.0,
                                                residual_lambda=0.0, residual_one=0.5)])
        dumped = sweep.model_dump()
        assert "sections" not in dumped
        assert dumped["entries"][0]["sup_dist"] is None
