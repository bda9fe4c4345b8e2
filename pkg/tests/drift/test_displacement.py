import numpy as np
import pytest

from cocycleforge.dynamics.base import make_grid
from cocycleforge.drift.displacement import displacement, displacement_curve, displacement_sweep
from cocycleforge.oracles.fourier import fourier_solve
from cocycleforge.solver.hyperbolized import solve_u_lambda
from cocycleforge.solver.sections import Section

EPS = 1e-10
LAMBDAS = [0.9, 0.99, 0.999]


class TestDisplacement:
    def test_invariant_section(self, single_vortex, small_grid):
        oracle = fourier_solve(single_vortex.system.alpha, 1.0, {1: 1.0}).as_field()
        v = Section.from_field(small_grid, oracle)
        assert displacement(single_vortex, v) <= 1e-10

    def test_on_another_grid(self, single_vortex, small_grid):
        u = solve_u_lambda(single_vortex, 0.5, small_grid, 1e-13)
        finer = make_grid(single_vortex.system, 128, golden_offset=True)
        value = displacement(single_vortex, u, finer)
        assert value == pytest.approx(displacement(single_vortex, u), rel=1e-9)

    def test_grid_sampled_section_needs_its_grid(self, translation, small_grid):
        v = Section(small_grid, np.zeros((len(small_grid), 2)),
                    step_values=np.zeros((len(small_grid), 2)))
        with pytest.raises(ValueError, match="cannot be evaluated"):
            displacement(translation, v, make_grid(translation.system, 8))


class TestDisplacementCurve:
    @pytest.mark.slow
    def test_identity_and_decay(self, golden_vortex, small_grid):
        curve = displacement_sweep(golden_vortex, small_grid, LAMBDAS, EPS)
        assert max(curve.identity_errors) <= 2 * EPS
        assert curve.decreasing
        assert curve.values[0] >= 5 * curve.values[-1]
        assert curve.reduction == pytest.approx(curve.values[0] / curve.values[-1])

    def test_translation_is_flat(self, translation, small_grid):
        curve = displacement_sweep(translation, small_grid, LAMBDAS, EPS)
        for value in curve.values:
            assert value == pytest.approx(0.5, abs=1e-12)

    def test_trivial_cocycle_counts_as_converged(self, trivial, small_grid):
        curve = displacement_sweep(trivial, small_grid, [0.5, 0.9], EPS)
        assert curve.values == [0.0, 0.0]
        assert curve.decreasing
        assert curve.reduction is None

    def test_rejects_unordered_sections(self, single_vortex, small_grid):
        sections = [solve_u_lambda(single_vortex, lam, small_grid) for lam in (0.9, 0.5)]
        with pytest.raises(ValueError, match="increasing"):
            displacement_curve(single_vortex, sections)
