import cmath
import logging
import math

import numpy as np
import pytest

from cocycleforge.dynamics.base import GOLDEN_ALPHA, make_grid
from cocycleforge.oracles.fourier import FourierOracle, fourier_solve
from cocycleforge.solver.hyperbolized import residual, solve_u_lambda
from cocycleforge.solver.sections import Section

MULTI_HARMONIC = {-2: 0.25 + 0.0j, -1: 0.5j, 0: 1.0 + 0.0j, 1: 0.5 + 0.0j, 2: -0.25j}


class TestFourierSolve:
    def test_single_harmonic(self):
        oracle = fourier_solve(GOLDEN_ALPHA, 1.0, {1: 1.0})
        expected = 1 / (cmath.exp(2j * math.pi * GOLDEN_ALPHA) - cmath.exp(1j))
        assert oracle.solution_coefficients()[1] == pytest.approx(expected, abs=1e-15)
        assert oracle.complete
        assert oracle.analytic_residual() <= 1e-15

    def test_zero_coefficients_skipped(self):
        oracle = fourier_solve(GOLDEN_ALPHA, 1.0, {0: 0.0, 3: 1j})
        assert [k for k, _, _ in oracle.rho] == [3]
        assert len(oracle.denominators) == 1

    def test_rejects_small_denominators(self, caplog):
        with caplog.at_level(logging.WARNING):
            oracle = fourier_solve(0.0, 0.0, {0: 1.0, 1: 1.0})
        assert oracle.rejected == [0, 1]
        assert oracle.solution == []
        assert not oracle.complete
        assert oracle.min_denominator == 0.0
        assert "rejected harmonics [0, 1]" in caplog.text

    def test_threshold_is_respected(self):
        oracle = fourier_solve(GOLDEN_ALPHA, 1.0, MULTI_HARMONIC, denom_threshold=1.0)
        sizes = {int(k): d for k, d in oracle.denominators}
        assert oracle.rejected == sorted(k for k, d in sizes.items() if d < 1.0)
        assert oracle.min_denominator == min(sizes.values())

    def test_field_matches_evaluate(self, circle):
        oracle = fourier_solve(GOLDEN_ALPHA, 1.0, MULTI_HARMONIC)
        theta = np.linspace(0.0, 1.0, 11, endpoint=False)
        values = oracle.as_field().evaluate(circle, theta)
        z = oracle.evaluate(theta)
        assert np.allclose(values[:, 0], z.real, atol=1e-14)
        assert np.allclose(values[:, 1], z.imag, atol=1e-14)

    @pytest.mark.parametrize("lam", [0.0, 1.5])
    def test_rejects_lambda(self, lam):
        with pytest.raises(ValueError, match="λ"):
            fourier_solve(GOLDEN_ALPHA, 1.0, {1: 1.0}, lam=lam)

    def test_rejects_negative_threshold(self):
        with pytest.raises(ValueError, match="threshold"):
            fourier_solve(GOLDEN_ALPHA, 1.0, {1: 1.0}, denom_threshold=-1.0)

    def test_report_serializes(self):
        oracle = fourier_solve(GOLDEN_ALPHA, 1.0, MULTI_HARMONIC)
        restored = FourierOracle(**oracle.model_dump(mode="json"))
        assert restored.solution == oracle.solution


class TestAgainstSeries:
    def test_exact_solution_has_zero_residual(self, golden_vortex, small_grid):
        oracle = fourier_solve(GOLDEN_ALPHA, 1.0, MULTI_HARMONIC)
        u = Section.from_field(small_grid, oracle.as_field())
        assert residual(golden_vortex, 1.0, u) <= 1e-10

    @pytest.mark.parametrize("lam", [0.5, 0.9, 0.99])
    def test_hyperbolized_coefficients(self, golden_vortex, lam):
        grid = make_grid(golden_vortex.system, 32)
        oracle = fourier_solve(GOLDEN_ALPHA, 1.0, MULTI_HARMONIC, lam=lam)
        u = solve_u_lambda(golden_vortex, lam, grid, 1e-14)
        exact = oracle.as_field().evaluate(grid.system, grid.coords)
        assert np.max(np.linalg.norm(u.values - exact, axis=-1)) <= 1e-12 * max(1.0, u.sup_norm)
