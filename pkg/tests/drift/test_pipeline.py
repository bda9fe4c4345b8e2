import numpy as np
import pytest

from cocycleforge.drift.displacement import DisplacementCurve
from cocycleforge.drift.estimate import DriftEstimate
from cocycleforge.drift.pipeline import almost_invariance_contradiction, theorem_B_pipeline
from cocycleforge.solver.sections import Section


class TestAlmostInvariance:
    def test_flags_too_invariant_section(self, small_grid):
        drift = DriftEstimate(n_schedule=[10, 100], values=[0.5, 0.5], rho_sup=0.5)
        v = Section(small_grid, np.zeros((len(small_grid), 2)), name="flat")
        messages = almost_invariance_contradiction(drift, [v], displacements=[0.0])
        assert len(messages) == 1
        assert messages[0].startswith("flat")

    def test_large_sections_are_not_flagged(self, small_grid):
        drift = DriftEstimate(n_schedule=[10], values=[0.5], rho_sup=0.5)
        v = Section(small_grid, np.full((len(small_grid), 2), 100.0))
        assert almost_invariance_contradiction(drift, [v], displacements=[0.0]) == []

    def test_needs_spec_or_displacements(self, small_grid):
        drift = DriftEstimate(n_schedule=[10], values=[0.5])
        with pytest.raises(ValueError, match="displacements or spec"):
            almost_invariance_contradiction(drift, [])


class TestTheoremBPipeline:
    @pytest.mark.slow
    def test_coboundary_vortex(self, constant_vortex, small_grid):
        report = theorem_B_pipeline(constant_vortex, small_grid, [0.9, 0.99], [100, 1000, 10000])
        assert report.hypothesis_holds
        assert report.displacement.decreasing
        assert report.anomalies == []
        assert report.frobenius is not None

    def test_translation_fails_hypothesis_quietly(self, translation, small_grid):
        report = theorem_B_pipeline(translation, small_grid, [0.5, 0.9], [10, 100, 1000],
                                    frobenius_schedule=None)
        assert not report.hypothesis_holds
        assert report.anomalies == []
        assert report.frobenius is None

    def test_inconsistency_is_reported(self, mocker, translation, small_grid):
        zero = DriftEstimate(n_schedule=[10], values=[0.0], zero_drift=True)
        rising = DisplacementCurve(lambdas=[0.5, 0.9], values=[0.1, 0.2], decreasing=False)
        mocker.patch("cocycleforge.drift.pipeline.drift_estimate", return_value=zero)
        mocker.patch("cocycleforge.drift.pipeline.displacement_curve", return_value=rising)
        report = theorem_B_pipeline(translation, small_grid, [0.5, 0.9], [10], frobenius_schedule=None)
        assert len(report.anomalies) == 1
        assert "not strictly decreasing" in report.anomalies[0]
