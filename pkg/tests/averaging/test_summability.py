
import math

import numpy as np
import pytest

from cocycleforge.averaging.summability import frobenius_compare, scalar_sequence, tauberian_probe
from cocycleforge.averaging.twisted import TwistedSequence, iter_term_blocks
from cocycleforge.dynamics.base import FiniteCyclic
from cocycleforge.dynamics.fields import ConstantField, IdentityField

SCHEDULE = [100, 1000, 10000]


class TestScalarSequence:
    @pytest.mark.parametrize("kind", ["constant", "alternating", "cosine"])
    def test_known_kinds(self, kind):
        seq, x = scalar_sequence(kind, 2.0)
        assert seq.name == kind
        assert seq.sup_bound == pytest.approx(2.0)
        assert seq.dim == 1

    def test_cosine_terms(self):
        seq, x = scalar_sequence("cosine", 2.0)
        terms = np.concatenate([z[:, 0, 0] for _, z, _ in iter_term_blocks(seq, x.as_array(), 50)])
        assert terms == pytest.approx(2.0 * np.cos(np.arange(50)), abs=1e-12)

    def test_alternating_terms(self):
        seq, x = scalar_sequence("alternating", 1.5)
        terms = np.concatenate([z[:, 0, 0] for _, z, _ in iter_term_blocks(seq, x.as_array(), 6)])
        assert terms.tolist() == [1.5, -1.5, 1.5, -1.5, 1.5, -1.5]

    def test_unknown_kind(self):
        with pytest.raises(ValueError, match="Unknown scalar sequence"):
            scalar_sequence("sawtooth")


class TestFrobeniusCompare:
    def test_constant_sequence(self):
        seq, x = scalar_sequence("constant", 1.5)
        report = frobenius_compare(seq, x, SCHEDULE)
        assert report.discrepancy <= 1e-12
        assert [lam for lam, _ in report.abel] == [1 - 1 / n for n in SCHEDULE]

    def test_alternating_bound(self):
        seq, x = scalar_sequence("alternating")
        report = frobenius_compare(seq, x, SCHEDULE)
        for n, d in zip(SCHEDULE, report.discrepancies):
            assert d <= 3 / n

    def test_cosine_matches_closed_forms(self):
        seq, x = scalar_sequence("cosine")
        report = frobenius_compare(seq, x, SCHEDULE)
        for (n, cesaro), (lam, abel) in zip(report.cesaro, report.abel):
            expected_cesaro = math.cos((n - 1) / 2) * math.sin(n / 2) / (n * math.sin(0.5))
            expected_abel = (1 - lam) * (1 - lam * math.cos(1)) / (1 - 2 * lam * math.cos(1) + lam ** 2)
            assert cesaro == pytest.approx([expected_cesaro], abs=1e-9)
            assert abel == pytest.approx([expected_abel], abs=1e-9)

    def test_cosine_means_vanish(self):
        seq, x = scalar_sequence("cosine")
        report = frobenius_compare(seq, x, SCHEDULE)
        for n, env, d in zip(SCHEDULE, report.cesaro_envelope, report.discrepancies):
            assert env <= 1 / (n * math.sin(0.5)) + 1e-9
            assert d <= (0.6 + 1 / math.sin(0.5)) / n

    @pytest.mark.parametrize("schedule", [[], [1, 10], [100, 50]])
    def test_rejects_schedule(self, schedule):
        seq, x = scalar_sequence("constant")
        with pytest.raises(ValueError):
            frobenius_compare(seq, x, schedule)


class TestTauberianProbe:
    @pytest.mark.parametrize("kind", ["constant", "alternating", "cosine"])
    def test_bounded_sequences_track(self, kind):
        seq, x = scalar_sequence(kind)
        report = tauberian_probe(seq, x, SCHEDULE)
        assert report.bounded
        assert report.tracking is True

    def test_flags_understated_bound(self, mocker):
        system = FiniteCyclic(1)
        seq = TwistedSequence(system, IdentityField(2), ConstantField([3.0, 0.0]), name="liar")
        mocker.patch.object(TwistedSequence, "sup_bound", new_callable=mocker.PropertyMock, return_value=1.0)
        report = tauberian_probe(seq, system.point(0), [10, 20])
        assert not report.bounded
        assert report.tracking is False
