"""Accuracy metrics, the comparison table, and the two evaluation
protocols (leave-one-out and seeded holdout)."""

import random

import pytest

import nfa
from nfa import (
    DomainError,
    MetricsReport,
    ModelInputs,
    ProjectRecord,
    TrainingConfig,
    TrainingError,
)

from conftest import build_recovery_fixture, random_records


def mre_lists(mres):
    """Actual/estimate pairs realizing the given relative errors exactly."""
    actuals = [1.0] * len(mres)
    estimates = [1.0 + m for m in mres]
    return actuals, estimates


TABLE_BASELINE = [0.1] * 49 + [0.25] * 7 + [0.4] * 9 + [0.8] * 4
TABLE_NFA = [0.1] * 62 + [0.25] * 2 + [0.4] * 3 + [0.8] * 2


class TestMmre:
    def test_exact_estimate(self):
        assert nfa.mmre([100.0], [100.0]) == 0.0

    def test_two_projects(self):
        assert nfa.mmre([100.0, 200.0], [120.0, 150.0]) == pytest.approx(
            0.225, abs=1e-12
        )

    def test_overestimate_above_one(self):
        assert nfa.mmre([50.0], [125.0]) == pytest.approx(1.5, abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(DomainError, match="equal nonzero counts"):
            nfa.mmre([100.0], [100.0, 200.0])

    def test_empty(self):
        with pytest.raises(DomainError):
            nfa.mmre([], [])

    def test_non_positive_actual(self):
        with pytest.raises(DomainError, match="positive"):
            nfa.mmre([0.0], [10.0])


class TestPred:
    def test_table_baseline_counts(self):
        actuals, estimates = mre_lists(TABLE_BASELINE)
        assert nfa.pred(actuals, estimates, 20)[0] == 49
        assert nfa.pred(actuals, estimates, 30)[0] == 56
        assert nfa.pred(actuals, estimates, 50)[0] == 65
        assert nfa.pred(actuals, estimates, 100)[0] == 69

    def test_fraction(self):
        actuals, estimates = mre_lists(TABLE_BASELINE)
        count, fraction = nfa.pred(actuals, estimates, 20)
        assert fraction == count / 69

    def test_boundary_counts_as_within(self):
        actuals, estimates = mre_lists([0.25])
        assert nfa.pred(actuals, estimates, 25)[0] == 1

    def test_monotone_in_threshold(self):
        rng = random.Random(59)
        mres = [rng.uniform(0.0, 2.0) for _ in range(40)]
        actuals, estimates = mre_lists(mres)
        counts = [nfa.pred(actuals, estimates, t)[0] for t in (5, 10, 25, 50, 200)]
        assert counts == sorted(counts)

    def test_scale_invariant(self):
        # Power-of-two scaling is exact in floating point, so the counts and
        # the MMRE must not move at all.
        rng = random.Random(61)
        actuals = [rng.uniform(10.0, 500.0) for _ in range(30)]
        estimates = [a * rng.uniform(0.5, 1.9) for a in actuals]
        for c in (0.5, 2.0, 1024.0):
            scaled_a = [a * c for a in actuals]
            scaled_e = [e * c for e in estimates]
            assert nfa.mmre(scaled_a, scaled_e) == nfa.mmre(actuals, estimates)
            for t in (10, 25, 50):
                assert nfa.pred(scaled_a, scaled_e, t) == nfa.pred(
                    actuals, estimates, t
                )


class TestFormatPredPercent:
    def test_rounds_down(self):
        assert nfa.format_pred_percent(64, 69) == 92

    def test_exact_hundred(self):
        assert nfa.format_pred_percent(69, 69) == 100

    def test_table_values(self):
        assert nfa.format_pred_percent(33, 63) == 52
        assert nfa.format_pred_percent(49, 69) == 71
        assert nfa.format_pred_percent(62, 69) == 89

    def test_count_exceeding_n(self):
        with pytest.raises(DomainError):
            nfa.format_pred_percent(70, 69)

    def test_non_positive_n(self):
        with pytest.raises(DomainError):
            nfa.format_pred_percent(0, 0)


class TestMetricsReport:
    def test_rows_follow_thresholds(self):
        actuals, estimates = mre_lists(TABLE_BASELINE)
        report = nfa.metrics_report(actuals, estimates, thresholds=(20, 30, 50, 100))
        assert [r[0] for r in report.pred_rows] == [20, 30, 50, 100]
        assert [r[1] for r in report.pred_rows] == [49, 56, 65, 69]
        assert [r[2] for r in report.pred_rows] == [71, 81, 94, 100]
        assert report.n == 69

    def test_default_thresholds(self):
        actuals, estimates = mre_lists([0.1, 0.3])
        report = nfa.metrics_report(actuals, estimates)
        assert [r[0] for r in report.pred_rows] == list(nfa.DEFAULT_THRESHOLDS)

    def test_per_project_mre_kept(self):
        actuals, estimates = mre_lists([0.1, 0.3])
        report = nfa.metrics_report(actuals, estimates)
        assert report.per_project_mre == pytest.approx((0.1, 0.3), abs=1e-12)

    def test_zero_mmre_means_full_pred(self):
        report = nfa.metrics_report([10.0, 20.0], [10.0, 20.0])
        assert report.mmre == 0.0
        assert all(count == 2 and pct == 100 for _, count, pct in report.pred_rows)


class TestCompareReport:
    def build(self, baseline_mres, nfa_mres, thresholds=(20, 30, 50, 100)):
        base = nfa.metrics_report(*mre_lists(baseline_mres), thresholds=thresholds)
        ours = nfa.metrics_report(*mre_lists(nfa_mres), thresholds=thresholds)
        return nfa.compare_report(ours, base)

    def test_table_improvements(self):
        report = self.build(TABLE_BASELINE, TABLE_NFA)
        assert [r.baseline_pct for r in report.rows] == [71, 81, 94, 100]
        assert [r.nfa_pct for r in report.rows] == [89, 92, 97, 100]
        assert [r.improvement for r in report.rows] == [18, 11, 3, 0]

    def test_mmre_improvement_floored(self):
        report = self.build([1.38], [1.10])
        assert report.baseline_mmre == pytest.approx(1.38)
        assert report.nfa_mmre == pytest.approx(1.10)
        assert report.mmre_improvement_pct == 20

    def test_identical_reports_no_improvement(self):
        report = self.build([0.1, 0.4], [0.1, 0.4])
        assert all(r.improvement == 0 for r in report.rows)
        assert report.mmre_improvement_pct == 0

    def test_regression_is_negative(self):
        report = self.build([0.1, 0.1], [0.6, 0.6])
        assert all(r.improvement <= 0 for r in report.rows)
        assert report.mmre_improvement_pct < 0

    def test_zero_baseline_mmre_guard(self):
        report = self.build([0.0], [0.0])
        assert report.mmre_improvement_pct == 0

    def test_count_mismatch_rejected(self):
        base = nfa.metrics_report(*mre_lists([0.1, 0.2]))
        ours = nfa.metrics_report(*mre_lists([0.1]))
        with pytest.raises(DomainError, match="different project counts"):
            nfa.compare_report(ours, base)

    def test_threshold_mismatch_rejected(self):
        base = nfa.metrics_report(*mre_lists([0.1]), thresholds=(20, 30))
        ours = nfa.metrics_report(*mre_lists([0.1]), thresholds=(25, 30))
        with pytest.raises(DomainError, match="different thresholds"):
            nfa.compare_report(ours, base)

    def test_to_text_table(self):
        text = self.build(TABLE_BASELINE, TABLE_NFA).to_text()
        assert text.startswith("projects: 69\n")
        assert "49/69 71%" in text
        assert "62/69 89%" in text
        assert "18%" in text
        assert "mmre" in text

    def test_to_csv_shape(self):
        lines = self.build([0.1, 0.4], [0.1, 0.1]).to_csv().splitlines()
        assert lines[0] == "threshold,baseline_count,baseline_pct,nfa_count,nfa_pct,improvement"
        assert lines[1] == "20,1,50,2,100,50"
        assert lines[-1].startswith("mmre,0.25,,0.1")


class TestLoocv:
    def config(self, epochs=3):
        return TrainingConfig(learning_rate=0.05, epochs=epochs)

    def test_requires_three_records(self, default_doc):
        records = random_records(
            default_doc.schema, default_doc.rules, default_doc.params, random.Random(3), 2
        )
        with pytest.raises(DomainError, match="at least 3"):
            nfa.loocv_evaluate(
                records, default_doc.schema, default_doc.rules, default_doc.params,
                self.config(),
            )

    def test_one_fold_per_record(self, default_doc, monkeypatch):
        import nfa.evaluation as evaluation

        folds = []
        real_train = evaluation.train

        def spy(records, *args, **kwargs):
            folds.append([r.id for r in records])
            return real_train(records, *args, **kwargs)

        monkeypatch.setattr(evaluation, "train", spy)
        records = random_records(
            default_doc.schema, default_doc.rules, default_doc.params, random.Random(5), 3
        )
        nfa.loocv_evaluate(
            records, default_doc.schema, default_doc.rules, default_doc.params,
            self.config(),
        )
        assert len(folds) == 3
        all_ids = {r.id for r in records}
        for held_out, fold in zip(records, folds):
            assert set(fold) == all_ids - {held_out.id}

    def test_perfect_data_scores_zero(self, default_doc):
        records = random_records(
            default_doc.schema, default_doc.rules, default_doc.params,
            random.Random(7), 5, noise=(1.0, 1.0),
        )
        ours, baseline = nfa.loocv_evaluate(
            records, default_doc.schema, default_doc.rules, default_doc.params,
            self.config(),
        )
        assert ours.mmre == pytest.approx(0.0, abs=1e-9)
        assert baseline.mmre == pytest.approx(0.0, abs=1e-12)
        assert ours.n == baseline.n == 5

    def test_calibration_beats_baseline_on_perturbed_truth(self):
        schema, bank, _, rules, records = build_recovery_fixture(n=12)
        ours, baseline = nfa.loocv_evaluate(
            records, schema, rules, bank, self.config(epochs=60)
        )
        assert ours.mmre < baseline.mmre

    def test_fold_failure_names_the_fold(self, default_doc):
        import dataclasses

        records = random_records(
            default_doc.schema, default_doc.rules, default_doc.params, random.Random(11), 3
        )
        # Every training fold for record 0 consists of two zero-weight rows.
        records = [records[0]] + [
            dataclasses.replace(r, weight=0.0) for r in records[1:]
        ]
        with pytest.raises(TrainingError, match="fold 0 \\(held out 'r000'\\)"):
            nfa.loocv_evaluate(
                records, default_doc.schema, default_doc.rules, default_doc.params,
                self.config(),
            )


class TestHoldout:
    def test_seeded_split_is_deterministic(self):
        schema, bank, _, rules, records = build_recovery_fixture(n=20)
        config = TrainingConfig(learning_rate=0.05, epochs=20, seed=7)
        first = nfa.holdout_evaluate(records, schema, rules, bank, config)
        second = nfa.holdout_evaluate(records, schema, rules, bank, config)
        assert first == second

    def test_test_set_size(self):
        schema, bank, _, rules, records = build_recovery_fixture(n=20)
        config = TrainingConfig(learning_rate=0.05, epochs=5, seed=3)
        ours, baseline = nfa.holdout_evaluate(
            records, schema, rules, bank, config, test_fraction=0.3
        )
        assert ours.n == baseline.n == 6

    def test_small_dataset_keeps_two_training_records(self, default_doc):
        records = random_records(
            default_doc.schema, default_doc.rules, default_doc.params, random.Random(13), 3
        )
        ours, _ = nfa.holdout_evaluate(
            records, default_doc.schema, default_doc.rules, default_doc.params,
            TrainingConfig(learning_rate=0.05, epochs=3), test_fraction=0.9,
        )
        assert ours.n == 1

    def test_invalid_fraction(self, default_doc):
        records = random_records(
            default_doc.schema, default_doc.rules, default_doc.params, random.Random(17), 5
        )
        with pytest.raises(DomainError, match="fraction"):
            nfa.holdout_evaluate(
                records, default_doc.schema, default_doc.rules, default_doc.params,
                TrainingConfig(), test_fraction=1.5,
            )

    def test_calibration_beats_baseline(self, recovery_fixture):
        schema, bank, _, rules, records = recovery_fixture
        config = TrainingConfig(learning_rate=0.05, epochs=150, seed=7)
        ours, baseline = nfa.holdout_evaluate(records, schema, rules, bank, config)
        assert ours.mmre < baseline.mmre
        assert ours.n == baseline.n == 18
