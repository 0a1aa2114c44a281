"""Accuracy metrics and estimator comparisons.

MMRE and PRED-within-x% are the two headline numbers, reported for the
calibrated pipeline against its uncalibrated baseline under either
leave-one-out cross-validation (the deterministic default) or a seeded
holdout split.  Displayed percentages truncate (floor) rather than round,
and PRED improvements are percentage-point differences on the truncated
values; MMRE improvement is the relative reduction, also floored.
"""

from __future__ import annotations

import io
import math
import random
from dataclasses import dataclass
from typing import Sequence

from .bank import MultiplierBank
from .errors import DomainError, NfaError, TrainingDivergedError, TrainingError
from .models import full_pipeline_estimate
from .rules import DependencySet
from .schema import FactorSchema
from .training import ProjectRecord, TrainingConfig, train

DEFAULT_THRESHOLDS = (20, 25, 30, 50, 100)


@dataclass(frozen=True)
class MetricsReport:
    """Accuracy summary of one estimator over one set of projects.

    ``pred_rows`` holds ``(threshold_percent, count_within, displayed_percent)``
    triples in increasing threshold order.
    """

    n: int
    mmre: float
    pred_rows: tuple[tuple[int, int, int], ...]
    per_project_mre: tuple[float, ...]


def _check_pairs(actuals: Sequence[float], estimates: Sequence[float]) -> None:
    if len(actuals) == 0 or len(actuals) != len(estimates):
        raise DomainError(
            f"need equal nonzero counts of actuals and estimates, "
            f"got {len(actuals)} and {len(estimates)}"
        )
    for i, a in enumerate(actuals):
        if not a > 0:
            raise DomainError(f"actual effort at index {i} must be positive, got {a}")


def per_project_mre(
    actuals: Sequence[float], estimates: Sequence[float]
) -> list[float]:
    """Magnitude of relative error per project, in input order."""
    _check_pairs(actuals, estimates)
    return [abs(a - e) / a for a, e in zip(actuals, estimates)]


def mmre(actuals: Sequence[float], estimates: Sequence[float]) -> float:
    """Mean magnitude of relative error, ``mean(|actual - estimate| / actual)``."""
    errors = per_project_mre(actuals, estimates)
    return math.fsum(errors) / len(errors)


def pred(
    actuals: Sequence[float], estimates: Sequence[float], threshold_percent: float
) -> tuple[int, float]:
    """How many projects fall within ``threshold_percent`` relative error.

    Returns ``(count, count / n)``.  The boundary counts as within.
    """
    if not threshold_percent > 0:
        raise DomainError(f"threshold must be positive, got {threshold_percent}")
    errors = per_project_mre(actuals, estimates)
    count = sum(1 for e in errors if e <= threshold_percent / 100.0)
    return count, count / len(errors)


def format_pred_percent(count: int, n: int) -> int:
    """Displayed accuracy percent: ``floor(100 * count / n)``."""
    if n <= 0:
        raise DomainError(f"project count must be positive, got {n}")
    if not 0 <= count <= n:
        raise DomainError(f"count {count} outside [0, {n}]")
    return 100 * count // n


def metrics_report(
    actuals: Sequence[float],
    estimates: Sequence[float],
    thresholds: Sequence[int] = DEFAULT_THRESHOLDS,
) -> MetricsReport:
    """Bundle MMRE and the PRED table for one estimator's outputs."""
    errors = per_project_mre(actuals, estimates)
    n = len(errors)
    rows = []
    for t in sorted(thresholds):
        count, _ = pred(actuals, estimates, t)
        rows.append((int(t), count, format_pred_percent(count, n)))
    return MetricsReport(
        n=n,
        mmre=math.fsum(errors) / n,
        pred_rows=tuple(rows),
        per_project_mre=tuple(errors),
    )


def _estimate_all(
    records: Sequence[ProjectRecord],
    params: MultiplierBank,
    rules: DependencySet,
    schema: FactorSchema,
) -> list[float]:
    return [
        full_pipeline_estimate(r.ratings, r.inputs, rules, params, schema).effort_pm
        for r in records
    ]


def loocv_evaluate(
    records: Sequence[ProjectRecord],
    schema: FactorSchema,
    rules: DependencySet,
    initial_params: MultiplierBank,
    config: TrainingConfig,
    thresholds: Sequence[int] = DEFAULT_THRESHOLDS,
) -> tuple[MetricsReport, MetricsReport]:
    """Leave-one-out comparison of calibrated versus uncalibrated estimates.

    Each project is estimated by parameters trained on all the others
    (calibrated) and by ``initial_params`` as given (baseline).  Returns
    ``(calibrated_report, baseline_report)`` aggregated in dataset order.
    """
    if len(records) < 3:
        raise DomainError(
            f"leave-one-out needs at least 3 records, got {len(records)}"
        )
    actuals = [r.actual_effort for r in records]
    trained_estimates: list[float] = []
    for j, held_out in enumerate(records):
        fold = [r for i, r in enumerate(records) if i != j]
        try:
            report = train(fold, initial_params, config, rules, schema)
        except TrainingDivergedError as e:
            raise TrainingDivergedError(
                f"fold {j} (held out {held_out.id!r}): {e}",
                epoch=e.epoch,
                record_id=e.record_id,
            ) from e
        except NfaError as e:
            raise TrainingError(f"fold {j} (held out {held_out.id!r}): {e}") from e
        trained_estimates.append(
            full_pipeline_estimate(
                held_out.ratings, held_out.inputs, rules, report.final_params, schema
            ).effort_pm
        )
    baseline_estimates = _estimate_all(records, initial_params, rules, schema)
    return (
        metrics_report(actuals, trained_estimates, thresholds),
        metrics_report(actuals, baseline_estimates, thresholds),
    )


def holdout_evaluate(
    records: Sequence[ProjectRecord],
    schema: FactorSchema,
    rules: DependencySet,
    initial_params: MultiplierBank,
    config: TrainingConfig,
    test_fraction: float = 0.3,
    thresholds: Sequence[int] = DEFAULT_THRESHOLDS,
) -> tuple[MetricsReport, MetricsReport]:
    """Single seeded train/test split; same report pair as leave-one-out.

    The split is drawn from ``config.seed``, so a fixed seed gives a fixed
    partition.  The test side gets at least one record and the training side
    keeps at least two.
    """
    if not 0 < test_fraction < 1:
        raise DomainError(f"test fraction must be in (0, 1), got {test_fraction}")
    if len(records) < 3:
        raise DomainError(f"holdout needs at least 3 records, got {len(records)}")
    indices = list(range(len(records)))
    random.Random(config.seed).shuffle(indices)
    test_n = min(max(1, round(len(records) * test_fraction)), len(records) - 2)
    test_idx = sorted(indices[:test_n])
    train_idx = sorted(indices[test_n:])
    test_set = [records[i] for i in test_idx]
    train_set = [records[i] for i in train_idx]
    try:
        report = train(train_set, initial_params, config, rules, schema)
    except TrainingDivergedError:
        raise
    except NfaError as e:
        raise TrainingError(f"holdout training failed: {e}") from e
    actuals = [r.actual_effort for r in test_set]
    trained_estimates = _estimate_all(test_set, report.final_params, rules, schema)
    baseline_estimates = _estimate_all(test_set, initial_params, rules, schema)
    return (
        metrics_report(actuals, trained_estimates, thresholds),
        metrics_report(actuals, baseline_estimates, thresholds),
    )


@dataclass(frozen=True)
class ComparisonRow:
    threshold: int
    baseline_count: int
    baseline_pct: int
    nfa_count: int
    nfa_pct: int
    improvement: int


@dataclass(frozen=True)
class ComparisonReport:
    """Side-by-side PRED table plus the MMRE row.

    PRED improvements are percentage-point differences of the displayed
    (floored) percents; the MMRE improvement is
    ``floor(100 * (baseline - calibrated) / baseline)``, or 0 when the
    baseline is already exact.
    """

    n: int
    rows: tuple[ComparisonRow, ...]
    baseline_mmre: float
    nfa_mmre: float
    mmre_improvement_pct: int

    def to_text(self) -> str:
        out = io.StringIO()
        out.write(f"projects: {self.n}\n")
        header = (
            f"{'within':>8} {'baseline':>14} {'calibrated':>14} {'improvement':>12}\n"
        )
        out.write(header)
        for row in self.rows:
            base = f"{row.baseline_count}/{self.n} {row.baseline_pct}%"
            ours = f"{row.nfa_count}/{self.n} {row.nfa_pct}%"
            out.write(
                f"{row.threshold:>7}% {base:>14} {ours:>14} "
                f"{row.improvement:>11}%\n"
            )
        out.write(
            f"{'mmre':>8} {self.baseline_mmre:>14.4f} {self.nfa_mmre:>14.4f} "
            f"{self.mmre_improvement_pct:>11}%\n"
        )
        return out.getvalue()

    def to_csv(self) -> str:
        lines = ["threshold,baseline_count,baseline_pct,nfa_count,nfa_pct,improvement"]
        for row in self.rows:
            lines.append(
                f"{row.threshold},{row.baseline_count},{row.baseline_pct},"
                f"{row.nfa_count},{row.nfa_pct},{row.improvement}"
            )
        lines.append(
            f"mmre,{self.baseline_mmre!r},,{self.nfa_mmre!r},,"
            f"{self.mmre_improvement_pct}"
        )
        return "\n".join(lines) + "\n"


def compare_report(nfa: MetricsReport, baseline: MetricsReport) -> ComparisonReport:
    """Tabulate calibrated-versus-baseline accuracy on the same projects."""
    if nfa.n != baseline.n:
        raise DomainError(
            f"reports cover different project counts: {nfa.n} vs {baseline.n}"
        )
    nfa_thresholds = [row[0] for row in nfa.pred_rows]
    base_thresholds = [row[0] for row in baseline.pred_rows]
    if nfa_thresholds != base_thresholds:
        raise DomainError(
            f"reports use different thresholds: {nfa_thresholds} vs {base_thresholds}"
        )
    rows = tuple(
        ComparisonRow(
            threshold=t,
            baseline_count=bc,
            baseline_pct=bp,
            nfa_count=nc,
            nfa_pct=np_,
            improvement=np_ - bp,
        )
        for (t, nc, np_), (_, bc, bp) in zip(nfa.pred_rows, baseline.pred_rows)
    )
    if baseline.mmre > 0:
        mmre_improvement = math.floor(
            100.0 * (baseline.mmre - nfa.mmre) / baseline.mmre
        )
    else:
        mmre_improvement = 0
    return ComparisonReport(
        n=nfa.n,
        rows=rows,
        baseline_mmre=baseline.mmre,
        nfa_mmre=nfa.mmre,
        mmre_improvement_pct=mmre_improvement,
    )
