"""Calibration of the multiplier bank against historical project data.

Full-batch gradient descent on the weighted mean magnitude of relative
error, with a Euclidean projection onto each factor's monotone cone (pool
adjacent violators) plus a positivity floor after every step.  The
projection runs after each update, so the constraints hold at every epoch,
not just at the end.  Only the multiplier values train; memberships,
dependency rules, and curve coefficients stay fixed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bank import MultiplierBank, nfb_forward
from .errors import DomainError, TrainingDivergedError, TrainingError
from .models import ModelInputs, require_gradient_support
from .rules import DependencySet, pnfis_adjust
from .schema import FactorSchema


@dataclass(frozen=True)
class ProjectRecord:
    """One historical project: inputs, raw ratings, actual effort, weight.

    Weights bias training toward trusted data points; a zero weight keeps
    the record in the dataset without influence.
    """

    id: str
    inputs: ModelInputs
    ratings: dict[str, float]
    actual_effort: float
    weight: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "actual_effort", float(self.actual_effort))
        object.__setattr__(self, "weight", float(self.weight))
        if not math.isfinite(self.actual_effort) or self.actual_effort <= 0:
            raise DomainError(
                f"record {self.id!r}: actual effort must be positive, "
                f"got {self.actual_effort}"
            )
        if not math.isfinite(self.weight) or self.weight < 0:
            raise DomainError(
                f"record {self.id!r}: weight must be non-negative, got {self.weight}"
            )


@dataclass(frozen=True)
class TrainingConfig:
    learning_rate: float = 0.05
    epochs: int = 500
    min_fmp: float = 1e-3
    keep_best: bool = True
    seed: int = 0
    loss_id: str = "mre_mean"

    def __post_init__(self):
        if self.learning_rate < 0:
            raise DomainError(f"learning rate must be >= 0, got {self.learning_rate}")
        if self.epochs < 1:
            raise DomainError(f"epochs must be >= 1, got {self.epochs}")
        if self.min_fmp <= 0:
            raise DomainError(f"multiplier floor must be positive, got {self.min_fmp}")
        if self.loss_id != "mre_mean":
            raise DomainError(f"unknown loss {self.loss_id!r}")


@dataclass(frozen=True)
class TrainingReport:
    """Loss trajectory and the selected parameters.

    ``loss_history[0]`` is the loss of the (projected) initial parameters;
    entry ``e`` is the loss after epoch ``e``.  ``best_epoch`` indexes into
    that history.
    """

    loss_history: tuple[float, ...]
    best_epoch: int
    final_params: MultiplierBank
    initial_loss: float
    final_loss: float


def isotonic_project(
    values: Sequence[float], direction: str, floor: float
) -> list[float]:
    """Euclidean projection onto the monotone sequences of one direction.

    Pool adjacent violators for ``increasing``/``decreasing``; ``none`` only
    applies the positivity floor.  The floor clamp runs after the
    projection.
    """
    if direction not in ("increasing", "decreasing", "none"):
        raise DomainError(f"unknown direction {direction!r}")
    if direction == "none":
        return [max(float(v), floor) for v in values]
    seq = [float(v) for v in values]
    if direction == "decreasing":
        projected = _pav_increasing([-v for v in seq])
        return [max(-v, floor) for v in projected]
    return [max(v, floor) for v in _pav_increasing(seq)]


def _pav_increasing(seq: list[float]) -> list[float]:
    # Blocks of (mean, count); merge backwards while out of order.
    means: list[float] = []
    counts: list[int] = []
    for v in seq:
        mean, count = v, 1
        while means and means[-1] > mean:
            prev_mean, prev_count = means.pop(), counts.pop()
            mean = (prev_mean * prev_count + mean * count) / (prev_count + count)
            count += prev_count
        means.append(mean)
        counts.append(count)
    out: list[float] = []
    for mean, count in zip(means, counts):
        out.extend([mean] * count)
    return out


def project_bank(bank: MultiplierBank, schema: FactorSchema, floor: float) -> MultiplierBank:
    """Project every factor row onto its declared direction and the floor."""
    rows = tuple(
        tuple(isotonic_project(row, factor.direction, floor))
        for factor, row in zip(schema.factors, bank.rows)
    )
    return MultiplierBank(rows)


class _Batch:
    """Pre-computed, vectorized view of a dataset for one training run.

    Memberships depend only on the adjusted ratings, which training never
    changes, so the normalized strengths are computed once; each epoch then
    reduces to small matrix products against the current multiplier rows.
    """

    def __init__(
        self,
        records: Sequence[ProjectRecord],
        rules: DependencySet,
        schema: FactorSchema,
    ):
        if not records:
            raise TrainingError("no records to train on")
        weights = np.array([r.weight for r in records], dtype=float)
        if weights.sum() <= 0:
            raise TrainingError("all record weights are zero")
        self.schema = schema
        self.record_ids = [r.id for r in records]
        self.weights = weights
        self.total_weight = float(weights.sum())
        self.actuals = np.array([r.actual_effort for r in records], dtype=float)
        base = []
        for r in records:
            model = require_gradient_support(r.inputs.model_id)
            base.append(model.effort(r.inputs.size, 1.0, r.inputs.resolved_coefficients()))
        self.base = np.array(base, dtype=float)
        # Normalized firing strengths per factor: one (records x levels) matrix.
        adjusted = [pnfis_adjust(r.ratings, rules, schema) for r in records]
        self.strengths: list[np.ndarray] = []
        for factor in schema.factors:
            mat = np.empty((len(records), factor.level_count), dtype=float)
            for j, arf in enumerate(adjusted):
                _, trace = nfb_forward(arf[factor.id], (1.0,) * factor.level_count)
                mat[j] = trace.w_bar
            self.strengths.append(mat)

    def factor_multipliers(self, rows: list[np.ndarray]) -> np.ndarray:
        """(records x factors) matrix of inferred multipliers."""
        cols = [mat @ row for mat, row in zip(self.strengths, rows)]
        return np.column_stack(cols)

    def estimates(self, rows: list[np.ndarray]) -> tuple[np.ndarray, np.ndarray]:
        fm = self.factor_multipliers(rows)
        return self.base * fm.prod(axis=1), fm

    def loss(self, rows: list[np.ndarray]) -> float:
        est, _ = self.estimates(rows)
        mre = np.abs(self.actuals - est) / self.actuals
        return float((self.weights * mre).sum() / self.total_weight)

    def loss_and_gradient(self, rows: list[np.ndarray]) -> tuple[float, list[np.ndarray]]:
        est, fm = self.estimates(rows)
        residual = est - self.actuals
        mre = np.abs(residual) / self.actuals
        loss = float((self.weights * mre).sum() / self.total_weight)
        # d loss / d value[i][k] = sum_j (w_j/W) sign_j / actual_j
        #                          * (est_j / fm_ij) * strength_jk
        coef = (self.weights / self.total_weight) * np.sign(residual) / self.actuals * est
        grads = [
            mat.T @ (coef / fm[:, i]) for i, mat in enumerate(self.strengths)
        ]
        return loss, grads

    def first_nonfinite_record(self, values: np.ndarray) -> str:
        bad = np.flatnonzero(~np.isfinite(values))
        return self.record_ids[bad[0]] if bad.size else self.record_ids[0]


def _rows_as_arrays(bank: MultiplierBank) -> list[np.ndarray]:
    return [np.array(row, dtype=float) for row in bank.rows]


def mre_loss(
    records: Sequence[ProjectRecord],
    params: MultiplierBank,
    rules: DependencySet,
    schema: FactorSchema,
) -> float:
    """Weighted mean of ``|actual - estimate| / actual`` over the records."""
    params.validate_for(schema)
    return _Batch(records, rules, schema).loss(_rows_as_arrays(params))


def loss_gradient(
    records: Sequence[ProjectRecord],
    params: MultiplierBank,
    rules: DependencySet,
    schema: FactorSchema,
) -> list[np.ndarray]:
    """Gradient of :func:`mre_loss` with respect to every multiplier value.

    The absolute value's kink at ``estimate == actual`` takes subgradient 0.
    Returned as one array per factor, shaped like the bank rows.
    """
    params.validate_for(schema)
    _, grads = _Batch(records, rules, schema).loss_and_gradient(_rows_as_arrays(params))
    return grads


def train(
    records: Sequence[ProjectRecord],
    initial_params: MultiplierBank,
    config: TrainingConfig,
    rules: DependencySet,
    schema: FactorSchema,
    on_epoch: Callable[[int, float, MultiplierBank], None] | None = None,
) -> TrainingReport:
    """Run the projected-gradient loop and report the loss trajectory.

    With ``keep_best`` the returned parameters are the lowest-loss ones seen
    across the whole run, the projected initial parameters included; ties
    resolve to the earliest epoch, so a zero learning rate returns the
    projected initial bank unchanged.  ``on_epoch`` observes every epoch
    (including epoch 0) for progress output and invariant checks.
    """
    initial_params.validate_for(schema)
    batch = _Batch(records, rules, schema)
    params = project_bank(initial_params, schema, config.min_fmp)
    rows = _rows_as_arrays(params)

    initial_loss = batch.loss(rows)
    if not math.isfinite(initial_loss):
        est, _ = batch.estimates(rows)
        raise TrainingDivergedError(
            f"non-finite loss before training "
            f"(record {batch.first_nonfinite_record(est)!r})",
            epoch=0,
            record_id=batch.first_nonfinite_record(est),
        )
    history = [initial_loss]
    best_loss, best_epoch, best_params = initial_loss, 0, params
    if on_epoch is not None:
        on_epoch(0, initial_loss, params)

    for epoch in range(1, config.epochs + 1):
        _, grads = batch.loss_and_gradient(rows)
        for g in grads:
            if not np.isfinite(g).all():
                raise TrainingDivergedError(
                    f"non-finite gradient at epoch {epoch}",
                    epoch=epoch,
                    record_id=batch.record_ids[0],
                )
        rows = [row - config.learning_rate * g for row, g in zip(rows, grads)]
        params = project_bank(
            MultiplierBank(tuple(tuple(row) for row in rows)), schema, config.min_fmp
        )
        rows = _rows_as_arrays(params)
        est, _ = batch.estimates(rows)
        if not np.isfinite(est).all():
            bad = batch.first_nonfinite_record(est)
            raise TrainingDivergedError(
                f"non-finite estimate at epoch {epoch} (record {bad!r})",
                epoch=epoch,
                record_id=bad,
            )
        loss = batch.loss(rows)
        history.append(loss)
        if loss < best_loss:
            best_loss, best_epoch, best_params = loss, epoch, params
        if on_epoch is not None:
            on_epoch(epoch, loss, params)

    if config.keep_best:
        final_params, final_loss = best_params, best_loss
    else:
        final_params, final_loss = params, history[-1]
        best_epoch = len(history) - 1
    return TrainingReport(
        loss_history=tuple(history),
        best_epoch=best_epoch,
        final_params=final_params,
        initial_loss=initial_loss,
        final_loss=final_loss,
    )
