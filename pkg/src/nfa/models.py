"""Pluggable algorithmic estimation back-ends and the full pipeline.

All shipped back-ends share the multiplicative parametric family

    effort = a * size^b * product(multipliers)

with ``size`` in KSLOC for the COCOMO-style entries and in unadjusted
function points for the ``function_points`` entry.  A back-end registered
here must map positive inputs to positive effort and, to be trainable,
declare the partial derivative of effort with respect to each multiplier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .bank import FactorTrace, MultiplierBank, nfb_forward_all
from .errors import CapabilityError, DomainError, FitError, StageError
from .rules import DependencySet, pnfis_adjust
from .schema import FactorSchema, RatingVector


@dataclass(frozen=True)
class ModelCoefficients:
    """Scale constant and size exponent of a parametric effort curve."""

    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not math.isfinite(self.a) or self.a <= 0:
            raise DomainError(f"coefficient a must be positive, got {self.a}")
        if not math.isfinite(self.b) or self.b <= 0:
            raise DomainError(f"coefficient b must be positive, got {self.b}")


@dataclass(frozen=True)
class MultiplicativeModel:
    """Back-end of the form ``a * size^b * product_em``.

    ``supports_multiplier_gradients`` advertises that the derivative of
    effort with respect to multiplier ``i`` is ``effort / multiplier_i``,
    which the training module relies on.
    """

    id: str
    size_unit: str
    default_coefficients: ModelCoefficients
    supports_multiplier_gradients: bool = True

    def effort(self, size: float, product_em: float, coefficients: ModelCoefficients) -> float:
        return coefficients.a * size ** coefficients.b * product_em


_REGISTRY: dict[str, MultiplicativeModel] = {}


def register_model(model: MultiplicativeModel) -> None:
    """Add a back-end to the registry; the id must be new."""
    if model.id in _REGISTRY:
        raise DomainError(f"model id {model.id!r} already registered")
    _REGISTRY[model.id] = model


def get_model(model_id: str) -> MultiplicativeModel:
    try:
        return _REGISTRY[model_id]
    except KeyError:
        raise DomainError(
            f"unknown model id {model_id!r}; registered: {sorted(_REGISTRY)}"
        ) from None


def registered_model_ids() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


for _model in (
    MultiplicativeModel("cocomo81_organic", "ksloc", ModelCoefficients(3.2, 1.05)),
    MultiplicativeModel("cocomo81_semidetached", "ksloc", ModelCoefficients(3.0, 1.12)),
    MultiplicativeModel("cocomo81_embedded", "ksloc", ModelCoefficients(2.8, 1.20)),
    # The function-point curve has no published constants here; fit (a, b)
    # from a dataset with fit_baseline_coefficients and store them in the
    # parameter document.
    MultiplicativeModel("function_points", "ufp", ModelCoefficients(1.0, 1.0)),
):
    register_model(_model)


@dataclass(frozen=True)
class ModelInputs:
    """Size plus back-end selection for one estimate.

    ``coefficients`` overrides the back-end's defaults when given; records
    parsed from a dataset leave it unset and pick up the calibrated
    coefficients of the active parameter document.
    """

    size: float
    model_id: str = "cocomo81_organic"
    coefficients: ModelCoefficients | None = None

    def __post_init__(self):
        object.__setattr__(self, "size", float(self.size))
        if not math.isfinite(self.size) or self.size <= 0:
            raise DomainError(f"size must be positive, got {self.size}")
        get_model(self.model_id)

    def resolved_coefficients(self) -> ModelCoefficients:
        if self.coefficients is not None:
            return self.coefficients
        return get_model(self.model_id).default_coefficients

    def with_coefficients(self, coefficients: ModelCoefficients | None) -> "ModelInputs":
        return ModelInputs(self.size, self.model_id, coefficients)


@dataclass(frozen=True)
class EstimationResult:
    """Estimate plus the full inference trace that produced it."""

    effort_pm: float
    multipliers: dict[str, float]
    product_em: float
    trace: dict[str, FactorTrace]
    arf: dict[str, float]

    def to_dict(self) -> dict:
        return {
            "effort_pm": self.effort_pm,
            "product_em": self.product_em,
            "multipliers": dict(self.multipliers),
            "arf": dict(self.arf),
            "trace": {
                fid: {"w": list(t.w), "w_bar": list(t.w_bar), "fm": t.fm}
                for fid, t in self.trace.items()
            },
        }


def estimate_effort(inputs: ModelInputs, multipliers: Mapping[str, float]) -> float:
    """Effort in person-months for given size and factor multipliers."""
    for fid, value in multipliers.items():
        if not math.isfinite(value) or value <= 0:
            raise DomainError(f"multiplier for {fid!r} must be positive, got {value}")
    product = math.prod(multipliers.values())
    coeffs = inputs.resolved_coefficients()
    return get_model(inputs.model_id).effort(inputs.size, product, coeffs)


def require_gradient_support(model_id: str) -> MultiplicativeModel:
    """The back-end, or a capability error if it cannot provide derivatives."""
    model = get_model(model_id)
    if not model.supports_multiplier_gradients:
        raise CapabilityError(
            f"model {model_id!r} does not declare multiplier derivatives; "
            f"training requires them"
        )
    return model


def fit_baseline_coefficients(records) -> ModelCoefficients:
    """Weighted least squares of ``ln effort`` on ``ln size`` in closed form.

    Minimizes ``sum(w * (ln effort - ln a - b ln size)^2)`` over the records
    and returns the fitted ``(a, b)``.
    """
    points = [
        (math.log(r.inputs.size), math.log(r.actual_effort), r.weight) for r in records
    ]
    total_w = sum(w for _, _, w in points)
    if total_w <= 0:
        raise FitError("all record weights are zero")
    if len({x for x, _, w in points if w > 0}) < 2:
        raise FitError("need at least 2 records with distinct sizes to fit a curve")
    mean_x = sum(w * x for x, _, w in points) / total_w
    mean_y = sum(w * y for _, y, w in points) / total_w
    sxx = sum(w * (x - mean_x) ** 2 for x, _, w in points)
    sxy = sum(w * (x - mean_x) * (y - mean_y) for x, y, w in points)
    b = sxy / sxx
    a = math.exp(mean_y - b * mean_x)
    return ModelCoefficients(a, b)


def full_pipeline_estimate(
    rf: RatingVector,
    inputs: ModelInputs,
    rules: DependencySet,
    bank: MultiplierBank,
    schema: FactorSchema,
) -> EstimationResult:
    """Raw ratings through adjustment, inference, and the back-end model.

    Errors raised inside a stage are wrapped with that stage's name.
    """
    try:
        arf = pnfis_adjust(rf, rules, schema)
    except Exception as e:
        raise StageError("adjust", e) from e
    try:
        multipliers, trace = nfb_forward_all(arf, bank, schema)
    except Exception as e:
        raise StageError("inference", e) from e
    try:
        effort = estimate_effort(inputs, multipliers)
    except Exception as e:
        raise StageError("model", e) from e
    return EstimationResult(
        effort_pm=effort,
        multipliers=multipliers,
        product_em=math.prod(multipliers.values()),
        trace=trace,
        arf=arf,
    )
