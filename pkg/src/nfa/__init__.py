"""Neuro-fuzzy algorithmic software effort estimation.

Factor ratings pass through dependency-rule adjustment, per-factor fuzzy
inference against trainable multiplier values, and a multiplicative cost
model; the multiplier values calibrate against historical projects by
projected gradient descent on mean relative error.
"""

from .bank import (
    FactorTrace,
    MultiplierBank,
    NfbParameters,
    NfbTrace,
    nfb_forward,
    nfb_forward_all,
    triangular_membership,
)
from .defaults import (
    default_bank,
    default_coefficients,
    default_document,
    default_rules,
    default_schema,
    nominal_ratings,
)
from .errors import (
    CapabilityError,
    DocumentError,
    DomainError,
    FitError,
    InferenceError,
    NfaError,
    ParseError,
    RuleError,
    SchemaError,
    StageError,
    TrainingDivergedError,
    TrainingError,
)
from .evaluation import (
    DEFAULT_THRESHOLDS,
    ComparisonReport,
    ComparisonRow,
    MetricsReport,
    compare_report,
    format_pred_percent,
    holdout_evaluate,
    loocv_evaluate,
    metrics_report,
    mmre,
    per_project_mre,
    pred,
)
from .models import (
    EstimationResult,
    ModelCoefficients,
    ModelInputs,
    MultiplicativeModel,
    estimate_effort,
    fit_baseline_coefficients,
    full_pipeline_estimate,
    get_model,
    register_model,
    registered_model_ids,
    require_gradient_support,
)
from .rules import (
    DependencyRule,
    DependencySet,
    RuleViolation,
    pnfis_adjust,
    validate_rules,
)
from .schema import DIRECTIONS, FactorDefinition, FactorSchema, RatingVector
from .storage import (
    ParameterDocument,
    attach_coefficients,
    format_dataset_csv,
    load_parameter_document,
    parse_dataset_csv,
    read_dataset,
    read_parameter_document,
    save_parameter_document,
    write_parameter_document,
)
from .training import (
    ProjectRecord,
    TrainingConfig,
    TrainingReport,
    isotonic_project,
    loss_gradient,
    mre_loss,
    project_bank,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "CapabilityError",
    "ComparisonReport",
    "ComparisonRow",
    "DEFAULT_THRESHOLDS",
    "DIRECTIONS",
    "DependencyRule",
    "DependencySet",
    "DocumentError",
    "DomainError",
    "EstimationResult",
    "FactorDefinition",
    "FactorSchema",
    "FactorTrace",
    "FitError",
    "InferenceError",
    "MetricsReport",
    "ModelCoefficients",
    "ModelInputs",
    "MultiplicativeModel",
    "MultiplierBank",
    "NfaError",
    "NfbParameters",
    "NfbTrace",
    "ParameterDocument",
    "ParseError",
    "ProjectRecord",
    "RatingVector",
    "RuleError",
    "RuleViolation",
    "SchemaError",
    "StageError",
    "TrainingConfig",
    "TrainingDivergedError",
    "TrainingError",
    "TrainingReport",
    "attach_coefficients",
    "compare_report",
    "default_bank",
    "default_coefficients",
    "default_document",
    "default_rules",
    "default_schema",
    "estimate_effort",
    "fit_baseline_coefficients",
    "format_dataset_csv",
    "format_pred_percent",
    "full_pipeline_estimate",
    "get_model",
    "holdout_evaluate",
    "isotonic_project",
    "load_parameter_document",
    "loocv_evaluate",
    "loss_gradient",
    "metrics_report",
    "mmre",
    "mre_loss",
    "nfb_forward",
    "nfb_forward_all",
    "nominal_ratings",
    "parse_dataset_csv",
    "per_project_mre",
    "pnfis_adjust",
    "pred",
    "project_bank",
    "read_dataset",
    "read_parameter_document",
    "register_model",
    "registered_model_ids",
    "require_gradient_support",
    "save_parameter_document",
    "train",
    "triangular_membership",
    "validate_rules",
    "write_parameter_document",
]
