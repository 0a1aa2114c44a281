"""Built-in factor schema: the fifteen COCOMO-81 intermediate cost drivers.

Level labels and initial multiplier values are transcribed from the
published intermediate-COCOMO-81 effort multiplier table.  Most drivers
define only a subset of the six-name rating ladder (very_low .. extra_high),
so the level count varies between four and six per factor.  The schedule
driver's published values are V-shaped, hence its direction is ``none``;
every other driver is monotone in its rating.

These are seed values: calibration against local project data is expected
to overwrite them.
"""

from __future__ import annotations

from .bank import MultiplierBank
from .models import ModelCoefficients
from .rules import DependencySet
from .schema import FactorDefinition, FactorSchema

VERY_LOW = "very_low"
LOW = "low"
NOMINAL = "nominal"
HIGH = "high"
VERY_HIGH = "very_high"
EXTRA_HIGH = "extra_high"

_FACTOR_TABLE = (
    # id, name, direction, ((label, multiplier), ...)
    ("rely", "Required software reliability", "increasing",
     ((VERY_LOW, 0.75), (LOW, 0.88), (NOMINAL, 1.00), (HIGH, 1.15), (VERY_HIGH, 1.40))),
    ("data", "Database size", "increasing",
     ((LOW, 0.94), (NOMINAL, 1.00), (HIGH, 1.08), (VERY_HIGH, 1.16))),
    ("cplx", "Product complexity", "increasing",
     ((VERY_LOW, 0.70), (LOW, 0.85), (NOMINAL, 1.00), (HIGH, 1.15), (VERY_HIGH, 1.30),
      (EXTRA_HIGH, 1.65))),
    ("time", "Execution time constraint", "increasing",
     ((NOMINAL, 1.00), (HIGH, 1.11), (VERY_HIGH, 1.30), (EXTRA_HIGH, 1.66))),
    ("stor", "Main storage constraint", "increasing",
     ((NOMINAL, 1.00), (HIGH, 1.06), (VERY_HIGH, 1.21), (EXTRA_HIGH, 1.56))),
    ("virt", "Virtual machine volatility", "increasing",
     ((LOW, 0.87), (NOMINAL, 1.00), (HIGH, 1.15), (VERY_HIGH, 1.30))),
    ("turn", "Computer turnaround time", "increasing",
     ((LOW, 0.87), (NOMINAL, 1.00), (HIGH, 1.07), (VERY_HIGH, 1.15))),
    ("acap", "Analyst capability", "decreasing",
     ((VERY_LOW, 1.46), (LOW, 1.19), (NOMINAL, 1.00), (HIGH, 0.86), (VERY_HIGH, 0.71))),
    ("aexp", "Applications experience", "decreasing",
     ((VERY_LOW, 1.29), (LOW, 1.13), (NOMINAL, 1.00), (HIGH, 0.91), (VERY_HIGH, 0.82))),
    ("pcap", "Programmer capability", "decreasing",
     ((VERY_LOW, 1.42), (LOW, 1.17), (NOMINAL, 1.00), (HIGH, 0.86), (VERY_HIGH, 0.70))),
    ("vexp", "Virtual machine experience", "decreasing",
     ((VERY_LOW, 1.21), (LOW, 1.10), (NOMINAL, 1.00), (HIGH, 0.90))),
    ("lexp", "Programming language experience", "decreasing",
     ((VERY_LOW, 1.14), (LOW, 1.07), (NOMINAL, 1.00), (HIGH, 0.95))),
    ("modp", "Modern programming practices", "decreasing",
     ((VERY_LOW, 1.24), (LOW, 1.10), (NOMINAL, 1.00), (HIGH, 0.91), (VERY_HIGH, 0.82))),
    ("tool", "Use of software tools", "decreasing",
     ((VERY_LOW, 1.24), (LOW, 1.10), (NOMINAL, 1.00), (HIGH, 0.91), (VERY_HIGH, 0.83))),
    ("sced", "Required development schedule", "none",
     ((VERY_LOW, 1.23), (LOW, 1.08), (NOMINAL, 1.00), (HIGH, 1.04), (VERY_HIGH, 1.10))),
)


def default_schema(model_binding: str = "cocomo81_organic") -> FactorSchema:
    """The built-in fifteen-driver schema bound to the given back-end."""
    factors = tuple(
        FactorDefinition(
            id=fid,
            name=name,
            level_labels=tuple(label for label, _ in levels),
            direction=direction,
            initial_fmp=tuple(value for _, value in levels),
        )
        for fid, name, direction, levels in _FACTOR_TABLE
    )
    return FactorSchema(factors=factors, model_binding=model_binding)


def default_bank(schema: FactorSchema | None = None) -> MultiplierBank:
    return MultiplierBank.initial_for(schema or default_schema())


def default_coefficients(model_binding: str = "cocomo81_organic") -> ModelCoefficients:
    from .models import get_model

    return get_model(model_binding).default_coefficients


def nominal_ratings(schema: FactorSchema) -> dict[str, float]:
    """All factors at their ``nominal`` level (or mid-scale when a factor
    has no level of that name)."""
    ratings = {}
    for factor in schema.factors:
        if NOMINAL in factor.level_labels:
            ratings[factor.id] = float(factor.level_labels.index(NOMINAL))
        else:
            ratings[factor.id] = (factor.level_count - 1) / 2
    return ratings


def default_rules() -> DependencySet:
    """No built-in dependencies; rule sets are user data."""
    return DependencySet(())


def default_document(model_binding: str = "cocomo81_organic"):
    """A complete factory-fresh parameter document for the given back-end."""
    from .storage import ParameterDocument

    schema = default_schema(model_binding)
    return ParameterDocument(
        schema=schema,
        params=default_bank(schema),
        rules=default_rules(),
        coefficients=default_coefficients(model_binding),
        provenance="factory defaults",
    )
