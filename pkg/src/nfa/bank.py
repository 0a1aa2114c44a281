"""Per-factor fuzzy inference: adjusted ratings in, numeric multipliers out.

Each factor owns one small five-layer inference element.  Layer 1 computes
triangular membership degrees of the rating against every level; with a
single antecedent per rule the firing strength (layer 2) equals that
membership.  Layer 3 normalizes the strengths, layer 4 weights each level's
trained multiplier value by its normalized strength, and layer 5 sums the
weighted values into the factor's multiplier.

The default membership family is triangular with unit half-width, centered
at the integer level indices.  Adjacent triangles form a partition of unity
on ``[0, K - 1]``, which makes the whole element equal to piecewise-linear
interpolation of the multiplier values -- the property the tests pin down.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import DomainError, InferenceError, SchemaError
from .schema import FactorSchema, RatingVector


@dataclass(frozen=True)
class MultiplierBank:
    """Trainable multiplier values: one positive real per factor per level.

    Rows follow schema order; row ``i`` has that factor's level count.  The
    values must respect each factor's declared monotone direction, which
    :meth:`validate_for` enforces.
    """

    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "rows", tuple(tuple(float(v) for v in row) for row in self.rows)
        )

    @classmethod
    def initial_for(cls, schema: FactorSchema) -> "MultiplierBank":
        """Bank seeded with every factor's initial multiplier values."""
        return cls(tuple(f.initial_fmp for f in schema.factors))

    def row_for(self, schema: FactorSchema, factor_id: str) -> tuple[float, ...]:
        return self.rows[schema.factor_ids.index(factor_id)]

    def as_mapping(self, schema: FactorSchema) -> dict[str, tuple[float, ...]]:
        return dict(zip(schema.factor_ids, self.rows))

    def validate_for(self, schema: FactorSchema) -> None:
        """Raise :class:`SchemaError` unless shape, positivity, and each
        factor's monotone direction all hold."""
        if len(self.rows) != len(schema.factors):
            raise SchemaError(
                f"multiplier bank has {len(self.rows)} rows for "
                f"{len(schema.factors)} schema factors"
            )
        for factor, row in zip(schema.factors, self.rows):
            if len(row) != factor.level_count:
                raise SchemaError(
                    f"factor {factor.id!r}: {len(row)} multiplier values for "
                    f"{factor.level_count} levels"
                )
            if any(not math.isfinite(v) or v <= 0 for v in row):
                raise SchemaError(f"factor {factor.id!r}: multiplier values must be positive")
            if factor.direction == "increasing" and any(
                a > b for a, b in zip(row, row[1:])
            ):
                raise SchemaError(
                    f"factor {factor.id!r}: monotonicity violated, values must be "
                    f"non-decreasing"
                )
            if factor.direction == "decreasing" and any(
                a < b for a, b in zip(row, row[1:])
            ):
                raise SchemaError(
                    f"factor {factor.id!r}: monotonicity violated, values must be "
                    f"non-increasing"
                )


@dataclass(frozen=True)
class FactorTrace:
    """Inference record for one factor: raw strengths, normalized strengths,
    and the resulting multiplier."""

    w: tuple[float, ...]
    w_bar: tuple[float, ...]
    fm: float


def triangular_membership(x: float, center: int, level_count: int) -> float:
    """Membership degree of rating ``x`` in the triangle centered at a level.

    Unit spacing puts adjacent centers at zero support: the degree is
    ``max(0, 1 - |x - center|)``.
    """
    if not 0 <= center <= level_count - 1:
        raise DomainError(
            f"level index {center} out of range [0, {level_count - 1}]"
        )
    if not math.isfinite(x) or not 0.0 <= x <= level_count - 1:
        raise DomainError(
            f"rating {x} out of range [0, {level_count - 1}]"
        )
    return max(0.0, 1.0 - abs(x - center))


def nfb_forward(arf: float, fmp: Sequence[float]) -> tuple[float, FactorTrace]:
    """Run one factor's five layers on an adjusted rating.

    Returns the factor multiplier together with the full trace.  The result
    always lies between the smallest and largest value of ``fmp``.
    """
    k = len(fmp)
    w = tuple(triangular_membership(arf, center, k) for center in range(k))
    total = math.fsum(w)
    if total <= 0.0:
        raise InferenceError(
            f"no fuzzy rule fired for rating {arf}; membership family does not "
            f"cover this value"
        )
    w_bar = tuple(v / total for v in w)
    fm = math.fsum(wb * p for wb, p in zip(w_bar, fmp))
    return fm, FactorTrace(w=w, w_bar=w_bar, fm=fm)


def nfb_forward_all(
    arf: RatingVector, bank: MultiplierBank, schema: FactorSchema
) -> tuple[dict[str, float], dict[str, FactorTrace]]:
    """Apply :func:`nfb_forward` independently to every schema factor.

    ``arf`` must contain exactly one in-range rating per factor.  Returns the
    multipliers and the per-factor traces, both keyed by factor id in schema
    order.
    """
    ratings = schema.validate_ratings(arf)
    bank.validate_for(schema)
    multipliers: dict[str, float] = {}
    trace: dict[str, FactorTrace] = {}
    for factor, row in zip(schema.factors, bank.rows):
        fm, entry = nfb_forward(ratings[factor.id], row)
        multipliers[factor.id] = fm
        trace[factor.id] = entry
    return multipliers, trace


# Contract-level names: the trainable values are "the NFB parameters" and a
# full forward pass yields "the NFB trace".
NfbParameters = MultiplierBank
NfbTrace = Mapping[str, FactorTrace]
