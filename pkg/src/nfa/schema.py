"""Factor schema: the contributing factors of an estimation problem.

A schema declares, for each factor, its ordered rating levels, the required
monotone direction of the trained multiplier values across those levels, and
the initial multiplier values.  Ratings live on a continuous axis
``[0, K - 1]`` where the integer points coincide with the named levels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping

from .errors import DomainError, SchemaError

DIRECTIONS = ("increasing", "decreasing", "none")

#: A full assignment of ratings, one entry per schema factor, each value in
#: ``[0, K_i - 1]``.  Used both for raw and for dependency-adjusted ratings.
RatingVector = Mapping[str, float]


def _is_monotone(values: tuple[float, ...], direction: str) -> bool:
    if direction == "increasing":
        return all(a <= b for a, b in zip(values, values[1:]))
    if direction == "decreasing":
        return all(a >= b for a, b in zip(values, values[1:]))
    return True


@dataclass(frozen=True)
class FactorDefinition:
    """One contributing factor: its rating scale and initial multipliers.

    ``direction`` constrains the trained multiplier values across levels:
    ``increasing`` means non-decreasing, ``decreasing`` non-increasing, and
    ``none`` leaves them unconstrained (a factor whose published multipliers
    are V-shaped, for example).
    """

    id: str
    name: str
    level_labels: tuple[str, ...]
    direction: str
    initial_fmp: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "level_labels", tuple(self.level_labels))
        object.__setattr__(self, "initial_fmp", tuple(float(v) for v in self.initial_fmp))
        if not self.id:
            raise SchemaError("factor id must be non-empty")
        if self.level_count < 2:
            raise SchemaError(f"factor {self.id!r}: needs at least 2 rating levels")
        if len(set(self.level_labels)) != self.level_count:
            raise SchemaError(f"factor {self.id!r}: duplicate level labels")
        if len(self.initial_fmp) != self.level_count:
            raise SchemaError(
                f"factor {self.id!r}: {len(self.initial_fmp)} initial values "
                f"for {self.level_count} levels"
            )
        if any(not math.isfinite(v) or v <= 0 for v in self.initial_fmp):
            raise SchemaError(f"factor {self.id!r}: initial multiplier values must be positive")
        if self.direction not in DIRECTIONS:
            raise SchemaError(
                f"factor {self.id!r}: direction must be one of {DIRECTIONS}, "
                f"got {self.direction!r}"
            )
        if not _is_monotone(self.initial_fmp, self.direction):
            raise SchemaError(
                f"factor {self.id!r}: initial multiplier values violate "
                f"direction {self.direction!r}"
            )

    @property
    def level_count(self) -> int:
        return len(self.level_labels)

    def level_index(self, label: str) -> int:
        """Index of a named rating level."""
        try:
            return self.level_labels.index(label)
        except ValueError:
            raise SchemaError(
                f"factor {self.id!r}: unknown level label {label!r} "
                f"(expected one of {list(self.level_labels)})"
            ) from None

    def coerce_rating(self, value) -> float:
        """Turn a level label or a number into a rating in ``[0, K - 1]``.

        Labels map to their integer index; numbers are accepted as-is after a
        range check.
        """
        if isinstance(value, str):
            try:
                numeric = float(value)
            except ValueError:
                return float(self.level_index(value))
        elif isinstance(value, bool):
            raise DomainError(f"factor {self.id!r}: rating must be a number or level label")
        else:
            numeric = float(value)
        if not math.isfinite(numeric) or not 0.0 <= numeric <= self.level_count - 1:
            raise DomainError(
                f"factor {self.id!r}: rating {numeric} out of range [0, {self.level_count - 1}]"
            )
        return numeric


@dataclass(frozen=True)
class FactorSchema:
    """Ordered collection of factor definitions bound to one back-end model."""

    factors: tuple[FactorDefinition, ...]
    model_binding: str = "cocomo81_organic"
    _by_id: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise SchemaError("schema must declare at least one factor")
        ids = [f.id for f in self.factors]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise SchemaError(f"schema has duplicate factor ids: {dupes}")
        object.__setattr__(self, "_by_id", {f.id: f for f in self.factors})

    @property
    def factor_ids(self) -> tuple[str, ...]:
        return tuple(f.id for f in self.factors)

    def __contains__(self, factor_id: str) -> bool:
        return factor_id in self._by_id

    def factor(self, factor_id: str) -> FactorDefinition:
        try:
            return self._by_id[factor_id]
        except KeyError:
            raise SchemaError(f"schema mismatch: unknown factor id {factor_id!r}") from None

    def validate_ratings(self, ratings: RatingVector) -> dict[str, float]:
        """Check a rating vector against the schema and normalize it.

        Accepts level labels or numbers as values; returns a plain dict with
        one float per factor, in schema order.  Raises :class:`SchemaError`
        on missing or extra factors.
        """
        missing = [fid for fid in self.factor_ids if fid not in ratings]
        extra = [fid for fid in ratings if fid not in self._by_id]
        if missing or extra:
            parts = []
            if missing:
                parts.append(f"missing factors {missing}")
            if extra:
                parts.append(f"unknown factors {extra}")
            raise SchemaError("schema mismatch: " + ", ".join(parts))
        return {fid: self._by_id[fid].coerce_rating(ratings[fid]) for fid in self.factor_ids}
