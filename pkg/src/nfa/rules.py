"""Inter-factor dependency rules applied before inference.

A rule says: when its antecedent factors sit near the named rating levels,
shift the target factor's rating by ``delta`` (scaled by how strongly the
antecedents match).  All rules read the raw ratings only -- adjustments never
cascade through already-adjusted values -- and contributions to one target
are summed, so rule order is irrelevant.  Results are clamped to the target's
rating range.  An empty rule set is the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import fsum

from .bank import triangular_membership
from .errors import RuleError
from .schema import FactorSchema, RatingVector


@dataclass(frozen=True)
class DependencyRule:
    """One adjustment: antecedent (factor, level) pairs, a target factor, and
    a signed rating offset in level units."""

    antecedents: tuple[tuple[str, int], ...]
    target: str
    delta: float
    note: str = ""

    def __post_init__(self):
        object.__setattr__(
            self,
            "antecedents",
            tuple((str(f), int(level)) for f, level in self.antecedents),
        )
        object.__setattr__(self, "delta", float(self.delta))


@dataclass(frozen=True)
class DependencySet:
    rules: tuple[DependencyRule, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))

    def __len__(self) -> int:
        return len(self.rules)


@dataclass(frozen=True)
class RuleViolation:
    rule_index: int
    reason: str


def validate_rules(rules: DependencySet, schema: FactorSchema) -> list[RuleViolation]:
    """Check every rule against the schema.

    Violations are returned as data, one entry per problem; an empty list
    means the set is valid.
    """
    violations: list[RuleViolation] = []
    for i, rule in enumerate(rules.rules):
        if not rule.antecedents:
            violations.append(RuleViolation(i, "rule has no antecedents"))
        for fid, level in rule.antecedents:
            if fid not in schema:
                violations.append(
                    RuleViolation(i, f"unknown antecedent factor {fid!r}")
                )
            elif not 0 <= level <= schema.factor(fid).level_count - 1:
                violations.append(
                    RuleViolation(
                        i,
                        f"antecedent level {level} out of range "
                        f"[0, {schema.factor(fid).level_count - 1}] for factor {fid!r}",
                    )
                )
        if rule.target not in schema:
            violations.append(RuleViolation(i, f"unknown target factor {rule.target!r}"))
        else:
            span = schema.factor(rule.target).level_count - 1
            if abs(rule.delta) > span:
                violations.append(
                    RuleViolation(
                        i,
                        f"delta {rule.delta} exceeds rating span {span} "
                        f"of target {rule.target!r}",
                    )
                )
    return violations


def pnfis_adjust(
    rf: RatingVector, rules: DependencySet, schema: FactorSchema
) -> dict[str, float]:
    """Turn raw ratings into adjusted ratings by applying the rule set.

    Each rule fires with strength ``min`` over its antecedents' triangular
    memberships at the raw ratings; the target receives the sum of
    ``strength * delta`` over all rules naming it, clamped to ``[0, K - 1]``.
    Factors targeted by no rule pass through unchanged.
    """
    violations = validate_rules(rules, schema)
    if violations:
        detail = "; ".join(f"rule {v.rule_index}: {v.reason}" for v in violations)
        raise RuleError(f"rule set contains violations: {detail}")
    ratings = schema.validate_ratings(rf)

    offsets: dict[str, list[float]] = {}
    for rule in rules.rules:
        strength = min(
            triangular_membership(
                ratings[fid], level, schema.factor(fid).level_count
            )
            for fid, level in rule.antecedents
        )
        offsets.setdefault(rule.target, []).append(strength * rule.delta)

    adjusted = dict(ratings)
    for fid, contributions in offsets.items():
        span = schema.factor(fid).level_count - 1
        # fsum rounds the exact sum, so rule order cannot change the result.
        shifted = ratings[fid] + fsum(contributions)
        adjusted[fid] = min(float(span), max(0.0, shifted))
    return adjusted
