"""Shared fixtures: a tiny single-factor document and a synthetic
recovery dataset whose true multipliers are a perturbed copy of the
default bank."""

import random

import pytest

import nfa
from nfa.training import isotonic_project

RECOVERY_SEED = 2024


def make_single_factor_schema() -> nfa.FactorSchema:
    factor = nfa.FactorDefinition(
        id="cplx",
        name="product complexity",
        level_labels=("low", "nominal", "high"),
        direction="increasing",
        initial_fmp=(0.75, 1.0, 1.4),
    )
    return nfa.FactorSchema(factors=(factor,))


def make_single_factor_doc(a: float = 3.2, b: float = 1.05) -> nfa.ParameterDocument:
    schema = make_single_factor_schema()
    return nfa.ParameterDocument(
        schema=schema,
        params=nfa.MultiplierBank.initial_for(schema),
        rules=nfa.DependencySet(()),
        coefficients=nfa.ModelCoefficients(a, b),
        provenance="test fixture",
    )


def build_recovery_fixture(seed: int = RECOVERY_SEED, n: int = 60):
    """Projects whose efforts come from a perturbed copy of the default
    multiplier bank; training from the unperturbed bank must recover it.

    Returns ``(schema, initial_bank, true_bank, rules, records)``.
    """
    schema = nfa.default_schema()
    bank = nfa.default_bank(schema)
    rng = random.Random(seed)
    true_rows = []
    for factor, row in zip(schema.factors, bank.rows):
        perturbed = [v * rng.uniform(0.8, 1.25) for v in row]
        true_rows.append(tuple(isotonic_project(perturbed, factor.direction, 1e-3)))
    true_bank = nfa.MultiplierBank(tuple(true_rows))
    rules = nfa.default_rules()
    records = []
    for i in range(n):
        ratings = {f.id: rng.uniform(0, f.level_count - 1) for f in schema.factors}
        inputs = nfa.ModelInputs(size=rng.uniform(5.0, 100.0))
        actual = nfa.full_pipeline_estimate(
            ratings, inputs, rules, true_bank, schema
        ).effort_pm
        records.append(
            nfa.ProjectRecord(
                id=f"p{i:02d}",
                inputs=inputs,
                ratings=ratings,
                actual_effort=actual,
                weight=1.0,
            )
        )
    return schema, bank, true_bank, rules, records


def random_records(schema, rules, bank, rng, n, noise=(0.75, 1.3)):
    """Random dataset whose actuals are noisy multiples of the bank's own
    estimates, so training always has signal to act on."""
    records = []
    for i in range(n):
        ratings = {f.id: rng.uniform(0, f.level_count - 1) for f in schema.factors}
        inputs = nfa.ModelInputs(size=rng.uniform(2.0, 90.0))
        est = nfa.full_pipeline_estimate(
            ratings, inputs, rules, bank, schema
        ).effort_pm
        records.append(
            nfa.ProjectRecord(
                id=f"r{i:03d}",
                inputs=inputs,
                ratings=ratings,
                actual_effort=est * rng.uniform(*noise),
                weight=1.0,
            )
        )
    return records


@pytest.fixture(scope="session")
def recovery_fixture():
    return build_recovery_fixture()


@pytest.fixture
def single_factor_doc():
    return make_single_factor_doc()


@pytest.fixture(scope="session")
def default_doc():
    return nfa.default_document()
