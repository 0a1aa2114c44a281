"""Fuzzy inference layer: membership shapes, the per-factor forward pass,
and its equivalence with piecewise-linear interpolation."""

import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

import nfa
from nfa import DomainError, FactorTrace, MultiplierBank, SchemaError

from conftest import make_single_factor_schema

FMP3 = (0.75, 1.00, 1.40)


class TestTriangularMembership:
    def test_at_center(self):
        assert nfa.triangular_membership(2.0, 2, 6) == 1.0

    def test_at_adjacent_center(self):
        assert nfa.triangular_membership(3.0, 2, 6) == 0.0

    def test_between_centers(self):
        assert nfa.triangular_membership(2.25, 2, 6) == 0.75

    def test_far_from_center(self):
        assert nfa.triangular_membership(5.0, 1, 6) == 0.0

    def test_center_out_of_range(self):
        with pytest.raises(DomainError, match=r"level index 6 out of range \[0, 5\]"):
            nfa.triangular_membership(2.0, 6, 6)

    def test_rating_out_of_range(self):
        with pytest.raises(DomainError, match=r"rating 5.5 out of range \[0, 5\]"):
            nfa.triangular_membership(5.5, 2, 6)

    def test_rating_below_range(self):
        with pytest.raises(DomainError, match="out of range"):
            nfa.triangular_membership(-0.1, 0, 6)

    def test_non_finite_rating(self):
        with pytest.raises(DomainError):
            nfa.triangular_membership(float("nan"), 2, 6)

    @given(st.floats(0.0, 5.0), st.integers(0, 5))
    def test_bounded_unit_interval(self, x, center):
        assert 0.0 <= nfa.triangular_membership(x, center, 6) <= 1.0

    def test_partition_of_unity(self):
        # Summed over all centers, unit-spaced triangles always total one.
        for k in (2, 3, 6):
            for i in range(101):
                x = (k - 1) * i / 100
                total = math.fsum(
                    nfa.triangular_membership(x, c, k) for c in range(k)
                )
                assert total == pytest.approx(1.0, abs=1e-12)


class TestNfbForward:
    def test_crisp_nominal(self):
        fm, trace = nfa.nfb_forward(1.0, FMP3)
        assert fm == 1.00
        assert trace.w_bar == (0.0, 1.0, 0.0)

    def test_midpoint(self):
        fm, _ = nfa.nfb_forward(0.5, FMP3)
        assert fm == pytest.approx(0.875, abs=1e-12)

    def test_quarter_point(self):
        fm, trace = nfa.nfb_forward(1.25, FMP3)
        assert fm == pytest.approx(1.10, abs=1e-12)
        assert trace.w_bar == pytest.approx((0.0, 0.75, 0.25), abs=1e-12)

    def test_crisp_ratings_exact(self):
        # At integer ratings the multiplier must equal the table value
        # exactly, no tolerance.
        for fmp in (FMP3, (1.3, 1.0, 0.9, 0.8), (2.0, 0.5)):
            for level, value in enumerate(fmp):
                fm, _ = nfa.nfb_forward(float(level), fmp)
                assert fm == value

    def test_matches_linear_interpolation(self):
        rng = random.Random(7)
        for k in (2, 3, 6):
            centers = np.arange(k, dtype=float)
            for _ in range(200):
                fmp = tuple(rng.uniform(0.1, 3.0) for _ in range(k))
                x = rng.uniform(0.0, k - 1)
                fm, _ = nfa.nfb_forward(x, fmp)
                assert abs(fm - float(np.interp(x, centers, fmp))) <= 1e-12

    def test_result_within_fmp_range(self):
        rng = random.Random(11)
        for _ in range(300):
            k = rng.randint(2, 7)
            fmp = tuple(rng.uniform(0.05, 4.0) for _ in range(k))
            x = rng.uniform(0.0, k - 1)
            fm, _ = nfa.nfb_forward(x, fmp)
            assert min(fmp) - 1e-12 <= fm <= max(fmp) + 1e-12

    def test_trace_weights_normalized(self):
        rng = random.Random(13)
        for _ in range(200):
            k = rng.randint(2, 7)
            x = rng.uniform(0.0, k - 1)
            _, trace = nfa.nfb_forward(x, (1.0,) * k)
            assert math.fsum(trace.w_bar) == pytest.approx(1.0, abs=1e-12)
            active = [i for i, w in enumerate(trace.w) if w > 0.0]
            assert 1 <= len(active) <= 2
            if len(active) == 2:
                assert active[1] - active[0] == 1

    def test_monotone_response_on_monotone_row(self):
        xs = [i * 0.01 for i in range(201)]
        values = [nfa.nfb_forward(x, FMP3)[0] for x in xs]
        assert all(a <= b + 1e-12 for a, b in zip(values, values[1:]))

    def test_rating_out_of_domain(self):
        with pytest.raises(DomainError, match="out of range"):
            nfa.nfb_forward(2.5, FMP3)


class TestNfbForwardAll:
    def test_single_factor(self):
        schema = make_single_factor_schema()
        bank = MultiplierBank.initial_for(schema)
        multipliers, trace = nfa.nfb_forward_all({"cplx": 0.5}, bank, schema)
        assert multipliers == {"cplx": pytest.approx(0.875, abs=1e-12)}
        assert isinstance(trace["cplx"], FactorTrace)

    def test_nominal_defaults_are_identity(self, default_doc):
        schema = default_doc.schema
        multipliers, _ = nfa.nfb_forward_all(
            nfa.nominal_ratings(schema), default_doc.params, schema
        )
        assert all(v == 1.0 for v in multipliers.values())

    def test_schema_order_preserved(self, default_doc):
        schema = default_doc.schema
        multipliers, trace = nfa.nfb_forward_all(
            nfa.nominal_ratings(schema), default_doc.params, schema
        )
        assert list(multipliers) == list(schema.factor_ids)
        assert list(trace) == list(schema.factor_ids)

    def test_unknown_factor_rejected(self):
        schema = make_single_factor_schema()
        bank = MultiplierBank.initial_for(schema)
        with pytest.raises(SchemaError, match="unknown factors"):
            nfa.nfb_forward_all({"cplx": 1.0, "bogus": 1.0}, bank, schema)

    def test_missing_factor_rejected(self):
        schema = make_single_factor_schema()
        bank = MultiplierBank.initial_for(schema)
        with pytest.raises(SchemaError, match="missing factors"):
            nfa.nfb_forward_all({}, bank, schema)


class TestMultiplierBank:
    def test_row_count_mismatch(self):
        schema = make_single_factor_schema()
        with pytest.raises(SchemaError, match="1 schema factors"):
            MultiplierBank(((1.0, 1.0, 1.0), (1.0,))).validate_for(schema)

    def test_row_length_mismatch(self):
        schema = make_single_factor_schema()
        with pytest.raises(SchemaError, match="2 multiplier values for 3 levels"):
            MultiplierBank(((1.0, 1.2),)).validate_for(schema)

    def test_non_positive_value(self):
        schema = make_single_factor_schema()
        with pytest.raises(SchemaError, match="must be positive"):
            MultiplierBank(((0.0, 1.0, 1.4),)).validate_for(schema)

    def test_direction_violation(self):
        schema = make_single_factor_schema()
        with pytest.raises(SchemaError, match="non-decreasing"):
            MultiplierBank(((1.0, 0.9, 1.4),)).validate_for(schema)

    def test_initial_bank_is_valid(self, default_doc):
        default_doc.params.validate_for(default_doc.schema)

    def test_as_mapping_round_trip(self, default_doc):
        mapping = default_doc.params.as_mapping(default_doc.schema)
        assert MultiplierBank(tuple(mapping.values())) == default_doc.params
