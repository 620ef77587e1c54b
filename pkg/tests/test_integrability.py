from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stablefrac.errors import ZeroNumerator
from stablefrac.integrability import (INF, derivative_lp_range, derivative_order_bound,
                                      dim_Ip_quotient, format_exponent, is_in_Linfty, is_in_Lp,
                                      lp_threshold, order_on_datum, parse_exponent,
                                      product_ideal_membership)
from stablefrac.localmodel import (LocalModel, build_P_from_model, contact_matrix,
                                   intersection_multiplicity)
from stablefrac.parser import parse_expression as pe

from conftest import EASY2, EX11, PEX
from test_algebra import bipolys
from test_localmodel import models

EXPONENTS = [Fraction(1), Fraction(5, 4), Fraction(3, 2), Fraction(2), Fraction(3), Fraction(5)]
TANGENT = pe("(y+x+x^2+i*x^4)*(y+x+i*x^4)")


def test_exponent_parsing():
    assert parse_exponent("inf") == INF
    assert parse_exponent("29/10") == Fraction(29, 10)
    with pytest.raises(TypeError):
        parse_exponent(2.5)
    assert format_exponent(INF) == "inf"
    assert format_exponent(Fraction(3, 2)) == "3/2"


class TestOrderOnDatum:
    @pytest.mark.parametrize("n, expected", [(3, 5), (4, 6), (2, 4), (1, 2)])
    def test_tangent_pair(self, n, expected):
        assert order_on_datum(n, [1], TANGENT) == expected

    def test_small_cases(self):
        assert order_on_datum(2, [1], pe("1")) == 0
        assert order_on_datum(2, [1], pe("y+x")) == 2

    def test_zero_numerator(self):
        with pytest.raises(ZeroNumerator):
            order_on_datum(2, [1], pe("0"))

    def test_frozen_oracle(self, frozen):
        for row in frozen["orders"]:
            got = order_on_datum(row["n"], row["q"], pe(row["Q"]))
            assert (format_exponent(got) if got == INF else got) == row["order"], row


class TestMembership:
    @pytest.mark.parametrize("Q, p, expected", [
        ("1", 1, True), ("1", "7/5", True), ("1", "3/2", False), ("1", 2, False),
        ("x", "3/2", True), ("x", 2, True), ("x", "29/10", True), ("x", 3, False),
        ("x", 10, False), ("x^2", 7, True),
    ])
    def test_single_branch(self, Q, p, expected):
        assert is_in_Lp(pe(Q), EX11, p).verdict is expected

    def test_report_fields(self):
        rep = is_in_Lp(pe("x"), EX11, 3)
        assert rep.to_json() == {"p": "3", "verdict": False, "p_star": "3", "p_star_open": True,
                                 "branches": [{"j": 0, "actual": 1, "required": 2, "ok": False}]}

    def test_multiples_of_P_pass(self):
        P = build_P_from_model(PEX)
        rep = is_in_Lp(pe("x*y + 3") * P, PEX, "inf")
        assert rep.verdict and all(b.actual_order == INF for b in rep.branches)

    def test_rejects_small_exponents(self):
        with pytest.raises(ValueError):
            is_in_Lp(pe("1"), EX11, "1/2")

    def test_frozen_oracle(self, frozen):
        for row in frozen["memberships"]:
            m = LocalModel.of(*row["model"])
            assert is_in_Lp(pe(row["Q"]), m, row["p"]).verdict is row["member"], row


class TestThreshold:
    def test_examples(self):
        assert lp_threshold(pe("1"), EX11).p_star == Fraction(3, 2)
        assert lp_threshold(pe("x"), EX11).p_star == 3
        rng = lp_threshold(pe("x^2"), EX11)
        assert rng.p_star == INF and rng.includes_infinity
        assert is_in_Linfty(pe("x^2"), EX11)

    def test_boundary_is_excluded(self):
        for Q in ["1", "x", "x*y + x^3"]:
            ps = lp_threshold(pe(Q), EASY2).p_star
            if ps != INF:
                assert not is_in_Lp(pe(Q), EASY2, ps).verdict

    @settings(max_examples=60, deadline=None)
    @given(models(max_M=3, max_L=3), bipolys(max_deg=3),
           st.fractions(min_value=1, max_value=12, max_denominator=7))
    def test_interval_law(self, m, Q, p):
        if Q.is_zero():
            return
        rng = lp_threshold(Q, m)
        assert is_in_Lp(Q, m, p).verdict == (p < rng.p_star)
        assert is_in_Linfty(Q, m) == rng.includes_infinity

    @settings(max_examples=40, deadline=None)
    @given(models(max_M=3, max_L=3), bipolys(max_deg=3))
    def test_monotone_in_p(self, m, Q):
        if Q.is_zero():
            return
        verdicts = [is_in_Lp(Q, m, p).verdict for p in EXPONENTS]
        assert verdicts == sorted(verdicts, reverse=True)


class TestIdealProperty:
    @settings(max_examples=40, deadline=None)
    @given(models(max_M=2, max_L=2), bipolys(max_deg=3), bipolys(max_deg=3),
           st.sampled_from(EXPONENTS))
    def test_closed_under_sums_and_multiples(self, m, Q1, Q2, p):
        ok1 = not Q1.is_zero() and is_in_Lp(Q1, m, p).verdict
        ok2 = not Q2.is_zero() and is_in_Lp(Q2, m, p).verdict
        if ok1:
            assert is_in_Lp(Q1 * pe("x"), m, p).verdict
            assert is_in_Lp(Q1 * pe("y"), m, p).verdict
            if ok2 and not (Q1 + Q2).is_zero():
                assert is_in_Lp(Q1 + Q2, m, p).verdict


class TestDimensions:
    def test_mixed_depths(self):
        assert dim_Ip_quotient(PEX, 3) == 7
        assert dim_Ip_quotient(PEX, "inf") == 4

    def test_mixed_depths_at_five_quarters(self):
        # The linear-algebra oracle and the formula agree on 16 (see tests/oracles.py).
        assert dim_Ip_quotient(PEX, "5/4") == 16

    def test_transverse_pair(self):
        assert dim_Ip_quotient(EASY2, 2) == 3

    def test_frozen_oracle(self, frozen):
        for row in frozen["models"]:
            m = LocalModel.of(*row["model"])
            for p, value in row["dims"].items():
                assert dim_Ip_quotient(m, p) == value, (row["model"], p)

    @given(models())
    def test_half_multiplicity_at_two(self, m):
        assert 2 * dim_Ip_quotient(m, 2) == intersection_multiplicity(m)

    @given(models())
    def test_specialisations(self, m):
        O = contact_matrix(m)
        assert dim_Ip_quotient(m, 1) == O.upper_sum() + sum(b.two_L for b in m)
        assert dim_Ip_quotient(m, 2) == O.upper_sum() + sum(b.L for b in m)
        assert dim_Ip_quotient(m, m.K + 1) == dim_Ip_quotient(m, "inf")

    @given(models())
    def test_nonincreasing(self, m):
        dims = [dim_Ip_quotient(m, p) for p in [*EXPONENTS, "inf"]]
        assert dims == sorted(dims, reverse=True)


class TestProductIdeal:
    def test_examples(self):
        assert product_ideal_membership(pe("x^2"), LocalModel.of((1, [])))
        assert not product_ideal_membership(pe("x"), EX11)
        assert product_ideal_membership(pe("x^2*x^8*x^4"), PEX)

    def test_explicit_cofactor(self):
        # one generator per datum: (y + q_1) * x^{2 L_2} * (y + q_3)
        Q = pe("(3*x - y + 2)*y*x^8*y")
        assert product_ideal_membership(Q, PEX)
        assert is_in_Linfty(Q, PEX)

    def test_two_generators_are_not_enough(self):
        Q = pe("(3*x - y + 2)*y*x^8")
        assert not product_ideal_membership(Q, PEX)
        rep = is_in_Lp(Q, PEX, "inf")
        assert not rep.verdict
        assert (rep.branches[1].actual_order, rep.branches[1].required_order) == (9, 10)

    def test_mixed_depths_basis_element(self):
        # x^2 (y + x) is x^2 times the first basis polynomial for the p = inf bounds
        assert is_in_Linfty(pe("x^2*(y+x)*y"), PEX)

    @settings(max_examples=30, deadline=None)
    @given(models(max_M=3, max_L=2), bipolys(max_deg=4))
    def test_agrees_with_bounded_test(self, m, Q):
        if Q.is_zero():
            return
        assert product_ideal_membership(Q, m) == is_in_Linfty(Q, m)


class TestDerivatives:
    def test_bound(self):
        assert derivative_order_bound(2, [1], pe("(y+x)^2")) == 2
        assert derivative_order_bound(3, [1], TANGENT) >= 2
        assert derivative_order_bound(4, [], pe("y")) == 0

    def test_zero_derivative(self):
        with pytest.raises(ZeroNumerator):
            derivative_order_bound(2, [1], pe("x^3"))

    def test_range(self):
        assert derivative_lp_range(EX11) == Fraction(3, 2)
        assert derivative_lp_range(PEX) == Fraction(9, 8)
        assert derivative_lp_range(LocalModel.of((1, []))) == Fraction(3, 2)

    @settings(max_examples=40)
    @given(st.integers(1, 6), st.lists(st.integers(-2, 2), max_size=3), bipolys(max_deg=3))
    def test_bound_holds(self, n, q, Q):
        if Q.diff_y().is_zero():
            return
        derivative_order_bound(n, q, Q)
