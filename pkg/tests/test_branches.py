from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stablefrac.algebra import XSeries, high_precision, is_zero
from stablefrac.branches import (AboveTruncation, NotProper, ProperTCertificate, branch_series,
                                 certificate_for, compose, distinct_values, find_proper_t,
                                 is_proper, membership_via_branches, pencil, series_order,
                                 verify_bvanish)
from stablefrac.errors import ImproperParameter, Inconclusive
from stablefrac.integrability import is_in_Lp
from stablefrac.localmodel import LocalModel, build_P_from_model, contact_matrix
from stablefrac.parser import parse_expression as pe

from conftest import EASY2, EX11, EXEX, FLAT, PEX
from test_algebra import bipolys
from test_localmodel import models


def _coeffs(s, n):
    return [Fraction(c) for c in s.a.coeffs[:n]]


def test_above_truncation_compares_high():
    assert AboveTruncation >= 10 ** 9
    assert series_order(XSeries.zero(5)) is AboveTruncation
    assert series_order(XSeries([0, 0, 3], 5)) == 2


class TestBranchSeries:
    def test_shared_tangent_at_one(self):
        by_datum = {s.datum_index: s for s in branch_series(EXEX, 1)}
        # y + x + t x^2 + (t + 1/t) x^4 and y + x - x^4 / t, at t = 1
        assert _coeffs(by_datum[0], 5) == [0, -1, -1, 0, -2]
        assert _coeffs(by_datum[1], 5) == [0, -1, 0, 0, 1]

    def test_transverse_pair_at_zero(self):
        by_datum = {s.datum_index: s for s in branch_series(EASY2, 0)}
        # roots of y^2 + 3xy + 2x^2 - x^4 are (-3x +- x sqrt(1 + 4x^2)) / 2
        assert _coeffs(by_datum[0], 6) == [0, -1, 0, 1, 0, -1]
        assert _coeffs(by_datum[1], 6) == [0, -2, 0, -1, 0, 1]

    @pytest.mark.parametrize("t", [0, 1, Fraction(-7, 3)])
    def test_single_flat_branch(self, t):
        (s,) = branch_series(LocalModel.of((1, [])), t)
        assert all(c == (-t if k == 2 else 0) for k, c in enumerate(s.a.coeffs))

    def test_irrational_branches_use_high_precision(self):
        m = LocalModel.of((1, []), (1, []))
        series = branch_series(m, 1)
        assert {s.mode for s in series} == {"numeric"}
        leads = sorted(float(s.a[2]) for s in series)
        assert leads == pytest.approx([-1 - 2 ** 0.5, -1 + 2 ** 0.5])

    @settings(max_examples=15, deadline=None)
    @given(models(max_M=3, max_L=2), st.integers(-3, 3))
    def test_residual(self, m, t):
        F = pencil(m, Fraction(t))
        try:
            series = branch_series(m, t)
        except Inconclusive:
            return
        with high_precision():
            for s in series:
                assert compose(F, s).is_zero_to_prec()


class TestProperness:
    def test_shared_tangent_rejects_zero(self):
        res = is_proper(EXEX, 0)
        assert isinstance(res, NotProper) and not res
        assert res.to_json()["proper"] is False

    def test_shared_tangent_accepts_one(self):
        cert = is_proper(EXEX, 1)
        assert isinstance(cert, ProperTCertificate)
        assert [list(r) for r in cert.pairwise_contacts] == contact_matrix(EXEX).to_list()

    def test_transverse_pair_every_small_t(self):
        for t in [0, 1, -1, Fraction(1, 2), 5]:
            assert is_proper(EASY2, t)

    def test_search(self):
        assert find_proper_t(EASY2)[0] == 1
        assert find_proper_t(EXEX)[0] == 1
        assert find_proper_t(LocalModel.of((1, [])))[0] == 1

    def test_certificate_for_rejects_exceptional_t(self):
        with pytest.raises(ImproperParameter):
            certificate_for(EXEX, 0)

    def test_matched_form(self):
        cert = certificate_for(PEX)
        for s in cert.series:
            b = PEX[s.datum_index]
            tail = s.a + XSeries(b.q_coeffs(), s.a.prec)
            with high_precision():
                assert tail.vanishes_to(b.two_L)

    def test_certificate_json(self):
        out = certificate_for(EASY2, 0).to_json()
        assert out["t"] == "0" and out["contacts"] == [[2, 1], [1, 2]]


class TestBvanish:
    def test_flat_pair(self):
        rep = verify_bvanish(FLAT)
        assert sorted(r.B_order for r in rep.rows) == [4, 6]

    def test_transverse_pair(self):
        rep = verify_bvanish(EASY2, 0)
        assert [(r.B_order, r.Ay_order) for r in rep.rows] == [(3, 1), (3, 1)]

    def test_single(self):
        rep = verify_bvanish(EX11)
        assert [(r.B_order, r.Ay_order) for r in rep.rows] == [(2, 0)]

    def test_mixed_depths(self):
        rep = verify_bvanish(PEX)
        assert rep.ok
        assert sorted((r.datum, r.B_order, r.Ay_order) for r in rep.rows) == [
            (0, 5, 3), (1, 10, 2), (2, 7, 3)]


class TestDistinctValues:
    def test_repeated_data(self):
        m = LocalModel.of((1, [1]), (1, [1]), (2, []))
        c1 = certificate_for(m, 1)
        c2 = certificate_for(m, 2)
        for first, second in distinct_values(m, c1, c2).values():
            with high_precision():
                for u in first:
                    assert all(not is_zero(u - v) for v in second)


class TestMembershipViaBranches:
    def test_transverse_pair_constructed_member(self):
        # c_1 = x, c_2 = x^2 in the basis {x^i (y - a_2), x^i}
        cert = certificate_for(EASY2, 0)
        a2 = next(s for s in cert.series if s.datum_index == 1).a
        # y - a_2 agrees with y + 2x + x^3 - x^5 modulo x^6, which is enough here
        Q = pe("x*(y + 2*x + x^3 - x^5) + x^2")
        assert Fraction(a2[3]) == -1
        assert membership_via_branches(Q, EASY2, 2, t=0)
        assert is_in_Lp(Q, EASY2, 2).verdict

    def test_constant_fails(self):
        assert not membership_via_branches(pe("1"), EX11, 2)

    def test_multiple_of_P(self):
        assert membership_via_branches(build_P_from_model(PEX), PEX, 5)

    def test_frozen_oracle(self, frozen):
        for row in frozen["memberships"][:40]:
            m = LocalModel.of(*row["model"])
            try:
                got = membership_via_branches(pe(row["Q"]), m, row["p"])
            except Inconclusive:
                continue
            assert got is row["member"], row
