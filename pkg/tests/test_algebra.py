from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stablefrac.algebra import (BiPoly, GaussianRational, XSeries, bipoly_from_ypoly,
                                divmod_y, order_of_vanishing, real_imag_parts, reflect,
                                weierstrass_divide, weierstrass_reduce)
from stablefrac.errors import Inconclusive, NotMonicAtOrigin
from stablefrac.localmodel import build_P_from_model
from stablefrac.parser import parse_expression as pe

from conftest import EASY2

I = GaussianRational(0, 1)

small = st.fractions(min_value=-5, max_value=5, max_denominator=6)
gauss = st.builds(GaussianRational, small, small)


@st.composite
def bipolys(draw, max_deg: int = 3):
    terms = draw(st.dictionaries(
        st.tuples(st.integers(0, max_deg), st.integers(0, max_deg)), gauss, max_size=6))
    return BiPoly(terms)


class TestGaussianRational:
    def test_arithmetic(self):
        z = GaussianRational(1, 2)
        assert z * z.conjugate() == 5
        assert (z + 1) / z == GaussianRational(Fraction(6, 5), Fraction(-2, 5))
        assert I ** 2 == -1

    @given(gauss, gauss, gauss)
    def test_field_laws(self, a, b, c):
        assert (a + b) * c == a * c + b * c
        if b != 0:
            assert (a / b) * b == a

    def test_structural_equality_with_rationals(self):
        assert GaussianRational(Fraction(2, 4)) == Fraction(1, 2)
        assert hash(GaussianRational(3)) == hash(GaussianRational(Fraction(6, 2)))


class TestReflect:
    def test_single_imaginary_term(self):
        assert reflect(pe("y+x+i*x^2")) == pe("y+x-i*x^2")

    def test_real_polynomial_is_fixed(self):
        P = pe("y^2 - 3*x*y + 1/2")
        assert reflect(P) == P

    def test_product(self):
        P = pe("(x+y-i*x*y)*(2*x+y-i*x*y)")
        assert reflect(P) == pe("(x+y+i*x*y)*(2*x+y+i*x*y)")

    @given(bipolys())
    def test_involution(self, P):
        assert reflect(reflect(P)) == P


class TestRealImagParts:
    def test_transverse_pair(self):
        A, B = real_imag_parts(build_P_from_model(EASY2))
        assert A == pe("y^2 + 3*x*y + 2*x^2 - x^4")
        assert B == pe("x^2*(2*y + 3*x)")

    def test_flat_pair(self):
        A, B = real_imag_parts(pe("(y+i*x^2)*(y+i*x^4)"))
        assert A == pe("(y-x^3)*(y+x^3)")
        assert B == pe("x^2*(1+x^2)*y")

    def test_real_input(self):
        P = pe("x^3 - y")
        assert real_imag_parts(P) == (P, BiPoly())

    @given(bipolys())
    def test_reconstruction(self, P):
        A, B = real_imag_parts(P)
        assert A + B.scale(I) == P
        for part in (A, B):
            assert all(c.im == 0 for _, c in part.items())


class TestXSeries:
    def test_order(self):
        assert order_of_vanishing(XSeries([0, 0, 1, 0, 0, 1], 8)) == 2

    def test_zero_series_is_inconclusive(self):
        with pytest.raises(Inconclusive):
            order_of_vanishing(XSeries.zero(10))

    def test_no_silent_extension(self):
        with pytest.raises(Inconclusive):
            XSeries([1, 2], 2)[5]

    def test_inverse(self):
        s = XSeries([1, 1], 6)          # 1 + x
        inv = s.inverse()
        assert inv.coeffs == (1, -1, 1, -1, 1, -1)
        assert (s * inv).coeffs == (1, 0, 0, 0, 0, 0)

    @settings(max_examples=50)
    @given(st.lists(small, min_size=1, max_size=6), st.lists(small, min_size=1, max_size=6),
           st.integers(0, 3), st.integers(0, 3))
    def test_order_is_additive(self, f, g, sf, sg):
        f[0] = f[0] or Fraction(1)
        g[0] = g[0] or Fraction(1)
        a = XSeries([0] * sf + f, 12)
        b = XSeries([0] * sg + g, 12)
        assert order_of_vanishing(a * b) == sf + sg


class TestWeierstrass:
    P = build_P_from_model(EASY2)

    def test_multiple_of_P(self):
        assert weierstrass_reduce(self.P, self.P, 10).is_zero_to_prec()

    def test_shifted_multiple(self):
        Q0 = weierstrass_reduce(pe("y") * self.P + 1, self.P, 10)
        assert bipoly_from_ypoly(Q0) == BiPoly.const(1)

    def test_y_squared(self):
        cof, rem = weierstrass_divide(pe("y^2"), self.P, 12)
        assert bipoly_from_ypoly(rem) == pe("-(3*x + 2*i*x^2)*y - (2*x^2 + 3*i*x^3 - x^4)")
        assert (pe("y^2") - bipoly_from_ypoly(cof) * self.P) == bipoly_from_ypoly(rem)

    def test_not_monic(self):
        with pytest.raises(NotMonicAtOrigin):
            weierstrass_reduce(pe("y"), pe("x*y^2 + y + x"), 5)

    @settings(max_examples=40)
    @given(bipolys(max_deg=4))
    def test_residual_identity(self, Q):
        cof, rem = divmod_y(Q, self.P)
        assert cof * self.P + rem == Q
        assert rem.deg_y < 2
