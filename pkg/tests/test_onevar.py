from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stablefrac.errors import NotStable1D
from stablefrac.onevar import (interlacing_check, kernel_eval, lp_integral, parseval_check,
                               quadrature, quadrature_sum, random_stable, representation_check,
                               sampling_bounds_check)
from stablefrac.parser import parse_expression as pe

LINEAR = [1j, 1]                                   # y + i
SQUARE = [-1, 2j, 1]                               # (y + i)^2
CUBIC = np.polynomial.polynomial.polyfromroots([-1 - 1j, 0.5 - 2j, 2 - 0.5j])
CORPUS = [LINEAR, SQUARE, CUBIC, [2j - 1, 1 + 3j, 1]]


class TestQuadrature:
    def test_linear(self):
        qd = quadrature(LINEAR)
        assert qd.nodes == pytest.approx((0.0,))
        assert qd.weights == pytest.approx((1.0,))

    @pytest.mark.parametrize("t", [-2.0, 0.5, 3.0])
    def test_linear_moves_with_t(self, t):
        qd = quadrature(LINEAR, t)
        assert qd.nodes == pytest.approx((-t,)) and qd.weights == pytest.approx((1.0,))

    def test_square(self):
        qd = quadrature(SQUARE)
        assert qd.nodes == pytest.approx((-1.0, 1.0))
        assert qd.weights == pytest.approx((0.25, 0.25))
        assert quadrature_sum([1], qd) == pytest.approx(0.5)

    def test_accepts_bipoly_in_y(self):
        assert quadrature(pe("(y+i)^2")).nodes == pytest.approx((-1.0, 1.0))

    def test_rejects_unstable(self):
        with pytest.raises(NotStable1D):
            quadrature([-1j, 1])

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 10 ** 6), st.floats(-3, 3))
    def test_weights_positive(self, degree, seed, t):
        qd = quadrature(random_stable(np.random.default_rng(seed), degree), t)
        assert all(w > 0 for w in qd.weights)
        assert list(qd.nodes) == sorted(qd.nodes)


class TestParseval:
    def test_closed_forms(self):
        assert parseval_check([1], LINEAR).integral == pytest.approx(1.0, rel=1e-10)
        res = parseval_check([1], SQUARE)
        assert res.ok and res.relative_error <= 1e-8
        assert res.weighted_sum == pytest.approx(0.5, rel=1e-12)

    def test_random_cubic_against_direct_integral(self):
        from scipy.integrate import quad
        Q = [0.3, -1.0, 2.0]
        res = parseval_check(Q, CUBIC, t=0.7)
        f = lambda y: (abs(np.polyval(Q[::-1], y)) / abs(np.polyval(CUBIC[::-1], y))) ** 2 / np.pi
        direct = quad(f, -np.inf, np.inf, limit=400, epsabs=0, epsrel=1e-12)[0]
        assert res.ok and res.weighted_sum == pytest.approx(direct, rel=1e-8)

    def test_degree_constraint(self):
        with pytest.raises(ValueError):
            parseval_check([0, 0, 1], SQUARE)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(2, 5), st.integers(0, 10 ** 6), st.floats(-2, 2))
    def test_random(self, degree, seed, t):
        rng = np.random.default_rng(seed)
        p = random_stable(rng, degree)
        Q = rng.normal(size=degree) + 1j * rng.normal(size=degree)
        assert parseval_check(Q, p, t).ok


class TestRepresentation:
    def test_examples(self):
        assert representation_check([1], SQUARE) < 1e-12
        assert representation_check([0, 1], CUBIC, t=1.5) < 1e-9
        assert representation_check([0], CUBIC) == 0


class TestInterlacing:
    def test_examples(self):
        assert interlacing_check(SQUARE)
        assert interlacing_check(LINEAR)

    def test_fifty_random(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            assert interlacing_check(random_stable(rng, int(rng.integers(1, 7))),
                                     float(rng.normal()))


class TestKernel:
    def test_linear_is_constant(self):
        for y, eta in [(0.3, 2 + 1j), (1j, 1j), (-2.0, -2.0), (1 + 1j, 3.0)]:
            assert kernel_eval(LINEAR, y, eta) == pytest.approx(1.0)

    def test_diagonal_positive(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            p = random_stable(rng, 4)
            for y in [complex(rng.normal(), abs(rng.normal())), complex(rng.normal(), 0)]:
                k = kernel_eval(p, y, y)
                assert abs(k.imag) < 1e-9 * max(1, abs(k)) and k.real > 0

    def test_reproduces_polynomials(self):
        # <Q, K(., eta)> = Q(eta) in L^2(dy / (pi |p|^2))
        from scipy.integrate import quad
        p, Q, eta = SQUARE, [0.5, 2.0], 0.3 + 0.8j
        def integrand(y, part):
            v = (np.polyval(Q[::-1], y) * np.conj(kernel_eval(p, y, eta))
                 / abs(np.polyval(np.array(p)[::-1], y)) ** 2 / np.pi)
            return v.real if part == 0 else v.imag
        val = complex(quad(integrand, -np.inf, np.inf, args=(0,))[0],
                      quad(integrand, -np.inf, np.inf, args=(1,))[0])
        assert val == pytest.approx(np.polyval(Q[::-1], eta), rel=1e-7)


class TestSampling:
    @pytest.mark.parametrize("r", [4 / 3, 2.0, 4.0])
    @pytest.mark.parametrize("p", CORPUS[1:])
    def test_inequalities(self, r, p):
        rep = sampling_bounds_check([1], p, r)
        assert rep.ok, rep.to_json()

    def test_l1(self):
        rep = sampling_bounds_check([1], CUBIC, 1.0, delta=1.0)
        assert rep.ok and rep.lower_lhs is not None

    def test_parseval_case(self):
        rep = sampling_bounds_check([1], SQUARE, 2.0)
        assert rep.upper_lhs == pytest.approx(0.5 ** 0.5)

    def test_integral_helper(self):
        assert lp_integral([1], LINEAR, 2.0) == pytest.approx(1.0)
