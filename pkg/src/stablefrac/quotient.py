"""Explicit bases of C{x,y}/(P, P̄) and of the integrable numerators in it.

With a proper t, write A + tB = prod_k (y - a_k) over the real branches and
set F_k = prod_{j > k} (y - a_j), so F_M = 1.  The classes of x^i F_k with
0 <= i < m_k, where m_k is the k-th column sum of the contact matrix, form a
basis of the quotient.  Every Q therefore has unique coordinates c_k(x) of
degree below m_k, and Q/P is in L^p exactly when, after a p-dependent
relabelling of the branches, each c_k vanishes to a prescribed order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from .algebra import (BiPoly, XSeries, YPolyOverXSeries, format_rational, high_precision,
                      is_zero, real_imag_parts)
from .branches import (AboveTruncation, BranchSeries, ProperTCertificate, _coeff_json,
                       certificate_for, compose, series_order)
from .errors import Inconclusive
from .integrability import INF, Exponent, format_exponent, parse_exponent
from .localmodel import LocalModel, build_P_from_model, contact_matrix


def L_of_p(two_L: int, p: Exponent) -> int:
    """floor((2L+1)(1 - 1/p)); p = inf gives 2L."""
    if p == INF:
        return two_L
    return math.floor((two_L + 1) * (1 - 1 / Fraction(p)))


def _effective_p(m: LocalModel, p: Exponent) -> Fraction:
    return Fraction(m.K + 1) if p == INF else Fraction(p)


@dataclass(frozen=True)
class QuotientBasis:
    """Basis {x^i F_k : 0 <= i < m_k} for a fixed branch ordering."""

    t: Fraction
    order: tuple[int, ...]          # datum index at each basis position
    series: tuple[BranchSeries, ...]
    F: tuple[YPolyOverXSeries, ...]
    m: tuple[int, ...]
    N: int
    B: BiPoly = field(repr=False, compare=False, default=None)  # type: ignore[assignment]

    @property
    def dimension(self) -> int:
        return sum(self.m)

    @property
    def mode(self) -> str:
        return "numeric" if any(s.mode == "numeric" for s in self.series) else "exact"

    def element(self, k: int, i: int) -> YPolyOverXSeries:
        """x^i F_k (0-based k)."""
        return YPolyOverXSeries([c.shift(i).truncate(self.N) for c in self.F[k].y_coeffs])

    def to_json(self, terms: int = 12) -> dict[str, Any]:
        return {
            "t": format_rational(self.t),
            "order": list(self.order),
            "m": list(self.m),
            "F": [[[_coeff_json(c) for c in s.coeffs[:terms]] for s in F.y_coeffs]
                  for F in self.F],
            "truncation": terms,
        }


@dataclass(frozen=True)
class CoordinateVector:
    """Coordinates c_k of Q in a quotient basis, as polynomial coefficient lists."""

    c: tuple[tuple[Any, ...], ...]
    residual_prec: int = field(default=0, compare=False)

    def order(self, k: int) -> int | Any:
        """Vanishing order of c_k, AboveTruncation when c_k = 0."""
        return series_order(XSeries(self.c[k]))

    def to_json(self) -> list[list[str]]:
        return [[_coeff_json(v) for v in ck] for ck in self.c]


@dataclass(frozen=True)
class IntegrabilityBasis:
    """Elements {x^i F_k : l_k <= i < m_k} spanning I^p modulo (P, P̄)."""

    p: Exponent
    permutation: tuple[int, ...]
    lower: tuple[int, ...]
    upper: tuple[int, ...]
    quotient: QuotientBasis = field(repr=False, compare=False, default=None)  # type: ignore[assignment]

    @property
    def elements(self) -> list[tuple[int, int]]:
        """(k, i) pairs, meaning x^i F_k with 0-based k."""
        return [(k, i) for k, (lo, hi) in enumerate(zip(self.lower, self.upper))
                for i in range(lo, hi)]

    def __len__(self) -> int:
        return sum(max(hi - lo, 0) for lo, hi in zip(self.lower, self.upper))

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "p": format_exponent(self.p),
            "permutation": list(self.permutation),
            "bounds": [{"lower": lo, "upper": hi} for lo, hi in zip(self.lower, self.upper)],
            "dimension": len(self),
        }
        if self.quotient is not None:
            out["basis"] = self.quotient.to_json()
        return out


def _ordered_series(cert: ProperTCertificate, order: Sequence[int]) -> list[BranchSeries]:
    by_datum = {s.datum_index: s for s in cert.series}
    return [by_datum[j] for j in order]


def quotient_basis(m: LocalModel, t: Any = None, N: int | None = None,
                   order: Sequence[int] | None = None, seed: int = 0) -> QuotientBasis:
    """The basis x^i F_k of the quotient for a proper t (searched when omitted)."""
    cert = certificate_for(m, t, N, seed)
    N = cert.N
    order = tuple(range(m.M)) if order is None else tuple(order)
    if sorted(order) != list(range(m.M)):
        raise ValueError("order must be a permutation of the branch indices")
    series = _ordered_series(cert, order)
    O = contact_matrix(m)
    mk = tuple(O.column_sum(j) for j in order)
    _, B = real_imag_parts(build_P_from_model(m))
    with high_precision():
        F = []
        for k in range(m.M):
            F.append(YPolyOverXSeries.from_roots([s.a for s in series[k + 1:]], N))
        for s, want in zip(series, mk):
            got = series_order(compose(B, s))
            if got is not AboveTruncation and got != want:
                raise AssertionError(f"Ord B along a branch is {got}, expected {want}")
    return QuotientBasis(cert.t, order, tuple(series), tuple(F), mk, N, B)


def _ypoly(Q: BiPoly, basis: QuotientBasis) -> YPolyOverXSeries:
    Qy = YPolyOverXSeries.from_bipoly(Q, basis.N)
    return Qy.to_numeric() if basis.mode == "numeric" else Qy


def reduce_mod_ideal(Q: BiPoly, basis: QuotientBasis) -> CoordinateVector:
    """Coordinates c_k with Q - sum c_k F_k in (P, P̄).

    One branch is peeled off at a time: Q = c + (y - a)Q1 + (higher part of
    Q(x, a)), and the higher part is a multiple of B(x, a) = x^m * unit,
    which is traded for a multiple of B plus a correction to Q1.  The
    cofactors of A + tB and of B are accumulated and the identity is checked
    at the end.
    """
    N = basis.N
    M = len(basis.series)
    numeric = basis.mode == "numeric"
    with high_precision():
        Bs = YPolyOverXSeries.from_bipoly(basis.B, N)
        if numeric:
            Bs = Bs.to_numeric()
        g = _ypoly(Q, basis)
        h_total = YPolyOverXSeries([XSeries.zero(N)])
        coords: list[tuple[Any, ...]] = [()] * M
        for k in range(M - 1, -1, -1):
            a = basis.series[k].a
            mk = basis.m[k]
            g1, v = g.divide_linear(a)
            if v.prec < mk:
                raise Inconclusive("truncation exhausted during reduction")
            coords[k] = tuple(v.coeffs[:mk])
            high = XSeries(v.coeffs[mk:], v.prec - mk)
            hk, Ba = Bs.divide_linear(a)
            u_inv = Ba.unshift(mk).inverse()
            w = high * u_inv
            g = g1 - hk * w
            h_total = h_total + basis.F[k] * w
        residual = _ypoly(Q, basis) - g * _pencil_ypoly(basis) - Bs * h_total
        for k in range(M):
            residual = residual - basis.F[k] * XSeries(coords[k], N)
        prec = residual.prec
        if prec < max(basis.m):
            raise Inconclusive("reduction transcript is too short to certify")
        if not residual.is_zero_to_prec():
            raise AssertionError("reduction transcript does not reproduce Q")
    return CoordinateVector(tuple(coords), prec)


def _pencil_ypoly(basis: QuotientBasis) -> YPolyOverXSeries:
    return YPolyOverXSeries.from_roots([s.a for s in basis.series], basis.N)


def relabel_for_p(m: LocalModel, p: Any) -> tuple[int, ...]:
    """Branch order satisfying the nested maximality conditions for exponent p.

    Position M receives the branch maximising L_k(p) + sum_{j != k} O_kj; the
    remaining positions are filled the same way inside the shrinking prefix.
    Ties go to the larger original index.
    """
    p_eff = _effective_p(m, parse_exponent(p))
    O = contact_matrix(m)
    remaining = list(range(m.M))
    placed: list[int] = []
    while remaining:
        def score(k: int) -> tuple[int, int]:
            s = L_of_p(m[k].two_L, p_eff) + sum(O[k, j] for j in remaining if j != k)
            return s, k
        best = max(remaining, key=score)
        remaining.remove(best)
        placed.append(best)
    return tuple(reversed(placed))


def lower_bounds(m: LocalModel, p: Any, order: Sequence[int]) -> tuple[int, ...]:
    """l_k = L_k(p) + sum_{j<k} O_jk in the given order."""
    p_eff = _effective_p(m, parse_exponent(p))
    O = contact_matrix(m)
    out = []
    for pos, k in enumerate(order):
        out.append(L_of_p(m[k].two_L, p_eff) + sum(O[j, k] for j in order[:pos]))
    return tuple(out)


def integrability_basis(m: LocalModel, p: Any, t: Any = None, N: int | None = None,
                        seed: int = 0, with_series: bool = True) -> IntegrabilityBasis:
    """Basis of I^p modulo (P, P̄) with the p-dependent relabelling."""
    p = parse_exponent(p)
    order = relabel_for_p(m, p)
    lower = lower_bounds(m, p, order)
    O = contact_matrix(m)
    upper = tuple(O.column_sum(k) for k in order)
    if any(lo > hi for lo, hi in zip(lower, upper)):
        raise AssertionError("a lower bound exceeds its degree bound")
    qb = quotient_basis(m, t, N, order, seed) if with_series else None
    return IntegrabilityBasis(p, order, lower, upper, qb)


def membership_via_coordinates(Q: BiPoly, m: LocalModel, p: Any, t: Any = None,
                               N: int | None = None, seed: int = 0) -> bool:
    """Decide Q/P in L^p from the vanishing orders of the coordinates c_k."""
    ib = integrability_basis(m, p, t, N, seed)
    coords = reduce_mod_ideal(Q, ib.quotient)
    with high_precision():
        for k, lo in enumerate(ib.lower):
            if lo <= 0:
                continue
            if not all(is_zero(v) for v in coords.c[k][:lo]):
                return False
    return True


def ccond_holds(coords: CoordinateVector, basis: QuotientBasis, m: LocalModel, p: Any) -> bool:
    """Branch-wise condition: for each j, sum_{k>=j} c_k / prod_{i != j, i <= k}(a_j - a_i)
    vanishes to order at least L_j(p).

    The sum is a Laurent series, so it is multiplied through by
    D_j = prod_{i != j}(a_j - a_i) and the order of D_j is added to the target.
    """
    p_eff = _effective_p(m, parse_exponent(p))
    N = basis.N
    M = len(basis.series)
    a = [s.a for s in basis.series]
    with high_precision():
        for j in range(M):
            d_j = 0
            for i in range(M):
                if i != j:
                    o = series_order(a[j] - a[i])
                    if o is AboveTruncation:
                        raise Inconclusive("two branch series agree to the truncation order")
                    d_j += o
            total = XSeries.zero(N)
            for k in range(j, M):
                term = XSeries(coords.c[k], N)
                for i in range(k + 1, M):
                    if i != j:
                        term = term * (a[j] - a[i])
                total = total + term
            need = L_of_p(m[basis.order[j]].two_L, p_eff) + d_j
            if need > total.prec:
                raise Inconclusive("truncation too small for the branch condition")
            if not total.vanishes_to(need):
                return False
    return True


__all__ = [
    "CoordinateVector", "IntegrabilityBasis", "QuotientBasis", "L_of_p", "ccond_holds",
    "integrability_basis", "lower_bounds", "membership_via_coordinates", "quotient_basis",
    "reduce_mod_ideal", "relabel_for_p",
]
