"""Decision procedures for local L^p membership of Q/P.

Every exponent is an exact :class:`fractions.Fraction` (or :data:`INF`), so
boundary cases such as p = 3/2 are decided without rounding.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Any, Sequence, Union

from .algebra import BiPoly, XSeries, YPolyOverXSeries, divmod_y, format_rational, is_zero
from .errors import ZeroNumerator
from .localmodel import BranchDatum, LocalModel, build_P_from_model, contact_matrix

INF = math.inf
Exponent = Union[Fraction, float]


def parse_exponent(value: Any) -> Exponent:
    """Turn ``"3/2"``, ``2``, ``Fraction(5, 4)`` or ``"inf"`` into an exact exponent."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, float):
        if math.isinf(value):
            return INF
        raise TypeError("floating-point exponents are not accepted; pass a rational")
    if isinstance(value, int):
        return Fraction(value)
    text = str(value).strip().lower()
    if text in ("inf", "infinity", "oo"):
        return INF
    return Fraction(text)


def format_exponent(p: Exponent) -> str:
    return "inf" if p == INF else format_rational(p)


def _q_coeffs(q: Sequence[Any] | BiPoly | BranchDatum) -> list[Fraction]:
    """Dense ascending coefficients (constant term first) of a real polynomial q."""
    if isinstance(q, BranchDatum):
        return q.q_coeffs()
    if isinstance(q, BiPoly):
        if q.deg_y > 0:
            raise ValueError("q must be a polynomial in x alone")
        out = [Fraction(0)] * (q.deg_x + 1)
        for (i, _), c in q.items():
            out[i] = c.re if c.im == 0 else c
        return out
    return [Fraction(0), *(Fraction(c) for c in q)]


def order_on_datum(n: int, q: Sequence[Any] | BiPoly | BranchDatum, Q: BiPoly) -> int:
    """O(n, q, Q): the x-adic order of Q(x, x^n y - q(x)).

    ``q`` is either a BiPoly in x, a BranchDatum, or the list of coefficients
    of x, x^2, ... (no constant term).
    """
    if Q.is_zero():
        raise ZeroNumerator("O(n, q, Q) is undefined for Q = 0")
    sub = BiPoly.monomial(n, 1) - BiPoly.from_x_poly(_q_coeffs(q))
    return Q.substitute_y(sub).x_order()


def required_order(column_sum: int, L: int, p: Exponent) -> int:
    """Sum_i O_ij - ceil((2L+1)/p) + 1."""
    return column_sum - math.ceil(Fraction(2 * L + 1) / p) + 1


@dataclass(frozen=True)
class BranchCheck:
    j: int
    actual_order: float | int
    required_order: int
    satisfied: bool

    def to_json(self) -> dict[str, Any]:
        actual = "inf" if self.actual_order == INF else int(self.actual_order)
        return {"j": self.j, "actual": actual, "required": self.required_order,
                "ok": self.satisfied}


@dataclass(frozen=True)
class MembershipReport:
    p: Exponent
    branches: tuple[BranchCheck, ...]
    verdict: bool
    p_star: Exponent | None = None

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "p": format_exponent(self.p),
            "verdict": self.verdict,
            "branches": [b.to_json() for b in self.branches],
        }
        if self.p_star is not None:
            out["p_star"] = format_exponent(self.p_star)
            out["p_star_open"] = True
        return out

    def __bool__(self) -> bool:
        return self.verdict


@dataclass(frozen=True)
class ExponentRange:
    p_star: Exponent
    includes_infinity: bool
    m: tuple[int, ...] = field(default=())

    def contains(self, p: Exponent) -> bool:
        if p == INF:
            return self.includes_infinity
        return 1 <= p < self.p_star

    def to_json(self) -> dict[str, Any]:
        return {"p_star": format_exponent(self.p_star), "open": True,
                "includes_infinity": self.includes_infinity}


def reduce_numerator(Q: BiPoly, m: LocalModel) -> BiPoly:
    """Remainder of Q after exact division in y by the (monic) model polynomial."""
    return divmod_y(Q, build_P_from_model(m))[1]


def _actual_orders(Q: BiPoly, m: LocalModel) -> list[float | int]:
    Q0 = reduce_numerator(Q, m)
    if Q0.is_zero():
        return [INF] * m.M
    return [order_on_datum(b.two_L, b, Q0) for b in m.branches]


def is_in_Lp(Q: BiPoly, m: LocalModel, p: Any) -> MembershipReport:
    """Decide Q/P in L^p near the origin for the model polynomial P of m."""
    p = parse_exponent(p)
    if p != INF and p < 1:
        raise ValueError("exponents below 1 are not supported")
    p_eff = Fraction(m.K + 1) if p == INF else p
    O = contact_matrix(m)
    actual = _actual_orders(Q, m)
    checks = []
    for j, b in enumerate(m.branches):
        req = required_order(O.column_sum(j), b.L, p_eff)
        checks.append(BranchCheck(j, actual[j], req, actual[j] >= req))
    verdict = all(c.satisfied for c in checks)
    return MembershipReport(p, tuple(checks), verdict, lp_threshold(Q, m).p_star)


def lp_threshold(Q: BiPoly, m: LocalModel) -> ExponentRange:
    """Critical exponent p*: membership holds exactly for 1 <= p < p*."""
    O = contact_matrix(m)
    actual = _actual_orders(Q, m)
    p_star: Exponent = INF
    ms = []
    for j, b in enumerate(m.branches):
        mj = O.column_sum(j) - actual[j] + 1 if actual[j] != INF else -INF
        ms.append(int(mj) if mj != -INF else 0)
        if mj >= 2:
            p_star = min(p_star, Fraction(2 * b.L + 1, int(mj) - 1))
    includes_inf = all(a >= required_order(O.column_sum(j), m[j].L, Fraction(m.K + 1))
                       for j, a in enumerate(actual))
    return ExponentRange(p_star, includes_inf, tuple(ms))


def is_in_Linfty(Q: BiPoly, m: LocalModel) -> bool:
    """Q/P locally bounded, decided through the exponent K + 1."""
    return is_in_Lp(Q, m, Fraction(m.K + 1)).verdict


def dim_Ip_quotient(m: LocalModel, p: Any) -> int:
    """Dimension of I^p modulo the ideal generated by P and its reflection."""
    p = parse_exponent(p)
    O = contact_matrix(m)
    total = O.upper_sum()
    if p == INF:
        return total
    for b in m.branches:
        total += math.ceil(Fraction(2 * b.L + 1) / p) - 1
    return total


def derivative_order_bound(n: int, q: Sequence[Any] | BiPoly | BranchDatum, Q: BiPoly) -> int:
    """O(n, q, dQ/dy), checked against n + O(n, q, dQ/dy) >= O(n, q, Q)."""
    dQ = Q.diff_y()
    if dQ.is_zero():
        raise ZeroNumerator("dQ/dy vanishes identically")
    od = order_on_datum(n, q, dQ)
    oq = order_on_datum(n, q, Q)
    if n + od < oq:
        raise AssertionError(f"derivative bound violated: {n} + {od} < {oq}")
    return od


def derivative_lp_range(m: LocalModel) -> Fraction:
    """1 + 1/K with K the largest 2L_j."""
    return 1 + Fraction(1, m.K)


# ---------------------------------------------------------------------------
# Direct membership in the product ideal prod_j (y + q_j, x^(2 L_j))
# ---------------------------------------------------------------------------

def _repad(s: XSeries, N: int) -> XSeries:
    """Treat a chosen multiplier as a polynomial: unknown tail set to zero."""
    return XSeries(s.coeffs, N)


def _vec_valuation(e: XSeries) -> int | None:
    for k, c in enumerate(e.coeffs):
        if not is_zero(c):
            return k
    return None


class _ChainModule:
    """Submodule of (C[x]/x^N)^M in Howell-style echelon form."""

    def __init__(self, columns: list[list[XSeries]], N: int, rows: int) -> None:
        self.N = N
        self.pivots: list[tuple[list[XSeries], int] | None] = []
        pool = [c for c in columns if any(_vec_valuation(e) is not None for e in c)]
        for r in range(rows):
            best = None
            for idx, col in enumerate(pool):
                v = _vec_valuation(col[r])
                if v is not None and (best is None or v < best[1]):
                    best = (idx, v)
            if best is None:
                self.pivots.append(None)
                continue
            idx, v = best
            piv = pool.pop(idx)
            unit_inv = _repad(piv[r].unshift(v).inverse(), N)
            new_pool = []
            for col in pool:
                col = self._eliminate(col, piv, r, v, unit_inv)
                if any(_vec_valuation(e) is not None for e in col):
                    new_pool.append(col)
            if v > 0:
                ann = [e.shift(N - v).truncate(N) for e in piv]
                if any(_vec_valuation(e) is not None for e in ann):
                    new_pool.append(ann)
            pool = new_pool
            self.pivots.append((piv, v))

    def _eliminate(self, col: list[XSeries], piv: list[XSeries], r: int, v: int,
                   unit_inv: XSeries) -> list[XSeries]:
        e = col[r]
        w = _vec_valuation(e)
        if w is None:
            return col
        if w < v:
            raise AssertionError("pivot does not have minimal valuation")
        f = _repad(_repad(e.unshift(v), self.N) * unit_inv, self.N)
        return [_repad((a - f * b).truncate(self.N), self.N) for a, b in zip(col, piv)]

    def contains(self, vec: list[XSeries]) -> bool:
        for r, entry in enumerate(self.pivots):
            w = _vec_valuation(vec[r])
            if entry is None:
                if w is not None:
                    return False
                continue
            piv, v = entry
            if w is None:
                continue
            if w < v:
                return False
            unit_inv = _repad(piv[r].unshift(v).inverse(), self.N)
            vec = self._eliminate(vec, piv, r, v, unit_inv)
        return True


def product_ideal_membership(Q: BiPoly, m: LocalModel) -> bool:
    """Direct test of Q in prod_j (y + q_j, x^(2 L_j)) inside C{x, y}.

    The ideal contains x^N with N = sum_j 2L_j and the monic polynomial
    W = prod_j (y + q_j), so membership is a finite problem in the module
    (C[x]/x^N)[y]/(W), solved by echelon reduction over the chain ring.
    """
    N = sum(b.two_L for b in m.branches)
    M = m.M
    one = XSeries.const(1, N)
    lin = [YPolyOverXSeries([XSeries.from_sparse(dict(enumerate(b.q_coeffs())), N), one])
           for b in m.branches]
    W = YPolyOverXSeries([one])
    for f in lin:
        W = W * f

    def as_vector(F: YPolyOverXSeries) -> list[XSeries]:
        _, r = F.divmod(W)
        return [_repad(r.coeff(j).truncate(N), N) for j in range(M)]

    columns = []
    for choice in product((0, 1), repeat=M):
        g = YPolyOverXSeries([one])
        shift = 0
        for take_power, f, b in zip(choice, lin, m.branches):
            if take_power:
                shift += b.two_L
            else:
                g = g * f
        if shift >= N and any(choice):
            # x^N itself; it is zero in the truncated module
            continue
        g = YPolyOverXSeries([c.shift(shift).truncate(N) for c in g.y_coeffs])
        for b_exp in range(M):
            yb = YPolyOverXSeries([XSeries.zero(N)] * b_exp + [one])
            columns.append(as_vector(g * yb))
    module = _ChainModule(columns, N, M)
    target = as_vector(YPolyOverXSeries.from_bipoly(Q, N))
    return module.contains(target)
