"""Independent reference computations used to produce frozen test values.

Nothing here imports the package.  Everything is plain sympy:

* ``order_on_datum`` expands Q(x, x^n y - q(x)) symbolically;
* ``intersection_multiplicity`` is the x-order of Res_y(P, conj P);
* ``dim_Ip`` computes dim I^p / (P, conj P) by linear algebra in the
  truncated ring C[x, y] / m^N, N the intersection multiplicity, where the
  ideal (P, conj P) contains m^N.  Membership in I^p is imposed as vanishing
  of the low x-coefficients of Q(x, x^{2L} y - q(x)) on every datum.

Models are given as lists of (L, [q1, q2, ...]) with q(x) = q1 x + q2 x^2 + ...
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import sympy
from sympy.polys.matrices import DomainMatrix

x, y = sympy.symbols("x y", real=True)
INF = math.inf

Datum = tuple[int, tuple[Fraction, ...]]


def _q(q: Sequence) -> sympy.Expr:
    return sum(sympy.Rational(str(c)) * x ** (k + 1) for k, c in enumerate(q))


def model_poly(model: Sequence[tuple[int, Sequence]]) -> sympy.Expr:
    return sympy.expand(sympy.prod([y + _q(q) + sympy.I * x ** (2 * L) for L, q in model]))


def x_order(expr: sympy.Expr) -> float:
    expr = sympy.expand(expr)
    if expr == 0:
        return INF
    poly = sympy.Poly(expr, x, y)
    return min(m[0] for m in poly.monoms())


def order_on_datum(n: int, q: Sequence, Q: sympy.Expr) -> float:
    return x_order(sympy.expand(Q).subs(y, x ** n * y - _q(q)))


def contact(a: tuple[int, Sequence], b: tuple[int, Sequence]) -> float:
    d = sympy.expand(_q(a[1]) - _q(b[1]))
    od = x_order(d) if d != 0 else INF
    return min(od, 2 * a[0], 2 * b[0])


def intersection_multiplicity(model: Sequence[tuple[int, Sequence]]) -> int:
    P = model_poly(model)
    Pbar = sympy.expand(sympy.conjugate(P))
    res = sympy.resultant(P, Pbar, y)
    return int(x_order(res))


def required(model: Sequence[tuple[int, Sequence]], j: int, p) -> int:
    col = sum(contact(model[i], model[j]) for i in range(len(model)))
    L = model[j][0]
    ceil = 1 if p == INF else math.ceil(Fraction(2 * L + 1) / Fraction(p))
    return int(col - ceil + 1)


def _real_imag(model):
    P = model_poly(model)
    return sympy.expand(sympy.re(P)), sympy.expand(sympy.im(P))


def _rank(rows: list[list[sympy.Rational]], ncols: int) -> int:
    if not rows:
        return 0
    M = DomainMatrix([[sympy.QQ(int(v.p), int(v.q)) for v in r] for r in rows],
                     (len(rows), ncols), sympy.QQ)
    return M.rank()


@lru_cache(maxsize=None)
def _quotient(model: tuple[Datum, ...]):
    N = intersection_multiplicity(model)
    monos = [(a, b) for a in range(N) for b in range(N - a)]
    index = {m: k for k, m in enumerate(monos)}
    A, B = _real_imag(model)
    rows = []
    for F in (A, B):
        for a, b in monos:
            poly = sympy.Poly(sympy.expand(F * x ** a * y ** b), x, y)
            row = [sympy.Rational(0)] * len(monos)
            for (i, j), c in zip(poly.monoms(), poly.coeffs()):
                if i + j < N:
                    row[index[(i, j)]] = sympy.Rational(c)
            if any(row):
                rows.append(row)
    return N, monos, rows, _rank(rows, len(monos))


def colength(model) -> int:
    """dim of the local quotient by (P, conj P); must equal the multiplicity."""
    model = _freeze(model)
    N, monos, _rows, r = _quotient(model)
    return len(monos) - r


def _freeze(model) -> tuple[Datum, ...]:
    return tuple((int(L), tuple(Fraction(str(c)) for c in q)) for L, q in model)


def dim_Ip(model, p) -> int:
    """dim I^p / (P, conj P) from the order conditions and linear algebra."""
    model = _freeze(model)
    N, monos, rows, r = _quotient(model)
    conds: dict[tuple[int, int, int], list] = {}
    for j, (L, q) in enumerate(model):
        req = required(model, j, p)
        if req <= 0:
            continue
        for col, (a, b) in enumerate(monos):
            img = sympy.Poly(sympy.expand(x ** a * (x ** (2 * L) * y - _q(q)) ** b), x, y)
            for (i, l), c in zip(img.monoms(), img.coeffs()):
                if i < req:
                    key = (j, i, l)
                    conds.setdefault(key, [sympy.Rational(0)] * len(monos))[col] += c
    cond_rank = _rank(list(conds.values()), len(monos))
    # the ideal rows satisfy every condition, so I^p / (P, conj P) has
    # dimension (kernel of the conditions) - (rank of the ideal)
    return len(monos) - cond_rank - r


def membership(model, Q: sympy.Expr, p) -> bool:
    """Order test on each datum after reducing Q modulo the monic model."""
    model = _freeze(model)
    P = model_poly(model)
    Q0 = sympy.rem(sympy.expand(Q), P, y)
    if sympy.expand(Q0) == 0:
        return True
    return all(order_on_datum(2 * L, q, Q0) >= required(model, j, p)
               for j, (L, q) in enumerate(model))
