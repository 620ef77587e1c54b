"""Dense univariate polynomials over the coefficient fields used internally.

Polynomials are plain lists of coefficients in ascending degree.  The
helpers here cover what root classification needs: exact division and gcd,
square-free parts, and high-precision roots with exact recognition of
rational and Gaussian-rational values.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import mpmath
from mpmath import mpc, mpf

from .algebra import Coeff, GaussianRational, conj, is_zero, to_numeric, working_dps
from .errors import NumericInconclusive

Poly = list  # ascending coefficients


def trim(p: Sequence[Coeff]) -> Poly:
    out = list(p)
    while out and is_zero(out[-1]):
        out.pop()
    return out


def degree(p: Sequence[Coeff]) -> int:
    return len(trim(p)) - 1


def evaluate(p: Sequence[Coeff], z: Coeff) -> Coeff:
    acc: Coeff = 0
    for c in reversed(p):
        acc = acc * z + c
    return acc


def derivative(p: Sequence[Coeff]) -> Poly:
    return [p[k] * k for k in range(1, len(p))]


def conjugate(p: Sequence[Coeff]) -> Poly:
    return [conj(c) for c in p]


def mul(p: Sequence[Coeff], q: Sequence[Coeff]) -> Poly:
    if not p or not q:
        return []
    out: list[Coeff] = [0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if a == 0:
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return out


def _inv(c: Coeff) -> Coeff:
    return Fraction(1, c) if isinstance(c, int) else 1 / c


def divmod_poly(p: Sequence[Coeff], d: Sequence[Coeff]) -> tuple[Poly, Poly]:
    p = trim(p)
    d = trim(d)
    if not d:
        raise ZeroDivisionError("polynomial division by zero")
    lead_inv = _inv(d[-1])
    rem = list(p)
    quot: list[Coeff] = [0] * max(len(p) - len(d) + 1, 0)
    for k in range(len(p) - len(d), -1, -1):
        f = rem[k + len(d) - 1] * lead_inv
        quot[k] = f
        if f == 0:
            continue
        for j, dj in enumerate(d):
            rem[k + j] = rem[k + j] - f * dj
    return trim(quot), trim(rem[: len(d) - 1])


def monic(p: Sequence[Coeff]) -> Poly:
    p = trim(p)
    if not p:
        return []
    inv = _inv(p[-1])
    return [c * inv for c in p]


def gcd(p: Sequence[Coeff], q: Sequence[Coeff]) -> Poly:
    a, b = trim(p), trim(q)
    while b:
        _, r = divmod_poly(a, b)
        a, b = b, r
    return monic(a)


def squarefree_part(p: Sequence[Coeff]) -> Poly:
    p = trim(p)
    if len(p) <= 2:
        return monic(p)
    g = gcd(p, derivative(p))
    q, _ = divmod_poly(p, g)
    return monic(q)


def multiplicity(p: Sequence[Coeff], c: Coeff) -> int:
    """Exact multiplicity of the root c (0 when c is not a root)."""
    p = trim(p)
    mult = 0
    lin = [-c, 1]
    while len(p) > 1:
        q, r = divmod_poly(p, lin)
        if r:
            break
        p = q
        mult += 1
    return mult


def numeric_roots(p: Sequence[Coeff]) -> list[mpc]:
    """Roots of a square-free polynomial at the working precision."""
    p = trim(p)
    if len(p) <= 1:
        return []
    with mpmath.workdps(working_dps()):
        coeffs = [to_numeric(c) for c in reversed(p)]
        for steps, extra in ((100, 30), (400, 80), (2000, 200)):
            try:
                roots = mpmath.polyroots(coeffs, maxsteps=steps, extraprec=extra)
                return [mpc(r) for r in roots]
            except mpmath.libmp.libhyper.NoConvergence:
                continue
    raise NumericInconclusive("root finder did not converge")


def _recognize_real(v: mpf) -> Fraction | None:
    if abs(v) < mpf("1e-40"):
        return Fraction(0)
    try:
        f = Fraction(mpmath.nstr(v, 40, min_fixed=-mpmath.inf, max_fixed=mpmath.inf))
    except (ValueError, ZeroDivisionError):
        return None
    return f.limit_denominator(10 ** 15)


def recognize_gaussian(z: mpc) -> GaussianRational | None:
    """Candidate Gaussian rational close to z (not verified)."""
    re = _recognize_real(mpf(z.real))
    im = _recognize_real(mpf(z.imag))
    if re is None or im is None:
        return None
    return GaussianRational(re, im)


def exact_roots(p: Sequence[Coeff]) -> tuple[list[tuple[GaussianRational, int]], Poly, list[mpc]]:
    """Split p into exactly recognised roots and a numeric remainder.

    Returns ``(exact, rest, rest_roots)`` where ``exact`` lists
    (root, multiplicity) pairs verified by exact evaluation, ``rest`` is the
    cofactor with no recognisable root, and ``rest_roots`` are the numeric
    roots of its square-free part.
    """
    p = trim(p)
    if len(p) <= 1:
        return [], p, []
    sf = squarefree_part(p)
    exact: list[tuple[GaussianRational, int]] = []
    rest = p
    unresolved: list[mpc] = []
    for z in numeric_roots(sf):
        cand = recognize_gaussian(z)
        if cand is not None and evaluate(sf, cand) == 0:
            mult = multiplicity(rest, cand)
            if mult:
                exact.append((cand, mult))
                for _ in range(mult):
                    rest, _ = divmod_poly(rest, [-cand, 1])
                continue
        unresolved.append(z)
    return exact, rest, unresolved
