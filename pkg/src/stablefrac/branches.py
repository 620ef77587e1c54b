"""Real branches of the pencil A + tB and the proper-t machinery.

For a local model P = A + iB (A, B with real coefficients) and real t, the
curve A + tB = 0 is a union of M smooth real-analytic branches y = a_j(x; t).
For all but finitely many t these branches line up with the branch data of
P: a_j + q_j vanishes to order 2L_j and two branches meet to exactly the
contact order O_ij.  Such t are called *proper*, and everything here
certifies properness explicitly instead of assuming it.
"""

from __future__ import annotations

import random
from functools import lru_cache
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

from mpmath import mpc, mpf

from . import upoly
from .algebra import (BiPoly, GaussianRational, XSeries, YPolyOverXSeries, format_rational,
                      high_precision, is_numeric, is_zero, real_imag_parts)
from .errors import ImproperParameter, Inconclusive, LiftStall, NumericInconclusive, SearchExhausted
from .integrability import INF, parse_exponent, required_order
from .localmodel import LocalModel, build_P_from_model, contact_matrix, intersection_multiplicity


class _AboveTruncation:
    """Order of a series that vanishes to its whole truncation order.

    It compares as larger than any integer so that multiples of P pass
    every order test vacuously.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __ge__(self, other: object) -> bool:
        return True

    def __gt__(self, other: object) -> bool:
        return not isinstance(other, _AboveTruncation)

    def __le__(self, other: object) -> bool:
        return isinstance(other, _AboveTruncation)

    def __lt__(self, other: object) -> bool:
        return False

    def __repr__(self) -> str:
        return "AboveTruncation"

    def __str__(self) -> str:
        return "above-truncation"


AboveTruncation = _AboveTruncation()


def series_order(s: XSeries) -> int | _AboveTruncation:
    """Order of vanishing, or AboveTruncation if no nonzero coefficient is known."""
    for k, c in enumerate(s.coeffs):
        if not is_zero(c):
            return k
    return AboveTruncation


def default_truncation(m: LocalModel) -> int:
    """Truncation order that decides every order question for the model."""
    return 2 * intersection_multiplicity(m) + 8


def pencil(m: LocalModel, t: Fraction) -> BiPoly:
    """A + tB for the model polynomial (real coefficients, monic in y)."""
    A, B = real_imag_parts(build_P_from_model(m))
    return A + B.scale(GaussianRational(t))


# ---------------------------------------------------------------------------
# Series of the branches
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BranchSeries:
    """A root y = a(x) of A + tB, known modulo x^N."""

    a: XSeries
    datum_index: int | None
    t: Fraction

    @property
    def mode(self) -> str:
        return self.a.mode

    def psi0(self, m: LocalModel) -> Any:
        """psi(0; t): minus the x^(2L) coefficient of a + q for the matched datum."""
        if self.datum_index is None:
            raise ValueError("branch is not matched to a datum")
        b = m[self.datum_index]
        return -(self.a[b.two_L])

    def to_json(self) -> dict[str, Any]:
        return {"datum": self.datum_index, "t": format_rational(self.t),
                "prec": self.a.prec, "coeffs": [_coeff_json(c) for c in self.a.coeffs]}


def _coeff_json(c: Any) -> str:
    if is_numeric(c):
        c = c.real if isinstance(c, mpc) else c
        return str(mpf(c))
    if isinstance(c, GaussianRational):
        return format_rational(c.re) if c.im == 0 else str(c)
    return format_rational(Fraction(c))


def _x_poly(prefix: Sequence[Any]) -> BiPoly:
    return BiPoly({(k, 0): c for k, c in enumerate(prefix) if c != 0})


def _newton_lift(G: YPolyOverXSeries, c: Any, target: int) -> XSeries:
    """Root Y of G(x, Y) = 0 with Y(0) = c, a simple root of G(0, y)."""
    Gd = G.diff_y()
    Y = XSeries([c], 1)
    prec = 1
    while prec < target:
        prec = min(2 * prec, target)
        Yp = XSeries(Y.coeffs, prec)
        val = G.truncate(prec).evaluate(Yp)
        der = Gd.truncate(prec).evaluate(Yp)
        Y = (Yp - val * der.inverse()).truncate(prec)
    return Y


def _classify_roots(gr: list[Any]) -> list[tuple[Any, int]]:
    """Real roots of g_r with multiplicities; exact when rational."""
    exact, rest, numeric = upoly.exact_roots(gr)
    out: list[tuple[Any, int]] = []
    for c, mult in exact:
        if c.im != 0:
            raise NumericInconclusive("non-real coefficient in a real branch expansion")
        out.append((c.re, mult))
    if numeric:
        if len(upoly.squarefree_part(rest)) - 1 != len(upoly.trim(rest)) - 1:
            raise NumericInconclusive("repeated irrational root in a branch expansion")
        for z in numeric:
            if abs(z.imag) > mpf(10) ** (-20):
                raise NumericInconclusive("non-real root in a real branch expansion")
            out.append((mpf(z.real), 1))
    return out


def _raw_branches(F: BiPoly, M: int, N: int) -> list[XSeries]:
    cap = max(F.total_degree, 1) ** 2 + 2
    done: list[XSeries] = []
    stack: list[tuple[tuple[Any, ...], int, int]] = [((0,), 1, M)]
    while stack:
        prefix, n, expected = stack.pop()
        if n > cap:
            raise LiftStall("branches did not separate within the Bezout bound")
        g = F.substitute_y(_x_poly(prefix) + BiPoly.monomial(n, 1))
        r = g.x_order()
        gr = upoly.trim([g.coeff(r, j) for j in range(g.deg_y + 1)])
        if len(gr) - 1 != expected:
            raise LiftStall("residual polynomial has the wrong degree (fractional exponent)")
        for c, mult in _classify_roots(gr):
            if mult > 1:
                if is_numeric(c):
                    raise NumericInconclusive("repeated irrational root in a branch expansion")
                stack.append((prefix + (0,) * (n - len(prefix)) + (c,), n + 1, mult))
                continue
            target = max(N - n, 1)
            rows = YPolyOverXSeries.from_bipoly(g, target + r)
            G = YPolyOverXSeries([s.unshift(r) for s in rows.y_coeffs])
            if is_numeric(c):
                G = G.to_numeric()
            Y = _newton_lift(G, c, target)
            lead = list(prefix) + [0] * (n - len(prefix))
            a = XSeries(lead, N) + Y.shift(n)
            done.append(a.truncate(N))
    return done


def _match(m: LocalModel, series: list[XSeries]) -> list[int | None]:
    """Datum for each branch: the largest 2L_j with Ord(a + q_j) >= 2L_j."""
    groups: dict[Any, list[int]] = {}
    for j, b in enumerate(m.branches):
        groups.setdefault(b, []).append(j)
    used: dict[Any, int] = {}
    out: list[int | None] = []
    for a in series:
        best = None
        for b in groups:
            s = a + XSeries(b.q_coeffs(), a.prec)
            if s.vanishes_to(b.two_L) and (best is None or b.two_L > best.two_L):
                best = b
        if best is None:
            out.append(None)
            continue
        k = used.get(best, 0)
        used[best] = k + 1
        idx = groups[best]
        out.append(idx[k] if k < len(idx) else None)
    return out


def branch_series(m: LocalModel, t: Any, N: int | None = None) -> list[BranchSeries]:
    """The M real branches of A + tB as series modulo x^N."""
    t = Fraction(t)
    N = default_truncation(m) if N is None else N
    F = pencil(m, t)
    with high_precision():
        raw = _raw_branches(F, m.M, N)
        if len(raw) != m.M:
            raise LiftStall(f"found {len(raw)} branches, expected {m.M}")
        Fy = YPolyOverXSeries.from_bipoly(F, N)
        for a in raw:
            if a.mode == "numeric":
                Fy_use = Fy.to_numeric()
            else:
                Fy_use = Fy
            if not Fy_use.evaluate(a).is_zero_to_prec():
                raise LiftStall("branch series does not annihilate A + tB")
        matched = _match(m, raw)
    order = sorted(range(len(raw)), key=lambda i: (matched[i] is None,
                                                   matched[i] if matched[i] is not None else 0, i))
    return [BranchSeries(raw[i], matched[i], t) for i in order]


# ---------------------------------------------------------------------------
# Properness
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProperTCertificate:
    """Evidence that t is proper: matching plus pairwise contact table."""

    t: Fraction
    pairwise_contacts: tuple[tuple[int, ...], ...]
    matched: tuple[int, ...]
    series: tuple[BranchSeries, ...] = field(default=(), compare=False, repr=False)
    N: int = field(default=0, compare=False)

    def to_json(self) -> dict[str, Any]:
        return {"t": format_rational(self.t), "matched": list(self.matched),
                "contacts": [list(r) for r in self.pairwise_contacts], "N": self.N}


@dataclass(frozen=True)
class NotProper:
    """Result of is_proper for an exceptional t."""

    t: Fraction
    reason: str
    pair: tuple[int, int] | None = None

    def __bool__(self) -> bool:
        return False

    def to_json(self) -> dict[str, Any]:
        return {"t": format_rational(self.t), "proper": False, "reason": self.reason,
                "pair": list(self.pair) if self.pair else None}


def is_proper(m: LocalModel, t: Any, N: int | None = None) -> ProperTCertificate | NotProper:
    """Certify that t is proper for the model, or report why it is not."""
    t = Fraction(t)
    N = default_truncation(m) if N is None else N
    series = branch_series(m, t, N)
    O = contact_matrix(m)
    for i, s in enumerate(series):
        if s.datum_index is None:
            return NotProper(t, f"branch {i} matches no datum (or a datum is oversubscribed)",
                             (i, i))
    M = m.M
    contacts = [[0] * M for _ in range(M)]
    with high_precision():
        for i in range(M):
            contacts[i][i] = m[series[i].datum_index].two_L
            for k in range(i + 1, M):
                d = series_order(series[i].a - series[k].a)
                want = O[series[i].datum_index, series[k].datum_index]
                if d is AboveTruncation:
                    raise Inconclusive(f"branches {i} and {k} agree to the truncation order")
                if d != want:
                    return NotProper(t, f"branches {i} and {k} have contact {d}, expected {want}",
                                     (i, k))
                contacts[i][k] = contacts[k][i] = d
    return ProperTCertificate(t, tuple(tuple(r) for r in contacts),
                              tuple(s.datum_index for s in series), tuple(series), N)


def _t_candidates(attempts: int, seed: int) -> list[Fraction]:
    out: list[Fraction] = []
    k = 1
    while len(out) < attempts // 2:
        out.extend([Fraction(k), Fraction(-k)])
        k += 1
    rng = random.Random(seed)
    while len(out) < attempts:
        cand = Fraction(rng.randint(-40, 40), rng.randint(1, 12))
        if cand not in out:
            out.append(cand)
    return out[:attempts]


def find_proper_t(m: LocalModel, N: int | None = None, seed: int = 0,
                  attempts: int = 32) -> tuple[Fraction, ProperTCertificate]:
    """Search 1, -1, 2, -2, ... and then seeded rationals for a proper t."""
    last: Exception | None = None
    for t in _t_candidates(attempts, seed):
        try:
            cert = is_proper(m, t, N)
        except Inconclusive as exc:
            last = exc
            continue
        if cert:
            return t, cert
    raise SearchExhausted(f"no proper t found in {attempts} attempts"
                          + (f" (last problem: {last})" if last else ""))


def certificate_for(m: LocalModel, t: Any = None, N: int | None = None,
                    seed: int = 0) -> ProperTCertificate:
    """Certificate for a given t (or a searched one); rejects exceptional t."""
    if isinstance(t, ProperTCertificate):
        return t
    if t is None:
        return _cached_search(m, N, seed)
    cert = _cached_is_proper(m, Fraction(t), N)
    if not cert:
        raise ImproperParameter(f"t = {format_rational(Fraction(t))} is not proper: {cert.reason}")
    return cert


@lru_cache(maxsize=128)
def _cached_search(m: LocalModel, N: int | None, seed: int) -> ProperTCertificate:
    return find_proper_t(m, N, seed)[1]


@lru_cache(maxsize=128)
def _cached_is_proper(m: LocalModel, t: Fraction, N: int | None) -> ProperTCertificate | NotProper:
    return is_proper(m, t, N)


# ---------------------------------------------------------------------------
# Orders along branches
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BvanishRow:
    branch: int
    datum: int
    B_order: int
    B_expected: int
    Ay_order: int
    Ay_expected: int

    @property
    def ok(self) -> bool:
        return self.B_order == self.B_expected and self.Ay_order == self.Ay_expected


@dataclass(frozen=True)
class BvanishReport:
    t: Fraction
    rows: tuple[BvanishRow, ...]

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.rows)

    def to_json(self) -> dict[str, Any]:
        return {"t": format_rational(self.t), "ok": self.ok,
                "rows": [{"branch": r.branch, "datum": r.datum, "B": r.B_order,
                          "B_expected": r.B_expected, "Ay": r.Ay_order,
                          "Ay_expected": r.Ay_expected} for r in self.rows]}


def compose(Q: BiPoly, s: BranchSeries) -> XSeries:
    """Q(x, a(x)) for a branch series (numeric if the branch is)."""
    Qy = YPolyOverXSeries.from_bipoly(Q, s.a.prec)
    if s.mode == "numeric":
        Qy = Qy.to_numeric()
    return Qy.evaluate(s.a)


def verify_bvanish(m: LocalModel, t: Any = None, N: int | None = None) -> BvanishReport:
    """Orders of B and of A_y + tB_y along each branch against the contact formulas."""
    cert = certificate_for(m, t, N)
    A, B = real_imag_parts(build_P_from_model(m))
    Fy = A.diff_y() + B.diff_y().scale(GaussianRational(cert.t))
    O = contact_matrix(m)
    rows = []
    with high_precision():
        for i, s in enumerate(cert.series):
            j = s.datum_index
            ob = series_order(compose(B, s))
            oa = series_order(compose(Fy, s))
            if ob is AboveTruncation or oa is AboveTruncation:
                raise Inconclusive("order along a branch exceeds the truncation order")
            row = BvanishRow(i, j, ob, O.column_sum(j), oa, O.off_diagonal_sum(j))
            if not row.ok:
                raise AssertionError(f"order mismatch along branch {i}: {row}")
            rows.append(row)
    return BvanishReport(cert.t, tuple(rows))


def membership_via_branches(Q: BiPoly, m: LocalModel, p: Any, t: Any = None,
                            N: int | None = None) -> bool:
    """L^p membership from the orders of Q along the branches of A + tB."""
    p = parse_exponent(p)
    p_eff = Fraction(m.K + 1) if p == INF else p
    cert = certificate_for(m, t, N)
    O = contact_matrix(m)
    with high_precision():
        for s in cert.series:
            j = s.datum_index
            need = required_order(O.column_sum(j), m[j].L, p_eff)
            if need <= 0:
                continue
            if need > s.a.prec:
                raise Inconclusive("truncation too small for the required order")
            if not compose(Q, s).vanishes_to(need):
                return False
    return True


def distinct_values(m: LocalModel, cert1: ProperTCertificate,
                    cert2: ProperTCertificate) -> dict[int, tuple[list[Any], list[Any]]]:
    """psi(0; t) values per distinct datum for two proper t's."""
    out: dict[int, tuple[list[Any], list[Any]]] = {}
    first: dict[Any, int] = {}
    for j, b in enumerate(m.branches):
        first.setdefault(b, j)
    for cert, slot in ((cert1, 0), (cert2, 1)):
        for s in cert.series:
            key = first[m[s.datum_index]]
            out.setdefault(key, ([], []))[slot].append(s.psi0(m))
    return out


__all__ = [
    "AboveTruncation", "BranchSeries", "BvanishReport", "BvanishRow", "NotProper",
    "ProperTCertificate", "branch_series", "certificate_for", "compose", "default_truncation",
    "distinct_values", "find_proper_t", "is_proper", "membership_via_branches", "pencil",
    "series_order", "verify_bvanish",
]
