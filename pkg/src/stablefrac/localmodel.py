"""Local-model data (L_j, q_j): construction, contact matrix, extraction.

A local model is the product of factors ``y + q_j(x) + i x^(2 L_j)`` with
``q_j`` a real polynomial, ``q_j(0) = 0`` and ``deg q_j < 2 L_j``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Iterable, Sequence

import numpy as np
import sympy

from . import upoly
from .algebra import BiPoly, GaussianRational, format_rational, real_imag_parts
from .errors import CommonFactor, NotStable, NumericInconclusive


def _strip(q: Iterable[Fraction]) -> tuple[Fraction, ...]:
    out = [Fraction(c) for c in q]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True, order=False)
class BranchDatum:
    """One factor ``y + q(x) + i x^(2L)`` of a local model.

    ``q`` lists the coefficients of x, x^2, ... (the constant term is zero).
    """

    L: int
    q: tuple[Fraction, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "q", _strip(self.q))
        if not isinstance(self.L, int) or self.L < 1:
            raise ValueError(f"L must be a positive integer, got {self.L!r}")
        if len(self.q) > 2 * self.L - 1:
            raise ValueError(f"deg q = {len(self.q)} must be below 2L = {2 * self.L}")

    @property
    def two_L(self) -> int:
        return 2 * self.L

    def q_coeffs(self) -> list[Fraction]:
        """Dense ascending coefficients of q, constant term included."""
        return [Fraction(0), *self.q]

    def q_poly(self) -> BiPoly:
        return BiPoly.from_x_poly(self.q_coeffs())

    def sort_key(self) -> tuple:
        padded = list(self.q) + [Fraction(0)] * (2 * self.L - 1 - len(self.q))
        return (2 * self.L, tuple(padded))

    def factor(self) -> BiPoly:
        return BiPoly.y() + self.q_poly() + BiPoly.monomial(2 * self.L, 0, GaussianRational(0, 1))

    def to_json(self) -> dict[str, Any]:
        return {"L": self.L, "q": [format_rational(c) for c in self.q]}

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "BranchDatum":
        return cls(int(obj["L"]), tuple(Fraction(str(c)) for c in obj.get("q", [])))

    def __str__(self) -> str:
        return f"(L={self.L}, q={self.q_poly()})"


@dataclass(frozen=True)
class LocalModel:
    """Ordered list of branch data; the order matters for basis constructions."""

    branches: tuple[BranchDatum, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "branches", tuple(self.branches))
        if not self.branches:
            raise ValueError("a local model needs at least one branch")

    @classmethod
    def of(cls, *data: tuple[int, Sequence[Any]] | BranchDatum) -> "LocalModel":
        """Convenience constructor: ``LocalModel.of((1, [1]), (2, []))``."""
        out = []
        for d in data:
            if isinstance(d, BranchDatum):
                out.append(d)
            else:
                L, q = d
                out.append(BranchDatum(int(L), tuple(Fraction(c) for c in q)))
        return cls(tuple(out))

    @property
    def M(self) -> int:
        return len(self.branches)

    @property
    def K(self) -> int:
        return max(b.two_L for b in self.branches)

    def __len__(self) -> int:
        return len(self.branches)

    def __iter__(self):
        return iter(self.branches)

    def __getitem__(self, j: int) -> BranchDatum:
        return self.branches[j]

    def permuted(self, perm: Sequence[int]) -> "LocalModel":
        return LocalModel(tuple(self.branches[k] for k in perm))

    def canonical(self) -> "LocalModel":
        return LocalModel(tuple(sorted(self.branches, key=BranchDatum.sort_key)))

    def to_json(self) -> dict[str, Any]:
        return {"branches": [b.to_json() for b in self.branches]}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, obj: dict[str, Any] | str) -> "LocalModel":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(tuple(BranchDatum.from_json(b) for b in obj["branches"]))


@dataclass(frozen=True)
class ContactMatrix:
    entries: tuple[tuple[int, ...], ...]

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.entries[i][j]

    @property
    def M(self) -> int:
        return len(self.entries)

    def column_sum(self, j: int) -> int:
        return sum(row[j] for row in self.entries)

    def off_diagonal_sum(self, j: int) -> int:
        return self.column_sum(j) - self.entries[j][j]

    def upper_sum(self) -> int:
        return sum(self.entries[i][j] for i in range(self.M) for j in range(i + 1, self.M))

    def total(self) -> int:
        return sum(sum(row) for row in self.entries)

    def to_list(self) -> list[list[int]]:
        return [list(r) for r in self.entries]


def poly_order(coeffs: Sequence[Fraction]) -> float | int:
    """x-adic order of a dense ascending coefficient list (inf for zero)."""
    for k, c in enumerate(coeffs):
        if c != 0:
            return k
    return float("inf")


def q_difference(a: BranchDatum, b: BranchDatum) -> list[Fraction]:
    qa, qb = a.q_coeffs(), b.q_coeffs()
    n = max(len(qa), len(qb))
    qa += [Fraction(0)] * (n - len(qa))
    qb += [Fraction(0)] * (n - len(qb))
    return [u - v for u, v in zip(qa, qb)]


def contact_order(a: BranchDatum, b: BranchDatum) -> int:
    d = poly_order(q_difference(a, b))
    return int(min(d, a.two_L, b.two_L))


def build_P_from_model(m: LocalModel) -> BiPoly:
    """Expanded product of the model factors."""
    P = BiPoly.const(1)
    for b in m.branches:
        P = P * b.factor()
    return P


def contact_matrix(m: LocalModel) -> ContactMatrix:
    M = m.M
    rows = [[contact_order(m[i], m[j]) for j in range(M)] for i in range(M)]
    return ContactMatrix(tuple(tuple(r) for r in rows))


def intersection_multiplicity(m: LocalModel) -> int:
    """Local intersection multiplicity of P and its reflection: sum of all O_ij."""
    return contact_matrix(m).total()


# ---------------------------------------------------------------------------
# Stability probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Sample points for the stability probe.

    The x samples are ``a + i b`` for ``a`` in ``re_values`` and ``b`` in
    ``im_values`` (``b = 0`` probes R x H, ``b > 0`` probes H^2).
    """

    re_values: tuple[float, ...] = tuple(np.linspace(-2.0, 2.0, 17))
    im_values: tuple[float, ...] = (0.0, 0.05, 0.3, 1.0, 3.0)
    tol: float = 1e-9


REAL_X_GRID = GridSpec(im_values=(0.0,))


@dataclass(frozen=True)
class StabilityProbe:
    ok: bool
    witness: tuple[complex, complex] | None = None

    def __bool__(self) -> bool:
        return self.ok


def check_stability_sample(P: BiPoly, grid_spec: GridSpec | None = None) -> StabilityProbe:
    """Sampled check that P has no zero with x in the grid and Im y > 0.

    Sanity probe only: no certification is claimed.
    """
    grid = grid_spec or GridSpec()
    rows = P.y_coeffs()
    if not rows:
        return StabilityProbe(False, (0j, 1j))
    for a in grid.re_values:
        for b in grid.im_values:
            xv = complex(a, b)
            coeffs = [sum(complex(c) * xv ** i for i, c in r.items()) for r in rows]
            scale = max(abs(c) for c in coeffs) if coeffs else 0.0
            if scale == 0.0:
                return StabilityProbe(False, (xv, 1j))
            poly = np.array(coeffs[::-1])
            nz = np.flatnonzero(np.abs(poly) > 1e-14 * scale)
            poly = poly[nz[0]:]
            if len(poly) <= 1:
                continue
            for yv in np.roots(poly):
                if yv.imag > grid.tol * (1.0 + abs(yv)):
                    return StabilityProbe(False, (xv, complex(yv)))
    return StabilityProbe(True, None)


# ---------------------------------------------------------------------------
# Extraction
# ---------------------------------------------------------------------------

@dataclass
class ExtractionReport:
    model: LocalModel
    numeric_mode: bool = False
    imaginary_leading: list[Any] = field(default_factory=list)
    nonpositive_slope: bool = False


def _to_sympy(P: BiPoly):
    x, y = sympy.symbols("x y")
    expr = sum(sympy.Rational(c.re.numerator, c.re.denominator) * x ** i * y ** j
               for (i, j), c in P.items())
    return sympy.Poly(expr if expr != 0 else sympy.Integer(0), x, y, domain="QQ")


def has_common_factor(P: BiPoly) -> bool:
    """True iff P and its reflection share a non-constant factor.

    A common factor of P and its reflection divides both A and B, and
    conversely, so the exact gcd is taken over the rationals.
    """
    A, B = real_imag_parts(P)
    if B.is_zero():
        return A.total_degree > 0
    if A.is_zero():
        return B.total_degree > 0
    g = _to_sympy(A).gcd(_to_sympy(B))
    return g.total_degree() > 0


def _x_poly_from_q(q: Sequence[Fraction]) -> BiPoly:
    return BiPoly.from_x_poly([Fraction(0), *q])


def extract_local_model_detailed(P: BiPoly, probe: bool = True) -> ExtractionReport:
    """Branch data of P at the origin together with diagnostics."""
    if P.is_zero():
        raise ValueError("P is identically zero")
    if P.coeff(0, 0) != 0:
        raise ValueError("P does not vanish at the origin")
    at0 = P.at_x0()
    M = next((j for j, c in enumerate(at0) if c != 0), None)
    if M is None:
        raise ValueError("P(0, y) vanishes identically")
    if has_common_factor(P):
        raise CommonFactor("P and its reflection share a non-constant factor")
    if probe:
        witness = check_stability_sample(P, REAL_X_GRID)
        if not witness:
            raise NotStable(f"sampled zero at (x, y) = {witness.witness}")

    deg = max(P.total_degree, 1)
    cap = deg * deg + 2
    data: list[tuple[BranchDatum, int]] = []
    imag_leads: list[Any] = []
    numeric = False
    stack: list[tuple[tuple[Fraction, ...], int, int]] = [((), 1, M)]
    while stack:
        q, n, expected = stack.pop()
        if n > cap:
            raise NumericInconclusive("branch expansion exceeded the Bezout bound")
        sub = BiPoly.monomial(n, 1) - _x_poly_from_q(q)
        g = P.substitute_y(sub)
        r = g.x_order()
        gr = upoly.trim([g.coeff(r, j) for j in range(g.deg_y + 1)])
        if len(gr) - 1 != expected:
            raise NotStable("a branch has a fractional exponent before its first "
                            "imaginary term")
        # real roots of g_r are exactly the common roots with its conjugate
        G = upoly.gcd(gr, upoly.conjugate(gr))
        G_exact, _G_rest, G_rest_roots = upoly.exact_roots(G)
        real_exact = [(c, mlt) for c, mlt in G_exact if c.im == 0]
        for z in G_rest_roots:
            if abs(z.imag) < 1e-20:
                raise NumericInconclusive("irrational real coefficient in a branch expansion")
        rest = gr
        for c, _ in real_exact:
            mult = upoly.multiplicity(rest, c)
            for _ in range(mult):
                rest, _r = upoly.divmod_poly(rest, [-c, 1])
            d = -c.re
            stack.append((q + (Fraction(0),) * (n - 1 - len(q)) + (d,), n + 1, mult))
        k = len(upoly.trim(rest)) - 1
        if k <= 0:
            continue
        if n % 2:
            raise NotStable(f"imaginary term at odd order {n}")
        exact, _rem, numeric_roots = upoly.exact_roots(rest)
        roots: list[Any] = [c for c, mlt in exact for _ in range(mlt)]
        if numeric_roots:
            numeric = True
            # multiplicities of numeric roots are recovered from the square-free part
            sf_deg = len(upoly.squarefree_part(_rem)) - 1
            if sf_deg != len(numeric_roots):
                raise NumericInconclusive("root count mismatch in numeric mode")
            roots.extend(numeric_roots)
        for c in roots:
            im = c.im if isinstance(c, GaussianRational) else c.imag
            if not im < 0:
                raise NotStable(f"branch coefficient with non-positive imaginary part at order {n}")
            imag_leads.append(-c)
        data.append((BranchDatum(n // 2, q), k))
    branches = sorted((d for d, k in data for _ in range(k)), key=BranchDatum.sort_key)
    model = LocalModel(tuple(branches))
    slope = any((b.q[0] if b.q else 0) <= 0 for b in branches)
    return ExtractionReport(model, numeric, imag_leads, slope)


def extract_local_model(P: BiPoly, probe: bool = True) -> LocalModel:
    """Local model of a P that is zero-free on R x H near the origin."""
    return extract_local_model_detailed(P, probe=probe).model
