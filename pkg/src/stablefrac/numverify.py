"""Numerical oracle for local L^p integrability near the origin.

The integral of |Q/P|^p over the dyadic annuli
{2^(-k-1) <= max(|x|, |y|) < 2^(-k)} is computed for a range of k, and the
log2-slope of these annulus integrals decides the question: a clearly
negative slope means the contributions shrink geometrically (convergence),
a clearly positive one means they grow (divergence).  Slopes near zero are
reported as inconclusive; the oracle never adjudicates boundary exponents.

For each x the inner y-integral is split among the branch centers
y = -q_j(x) (a Voronoi partition of the line), and the cells are graded
geometrically outward from each center starting at the width x^(2L_j).
For local models every factor is evaluated in coordinates centred on the
nearest branch, using exact difference polynomials, so contact distances far
below double-precision resolution of the centers themselves are still
resolved.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Sequence

import numpy as np
from numpy.polynomial import legendre
from scipy.special import logsumexp

from .algebra import BiPoly
from .errors import BudgetExhausted, ZeroNumerator
from .integrability import INF, lp_threshold, parse_exponent
from .localmodel import LocalModel

GL_NODES, GL_WEIGHTS = legendre.leggauss(8)
GRADING = 4.0
MAX_CELLS_PER_SIDE = 140


class Verdict(enum.Enum):
    CONVERGES = "Converges"
    DIVERGES = "Diverges"
    INCONCLUSIVE = "Inconclusive"

    def as_membership(self) -> bool | None:
        if self is Verdict.CONVERGES:
            return True
        if self is Verdict.DIVERGES:
            return False
        return None


@dataclass(frozen=True)
class ScalingReport:
    """Annulus integrals s_k (as log2 values), fitted slope and verdict."""

    ks: tuple[int, ...]
    log2_values: tuple[float, ...]
    slope: float
    verdict: Verdict
    margin: float
    fit_window: int
    evaluations: int = 0
    note: str = ""

    def to_json(self) -> dict[str, Any]:
        return {
            "annuli": [{"k": k, "log2_integral": v} for k, v in zip(self.ks, self.log2_values)],
            "slope": self.slope, "verdict": self.verdict.value, "margin": self.margin,
            "fit_window": self.fit_window, "evaluations": self.evaluations, "note": self.note,
        }


# ---------------------------------------------------------------------------
# Compiled polynomials
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _Compiled:
    """BiPoly prepared for fast evaluation as a polynomial in y for fixed x."""

    xi: np.ndarray
    yj: np.ndarray
    coeff: np.ndarray
    deg_y: int

    @classmethod
    def of(cls, P: BiPoly) -> "_Compiled":
        items = list(P.items())
        if not items:
            return cls(np.zeros(0, int), np.zeros(0, int), np.zeros(0, complex), 0)
        return cls(np.array([i for (i, _), _ in items]), np.array([j for (_, j), _ in items]),
                   np.array([complex(c) for _, c in items]), P.deg_y)

    def y_coeffs(self, x: float) -> np.ndarray:
        out = np.zeros(self.deg_y + 1, dtype=complex)
        np.add.at(out, self.yj, self.coeff * np.power(x, self.xi.astype(float)))
        return out

    def log_abs(self, x: float, y: np.ndarray) -> np.ndarray:
        c = self.y_coeffs(x)
        acc = np.full(y.shape, c[-1], dtype=complex)
        for v in c[-2::-1]:
            acc = acc * y + v
        with np.errstate(divide="ignore"):
            return np.log(np.abs(acc))


def _float_poly(coeffs: Sequence[Fraction]) -> np.ndarray:
    return np.array([float(c) for c in coeffs] or [0.0])


def _polyval(c: np.ndarray, x: float) -> float:
    acc = 0.0
    for v in c[::-1]:
        acc = acc * x + v
    return acc


# ---------------------------------------------------------------------------
# Frames: one per distinct branch center at a given x
# ---------------------------------------------------------------------------

@dataclass
class _Frame:
    center: float
    width: float
    offset_to: Callable[["_Frame"], float]
    log_integrand: Callable[[np.ndarray], np.ndarray]
    key: Any = None


class _ModelIntegrand:
    """Sheared evaluation for P = prod (y + q_j + i x^(2L_j))."""

    def __init__(self, m: LocalModel, Q: BiPoly | None, kind: str) -> None:
        self.kind = kind
        qs: dict[tuple[Fraction, ...], list[int]] = {}
        for b in m.branches:
            qs.setdefault(tuple(b.q_coeffs()), []).append(b.two_L)
        self.groups = list(qs.items())
        self.qfloat = [_float_poly(q) for q, _ in self.groups]
        n = len(self.groups)
        self.diff = [[_float_poly(_sub(self.groups[h][0], self.groups[g][0])) for h in range(n)]
                     for g in range(n)]
        self.Qg: list[_Compiled] = []
        if Q is not None:
            for q, _ in self.groups:
                shift = BiPoly.y() - BiPoly.from_x_poly(list(q))
                self.Qg.append(_Compiled.of(Q.substitute_y(shift)))

    def centers_cross(self, x_lo: float, x_hi: float, levels: Sequence[float]) -> list[float]:
        out = []
        for qf in self.qfloat:
            for lev in levels:
                c = qf.copy()
                c[0] += lev
                if np.all(c[1:] == 0):
                    continue
                for z in np.polynomial.polynomial.polyroots(c):
                    if abs(z.imag) < 1e-14 and x_lo < z.real < x_hi:
                        out.append(float(z.real))
        return out

    def frames(self, x: float) -> list[_Frame]:
        out = []
        ax = abs(x)
        for g, (q, twoLs) in enumerate(self.groups):
            center = -_polyval(self.qfloat[g], x)
            width = ax ** max(twoLs)
            shifts = [_polyval(self.diff[g][h], x) for h in range(len(self.groups))]

            def offset_to(other: _Frame, g: int = g, x: float = x) -> float:
                # c_other - c_g = q_g(x) - q_other(x)
                return -_polyval(self.diff[g][other.key], x)

            def log_integrand(d: np.ndarray, g: int = g, shifts: list[float] = shifts,
                              x: float = x) -> np.ndarray:
                logs = []
                for h, (_, tl) in enumerate(self.groups):
                    for twoL in tl:
                        f = d + shifts[h] + 1j * ax ** twoL
                        logs.append((twoL, np.log(np.abs(f))))
                if self.kind == "ratio":
                    total = sum(v for _, v in logs)
                    return self.Qg[g].log_abs(x, d) - total
                with np.errstate(divide="ignore"):
                    lx = math.log(ax) if ax > 0 else -np.inf
                terms = np.stack([twoL * lx - 2 * v for twoL, v in logs])
                return logsumexp(terms, axis=0)

            out.append(_Frame(center, width, offset_to, log_integrand, g))
        return out


def _sub(a: Sequence[Fraction], b: Sequence[Fraction]) -> list[Fraction]:
    n = max(len(a), len(b))
    a = list(a) + [Fraction(0)] * (n - len(a))
    b = list(b) + [Fraction(0)] * (n - len(b))
    return [u - v for u, v in zip(a, b)]


class _GeneralIntegrand:
    """Direct evaluation for an arbitrary P through its numeric y-roots."""

    def __init__(self, Q: BiPoly, P: BiPoly) -> None:
        self.Qc = _Compiled.of(Q)
        self.Pc = _Compiled.of(P)

    def centers_cross(self, x_lo: float, x_hi: float, levels: Sequence[float]) -> list[float]:
        return []

    def frames(self, x: float) -> list[_Frame]:
        c = self.Pc.y_coeffs(x)
        while c.size > 1 and c[-1] == 0:
            c = c[:-1]
        lead = c[-1]
        rts = np.polynomial.polynomial.polyroots(c) if c.size > 1 else np.zeros(0, complex)
        log_lead = math.log(abs(lead))
        out: list[_Frame] = []
        for k, rho in enumerate(rts):
            center = float(rho.real)

            def offset_to(other: _Frame, center: float = center) -> float:
                return other.center - center

            def log_integrand(d: np.ndarray, center: float = center) -> np.ndarray:
                y = center + d
                logs = sum(np.log(np.abs(y - r)) for r in rts)
                return self.Qc.log_abs(x, y) - logs - log_lead

            out.append(_Frame(center, abs(float(rho.imag)), offset_to, log_integrand, k))
        if not out:
            def flat(d: np.ndarray) -> np.ndarray:
                return self.Qc.log_abs(x, d) - log_lead
            out.append(_Frame(0.0, 0.0, lambda o: o.center, flat, 0))
        return out


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

def _graded_points(lo: float, hi: float, width: float) -> list[float]:
    """Breakpoints in [lo, hi] graded geometrically away from 0."""
    span = max(abs(lo), abs(hi))
    if span == 0:
        return [lo, hi]
    w = max(width, span * GRADING ** (-MAX_CELLS_PER_SIDE))
    pts = {lo, hi}
    if lo < 0 < hi:
        pts.add(0.0)
    v = w
    while v < span:
        if lo < v < hi:
            pts.add(v)
        if lo < -v < hi:
            pts.add(-v)
        v *= GRADING
    return sorted(pts)


def _gl(a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * GL_NODES, half * GL_WEIGHTS


def _inner_samples(frames: list[_Frame],
                   intervals: Sequence[tuple[float, float]]) -> tuple[np.ndarray, np.ndarray]:
    """Log-integrand values and log-weights covering the union of y-intervals."""
    order = sorted(range(len(frames)), key=functools.cmp_to_key(
        lambda i, j: -1 if frames[i].offset_to(frames[j]) > 0 else
        (1 if frames[i].offset_to(frames[j]) < 0 else 0)))
    fr = [frames[i] for i in order]
    vals: list[np.ndarray] = []
    logw: list[np.ndarray] = []
    for idx, f in enumerate(fr):
        left = f.offset_to(fr[idx - 1]) / 2 if idx > 0 else -math.inf
        right = f.offset_to(fr[idx + 1]) / 2 if idx + 1 < len(fr) else math.inf
        for ya, yb in intervals:
            a = max(left, ya - f.center)
            b = min(right, yb - f.center)
            if not a < b:
                continue
            pts = _graded_points(a, b, f.width)
            for u, v in zip(pts, pts[1:]):
                if not u < v:
                    continue
                nodes, weights = _gl(u, v)
                vals.append(f.log_integrand(nodes))
                logw.append(np.log(weights))
    if not vals:
        return np.zeros(0), np.zeros(0)
    return np.concatenate(vals), np.concatenate(logw)


def _annulus_samples(integrand: Any, k: int, budget: list[int]) -> tuple[np.ndarray, np.ndarray]:
    """Samples of log|integrand| (exponent 1) with log quadrature weights."""
    r = 2.0 ** (-k)
    h = r / 2
    regions = [
        # |x| in [r/2, r), |y| < r
        ([(h, r), (-r, -h)], [(-r, r)]),
        # |x| < r/2, |y| in [r/2, r)
        ([(-h, 0.0), (0.0, h)], [(-r, -h), (h, r)]),
    ]
    levels = (r, -r, h, -h)
    vals: list[np.ndarray] = []
    logw: list[np.ndarray] = []
    for xs, ys in regions:
        for xa, xb in xs:
            cuts = sorted({xa, xb, *integrand.centers_cross(xa, xb, levels)})
            for u, v in zip(cuts, cuts[1:]):
                mid = 0.5 * (u + v)
                for a, b in ((u, mid), (mid, v)):
                    nodes, weights = _gl(a, b)
                    for x, wx in zip(nodes, weights):
                        v, w = _inner_samples(integrand.frames(float(x)), ys)
                        budget[0] -= v.size
                        if budget[0] < 0:
                            raise BudgetExhausted("evaluation budget exhausted")
                        vals.append(v)
                        logw.append(w + math.log(wx))
    if not vals:
        return np.zeros(0), np.zeros(0)
    return np.concatenate(vals), np.concatenate(logw)


def _fit(ks: Sequence[int], log2v: Sequence[float], window: int) -> float:
    kk = np.array(ks[-window:], dtype=float)
    vv = np.array(log2v[-window:], dtype=float)
    if not np.all(np.isfinite(vv)):
        return math.nan
    return float(np.polyfit(kk, vv, 1)[0])


def _verdict(slope: float, margin: float) -> Verdict:
    if math.isnan(slope):
        return Verdict.INCONCLUSIVE
    if slope < -margin:
        return Verdict.CONVERGES
    if slope > margin:
        return Verdict.DIVERGES
    return Verdict.INCONCLUSIVE


def _scaling_multi(integrand: Any, ps: Sequence[float], k0: int, k1: int, margin: float,
                   window: int, budget: int) -> list[ScalingReport]:
    """One report per exponent; the samples are shared because only |f|^p changes."""
    ks = list(range(k0, k1 + 1))
    left = [budget]
    samples: list[tuple[np.ndarray, np.ndarray]] = []
    note = ""
    try:
        for k in ks:
            samples.append(_annulus_samples(integrand, k, left))
    except BudgetExhausted as exc:
        note = str(exc)
    used = budget - left[0]
    done = ks[:len(samples)]
    reports = []
    for p in ps:
        logs = []
        for v, w in samples:
            with np.errstate(invalid="ignore"):
                terms = p * v + w
            logs.append(float(logsumexp(terms)) / math.log(2) if terms.size else -math.inf)
        if note:
            reports.append(ScalingReport(tuple(done), tuple(logs), math.nan,
                                         Verdict.INCONCLUSIVE, margin, window, used, note))
            continue
        if all(v == -math.inf for v in logs[-window:]):
            reports.append(ScalingReport(tuple(done), tuple(logs), -math.inf, Verdict.CONVERGES,
                                         margin, window, used, "integrand vanishes"))
            continue
        slope = _fit(done, logs, window)
        reports.append(ScalingReport(tuple(done), tuple(logs), slope, _verdict(slope, margin),
                                     margin, window, used))
    return reports


def _as_float_p(p: Any) -> float:
    p = parse_exponent(p) if not isinstance(p, float) else p
    if p == INF or (isinstance(p, float) and math.isinf(p)):
        raise ValueError("the oracle handles finite exponents only")
    p = float(p)
    if p < 1:
        raise ValueError("exponents below 1 are not supported")
    return p


def integrate_local(Q: BiPoly, P: BiPoly | LocalModel, p: Any, eps: float = 0.1,
                    k_max: int | None = None, k_min: int | None = None, window: int = 8,
                    budget: int = 40_000_000) -> ScalingReport:
    """Scaling report for the integral of |Q/P|^p near the origin.

    ``P`` may be a LocalModel (sheared evaluation, deep annuli) or a general
    BiPoly (numeric roots, shallower annuli).  ``eps`` is the slope margin.
    """
    if Q.is_zero():
        raise ZeroNumerator("Q is identically zero")
    pf = _as_float_p(p)
    if isinstance(P, LocalModel):
        integrand: Any = _ModelIntegrand(P, Q, "ratio")
        k_max = 22 if k_max is None else k_max
    else:
        integrand = _GeneralIntegrand(Q, P)
        k_max = 14 if k_max is None else k_max
    if k_min is None:
        k_min = max(k_max - window - 1, 1)
    win = min(window, k_max - k_min + 1)
    return _scaling_multi(integrand, [pf], k_min, k_max, eps, win, budget)[0]


def oracle_membership(Q: BiPoly, m: LocalModel, p: Any, gap: float = 0.05,
                      p_star: Any = None, eps: float = 0.1, **kw) -> Verdict:
    """Numerical verdict for Q/P in L^p, P the model polynomial of m.

    When the critical exponent is supplied (or ``p_star="auto"``) and p lies
    within ``gap`` of it, the oracle declines with Inconclusive.
    """
    pf = _as_float_p(p)
    if p_star == "auto":
        p_star = lp_threshold(Q, m).p_star
    if p_star is not None and p_star != INF and abs(pf - float(p_star)) < gap:
        return Verdict.INCONCLUSIVE
    return integrate_local(Q, m, pf, eps=eps, **kw).verdict


@dataclass(frozen=True)
class DerivativeProbe:
    expected: Fraction
    estimate: float
    slopes: tuple[tuple[float, float], ...] = field(default=())

    @property
    def within(self) -> bool:
        return abs(self.estimate - float(self.expected)) <= 0.1

    def to_json(self) -> dict[str, Any]:
        return {"expected": str(self.expected), "estimate": self.estimate, "ok": self.within,
                "slopes": [{"p": p, "slope": s} for p, s in self.slopes]}


def derivative_probe(m: LocalModel, grid: Sequence[float] | None = None,
                     k_max: int = 18) -> DerivativeProbe:
    """Locate the exponent where |Im(P_y/P)|^p stops being locally integrable."""
    grid = list(grid) if grid is not None else [1.0 + 0.05 * i for i in range(21)]
    integrand = _ModelIntegrand(m, None, "imlogderiv")
    reports = _scaling_multi(integrand, grid, k_max - 7, k_max, 0.0, 8, 40_000_000)
    slopes = [(pv, rep.slope) for pv, rep in zip(grid, reports)]
    estimate = math.nan
    for (p0, s0), (p1, s1) in zip(slopes, slopes[1:]):
        if s0 < 0 <= s1:
            estimate = p0 + (p1 - p0) * (-s0) / (s1 - s0)
            break
    return DerivativeProbe(1 + Fraction(1, m.K), estimate, tuple(slopes))


__all__ = ["DerivativeProbe", "ScalingReport", "Verdict", "derivative_probe",
           "integrate_local", "oracle_membership"]
