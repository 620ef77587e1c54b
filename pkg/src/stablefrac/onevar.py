"""One-variable polynomial de Branges toolkit.

For a monic p with no zeros in the closed upper half-plane, split p = A + iB
with A, B real.  For every real t the polynomial A + tB has M simple real
zeros a_j(t), and they give an exact quadrature rule

    integral |Q/p|^2 dy/pi = sum_j |Q(a_j)|^2 / (B(a_j) (A' + tB')(a_j))

for deg Q < M, together with an interpolation formula, a reproducing kernel
and L^p sampling inequalities.  Everything here is binary64 floating point;
it is a numerical verification harness, not part of the exact decision path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy import integrate, optimize

from .algebra import BiPoly
from .errors import IntegrationFailure, NotStable1D

ROOT_TOL = 1e-9


def as_coeffs(poly: Any) -> np.ndarray:
    """Ascending complex coefficients of a univariate polynomial.

    Accepts a coefficient sequence or a BiPoly in a single variable (either
    slot).
    """
    if isinstance(poly, BiPoly):
        if poly.is_zero():
            return np.zeros(1, dtype=complex)
        if poly.deg_x > 0 and poly.deg_y > 0:
            raise ValueError("expected a polynomial in one variable")
        slot = 1 if poly.deg_y > 0 else 0
        n = max(poly.deg_x, poly.deg_y)
        out = np.zeros(n + 1, dtype=complex)
        for (i, j), c in poly.items():
            out[(i, j)[slot]] += complex(c)
        return out
    arr = np.asarray(list(poly), dtype=complex)
    return arr if arr.size else np.zeros(1, dtype=complex)


def _trim(c: np.ndarray) -> np.ndarray:
    c = np.array(c, dtype=complex)
    while c.size > 1 and c[-1] == 0:
        c = c[:-1]
    return c


def _deg(c: np.ndarray) -> int:
    c = _trim(c)
    return -1 if c.size == 1 and c[0] == 0 else c.size - 1


def split_AB(p: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """A = (p + p̄)/2 and B = (p - p̄)/(2i), as real coefficient arrays."""
    p = as_coeffs(p)
    return p.real.copy(), p.imag.copy()


def _polish(c: np.ndarray, z: complex, steps: int = 6) -> complex:
    d = npoly.polyder(c)
    for _ in range(steps):
        fd = npoly.polyval(z, d)
        if fd == 0:
            break
        step = npoly.polyval(z, c) / fd
        z = z - step
        if abs(step) <= 1e-16 * max(1.0, abs(z)):
            break
    return z


def roots(c: Any) -> np.ndarray:
    """Companion-matrix roots refined by Newton steps."""
    c = _trim(as_coeffs(c))
    if c.size <= 1:
        return np.zeros(0, dtype=complex)
    return np.array([_polish(c, z) for z in npoly.polyroots(c)], dtype=complex)


def check_stable_1d(p: Any) -> np.ndarray:
    """Validate monic and zero-free on the closed upper half-plane; return p."""
    p = _trim(as_coeffs(p))
    if _deg(p) < 1:
        raise ValueError("p must have degree at least 1")
    if abs(p[-1] - 1) > 1e-12:
        raise ValueError("p must be monic")
    for z in roots(p):
        if z.imag >= -ROOT_TOL * max(1.0, abs(z)):
            raise NotStable1D(f"root {z} of p is not in the open lower half-plane")
    return p


def _real_simple_roots(c: np.ndarray) -> np.ndarray:
    c = _trim(c.astype(complex))
    if _deg(c) < 1:
        return np.zeros(0)
    rs = roots(c)
    scale = max(1.0, float(np.max(np.abs(rs))))
    if np.any(np.abs(rs.imag) > 1e-7 * scale):
        raise NotStable1D("pencil polynomial has non-real roots")
    out = np.sort(rs.real)
    if out.size > 1 and np.min(np.diff(out)) <= 1e-9 * scale:
        raise NotStable1D("pencil polynomial has a repeated root")
    return out


def _floats(values: Any) -> tuple[float, ...]:
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class QuadratureData:
    t: float
    nodes: tuple[float, ...]
    weights: tuple[float, ...]
    derivs: tuple[float, ...]      # (A' + tB')(a_j)
    B_values: tuple[float, ...]    # B(a_j)

    @property
    def M(self) -> int:
        return len(self.nodes)

    def to_json(self) -> dict[str, Any]:
        return {"t": self.t, "nodes": list(self.nodes), "weights": list(self.weights)}


def quadrature(p_poly: Any, t: float = 0.0) -> QuadratureData:
    """Nodes a_j(t) (roots of A + tB) and weights 1/(B(a_j)(A' + tB')(a_j))."""
    p = check_stable_1d(p_poly)
    A, B = split_AB(p)
    F = npoly.polyadd(A, t * B)
    nodes = _real_simple_roots(F)
    if nodes.size != _deg(p):
        raise NotStable1D("A + tB does not have the full number of real roots")
    dF = npoly.polyder(F)
    derivs = npoly.polyval(nodes, dF).real
    Bv = npoly.polyval(nodes, B).real
    weights = 1.0 / (Bv * derivs)
    if np.any(weights <= 0):
        raise NotStable1D("non-positive quadrature weight")
    return QuadratureData(float(t), _floats(nodes), _floats(weights), _floats(derivs), _floats(Bv))


# ---------------------------------------------------------------------------
# Integrals over the real line with respect to dy/pi
# ---------------------------------------------------------------------------

def _radius(p: np.ndarray, points: Sequence[float]) -> float:
    r = float(np.max(np.abs(roots(p)))) if _deg(p) > 0 else 1.0
    extra = max((abs(v) for v in points), default=0.0)
    return 2.0 * (1.0 + max(r, extra))


def _quad(f, a: float, b: float, **kw) -> float:
    val, err = integrate.quad(f, a, b, limit=400, epsabs=0.0, epsrel=1e-12, **kw)
    if not math.isfinite(val) or err > 1e-7 * max(abs(val), 1e-280):
        raise IntegrationFailure(f"quadrature error {err:.3g} for value {val:.6g}")
    return val


def lp_integral(num: Any, den: Any, power: float, interval: tuple[float, float] | None = None,
                points: Sequence[float] = ()) -> float:
    """Integral of |num/den|^power dy/pi over R (or a finite interval)."""
    q = _trim(as_coeffs(num))
    p = _trim(as_coeffs(den))
    if _deg(q) < 0:
        return 0.0

    def f(y: float) -> float:
        return abs(npoly.polyval(y, q) / npoly.polyval(y, p)) ** power

    if interval is not None:
        lo, hi = interval
        pts = [v for v in points if lo < v < hi]
        return _quad(f, lo, hi, points=pts or None) / math.pi
    d, M = _deg(q), _deg(p)
    alpha = power * (M - d) - 2
    if alpha <= -1:
        return math.inf
    R = _radius(p, points)
    pts = [v for v in points if -R < v < R]
    middle = _quad(f, -R, R, points=pts or None)
    qrev, prev = q[::-1], p[::-1]
    tails = 0.0
    for sign in (1.0, -1.0):
        def g(s: float, sign: float = sign) -> float:
            z = sign * s
            return abs(npoly.polyval(z, qrev) / npoly.polyval(z, prev)) ** power
        tails += _quad(g, 0.0, 1.0 / R, weight="alg", wvar=(alpha, 0.0))
    return (middle + tails) / math.pi


def lp_norm(num: Any, den: Any, power: float, **kw) -> float:
    if math.isinf(power):
        return sup_norm(num, den)
    return lp_integral(num, den, power, **kw) ** (1.0 / power)


def sup_norm(num: Any, den: Any) -> float:
    """sup over R of |num/den| for deg num <= deg den."""
    q = _trim(as_coeffs(num))
    p = _trim(as_coeffs(den))
    R = _radius(p, [])
    ys = np.linspace(-4 * R, 4 * R, 8001)
    vals = np.abs(npoly.polyval(ys, q) / npoly.polyval(ys, p))
    k = int(np.argmax(vals))
    best = float(vals[k])
    lo, hi = ys[max(k - 1, 0)], ys[min(k + 1, ys.size - 1)]
    res = optimize.minimize_scalar(lambda y: -abs(npoly.polyval(y, q) / npoly.polyval(y, p)),
                                   bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-12})
    best = max(best, float(-res.fun))
    if _deg(q) == _deg(p):
        best = max(best, abs(q[-1] / p[-1]))
    return best


# ---------------------------------------------------------------------------
# Identities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ParsevalResult:
    ok: bool
    integral: float
    weighted_sum: float
    relative_error: float

    def to_json(self) -> dict[str, Any]:
        return {"ok": self.ok, "integral": self.integral, "sum": self.weighted_sum,
                "relative_error": self.relative_error}


def quadrature_sum(Q: Any, qd: QuadratureData, power: float = 2.0) -> float:
    q = as_coeffs(Q)
    vals = np.abs(npoly.polyval(np.array(qd.nodes), q)) ** power
    return float(np.sum(vals * np.array(qd.weights)))


def parseval_check(Q: Any, p_poly: Any, t: float = 0.0, tol: float = 1e-8) -> ParsevalResult:
    """Compare the integral of |Q/p|^2 dy/pi with the quadrature sum."""
    p = check_stable_1d(p_poly)
    q = as_coeffs(Q)
    if _deg(q) >= _deg(p):
        raise ValueError("deg Q must be smaller than deg p")
    qd = quadrature(p, t)
    s = quadrature_sum(q, qd)
    integral = lp_integral(q, p, 2.0, points=qd.nodes)
    diff = abs(integral - s)
    return ParsevalResult(diff <= tol * (1 + abs(s)), integral, s, diff / max(abs(s), 1e-300))


def _pencil(p: np.ndarray, t: float) -> np.ndarray:
    A, B = split_AB(p)
    return npoly.polyadd(A, t * B)


def _node_quotient(F: np.ndarray, a: float) -> np.ndarray:
    quo, _ = npoly.polydiv(F, np.array([-a, 1.0]))
    return quo


def representation_check(Q: Any, p_poly: Any, t: float = 0.0,
                         sample_points: Sequence[complex] = (-2.0, -0.5, 0.0, 0.7, 1.5, 1j)) -> float:
    """Max |Q(y) - sum_j Q(a_j)/(A'+tB')(a_j) * (A+tB)(y)/(y-a_j)| over the samples."""
    p = check_stable_1d(p_poly)
    q = as_coeffs(Q)
    if _deg(q) >= _deg(p):
        raise ValueError("deg Q must be smaller than deg p")
    qd = quadrature(p, t)
    F = _pencil(p, t)
    worst = 0.0
    for y in sample_points:
        total = 0j
        for a, d in zip(qd.nodes, qd.derivs):
            total += npoly.polyval(a, q) / d * npoly.polyval(y, _node_quotient(F, a))
        worst = max(worst, abs(npoly.polyval(y, q) - total))
    return float(worst)


def interlacing_check(p_poly: Any, t: float = 0.0, grid: int = 801) -> bool:
    """Zeros of A + tB and of B are real, simple and strictly interlace; BA' - AB' > 0."""
    p = check_stable_1d(p_poly)
    A, B = split_AB(p)
    F = npoly.polyadd(A, t * B)
    zf = _real_simple_roots(F)
    zb = _real_simple_roots(B) if _deg(B) >= 1 else np.zeros(0)
    if zf.size != _deg(p):
        return False
    merged = sorted([(v, "F") for v in zf] + [(v, "B") for v in zb])
    for (v1, k1), (v2, k2) in zip(merged, merged[1:]):
        if k1 == k2 or abs(v1 - v2) <= 1e-12 * max(1.0, abs(v1)):
            return False
    R = _radius(p, [])
    ys = np.concatenate([np.linspace(-R, R, grid), zf, zb])
    W = npoly.polysub(npoly.polymul(B, npoly.polyder(A)), npoly.polymul(A, npoly.polyder(B)))
    return bool(np.all(npoly.polyval(ys, W) > 0))


def kernel_eval(p_poly: Any, y: complex, eta: complex) -> complex:
    """Reproducing kernel K(y, eta) of the polynomials of degree < M in L^2(dy/(pi |p|^2))."""
    p = _trim(as_coeffs(p_poly))
    pb = np.conj(p)
    w = complex(np.conj(eta))
    if abs(y - w) > 1e-7 * max(1.0, abs(y)):
        num = npoly.polyval(y, p) * npoly.polyval(w, pb) - npoly.polyval(y, pb) * npoly.polyval(w, p)
        return complex(num / (-2j * (y - w)))
    dp, dpb = npoly.polyder(p), npoly.polyder(pb)
    num = npoly.polyval(w, dp) * npoly.polyval(w, pb) - npoly.polyval(w, dpb) * npoly.polyval(w, p)
    return complex(num / (-2j))


# ---------------------------------------------------------------------------
# Sampling inequalities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SamplingConstants:
    """I_j(t, r) = || (A+tB)/((y - a_j) p) ||_{L^r(dy/pi)} for the needed exponents."""

    exponent: float
    I: tuple[float, ...]
    I_dual: tuple[float, ...]


@dataclass(frozen=True)
class SamplingReport:
    exponent: float
    t: float
    constants: SamplingConstants
    upper_lhs: float
    upper_rhs: float
    lower_lhs: float | None
    lower_rhs: float | None

    @property
    def upper_ok(self) -> bool:
        return self.upper_lhs <= self.upper_rhs * (1 + 1e-9) + 1e-14

    @property
    def lower_ok(self) -> bool:
        if self.lower_lhs is None:
            return True
        return self.lower_lhs <= self.lower_rhs * (1 + 1e-9) + 1e-14

    @property
    def ok(self) -> bool:
        return self.upper_ok and self.lower_ok

    def to_json(self) -> dict[str, Any]:
        return {"exponent": self.exponent, "t": self.t, "ok": self.ok,
                "upper": [self.upper_lhs, self.upper_rhs],
                "lower": None if self.lower_lhs is None else [self.lower_lhs, self.lower_rhs],
                "I": list(self.constants.I), "I_dual": list(self.constants.I_dual)}


def sampling_bounds_check(Q: Any, p_poly: Any, exponent: float, t: float = 0.0,
                          delta: float = 1.0) -> SamplingReport:
    """Evaluate both sides of the L^r sampling inequalities (r = exponent).

    For 1 < r < infinity the constants are M^(1/r') and the B/(A'+tB')
    weighted sum; for r = 1 the local integrals over (-delta, delta) enter.
    """
    r = float(exponent)
    p = check_stable_1d(p_poly)
    q = as_coeffs(Q)
    M = _deg(p)
    if _deg(q) >= M:
        raise ValueError("deg Q must be smaller than deg p")
    qd = quadrature(p, t)
    F = _pencil(p, t)
    quots = [_node_quotient(F, a) for a in qd.nodes]
    Qa = np.abs(npoly.polyval(np.array(qd.nodes), q))
    D = np.abs(np.array(qd.derivs))
    Bv = np.abs(np.array(qd.B_values))
    if r > 1:
        rp = r / (r - 1)
        I = np.array([lp_norm(g, p, r) for g in quots])
        Id = np.array([lp_norm(g, p, rp) for g in quots])
        norm = lp_norm(q, p, r, points=qd.nodes)
        S = float(np.sum((Qa / D) ** r * I ** r) ** (1 / r))
        C = float(np.sum((Bv / D) ** r * I ** r * Id ** r) ** (1 / r))
        return SamplingReport(r, float(t), SamplingConstants(r, _floats(I), _floats(Id)),
                              norm, M ** (1 / rp) * S, S, norm * C)
    if r != 1:
        raise ValueError("exponent must be at least 1")
    Idelta = np.array([lp_integral(g, p, 1.0, interval=(-delta, delta), points=qd.nodes)
                       for g in quots])
    Iinf = np.array([sup_norm(g, p) for g in quots])
    local = lp_integral(q, p, 1.0, interval=(-delta, delta), points=qd.nodes)
    S = float(np.sum(Qa / D * Idelta))
    lower_lhs = lower_rhs = None
    if _deg(q) <= M - 2:
        total = lp_integral(q, p, 1.0, points=qd.nodes)
        lower_lhs = S
        lower_rhs = total * float(np.sum(Bv / D * Iinf * Idelta))
    return SamplingReport(1.0, float(t), SamplingConstants(1.0, _floats(Idelta), _floats(Iinf)),
                          local, S, lower_lhs, lower_rhs)


def random_stable(rng: np.random.Generator, degree: int) -> np.ndarray:
    """Monic polynomial with roots drawn from the open lower half-plane."""
    rs = rng.normal(size=degree) - 1j * (0.2 + rng.exponential(size=degree))
    return npoly.polyfromroots(rs).astype(complex)


__all__ = [
    "ParsevalResult", "QuadratureData", "SamplingConstants", "SamplingReport", "as_coeffs",
    "check_stable_1d", "interlacing_check", "kernel_eval", "lp_integral", "lp_norm",
    "parseval_check", "quadrature", "quadrature_sum", "random_stable",
    "representation_check", "roots", "sampling_bounds_check", "split_AB", "sup_norm",
]
