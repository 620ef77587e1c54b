"""Exact arithmetic foundation.

Coefficients are Gaussian rationals (exact) or mpmath numbers (high-precision
mode).  Polynomials in two variables are sparse dictionaries; one-variable
germs are truncated power series whose coefficients beyond the truncation
order are *unknown*, never assumed to vanish.
"""

from __future__ import annotations

import math
import os
from fractions import Fraction
from numbers import Rational
from typing import Callable, Iterable, Iterator, Mapping, Sequence, Union

import mpmath
from mpmath import mpc, mpf

from .errors import Inconclusive, NotMonicAtOrigin, NumericInconclusive

# Numeric-mode zero certification thresholds.  A coefficient whose magnitude
# is at most ZERO_TOL is treated as zero, one at least NONZERO_TOL as nonzero,
# and anything in between is reported as uncertifiable.
ZERO_TOL = mpf("1e-30")
NONZERO_TOL = mpf("1e-24")


def working_dps() -> int:
    """Decimal digits used in high-precision mode (env STABLEFRAC_PRECISION)."""
    raw = os.environ.get("STABLEFRAC_PRECISION", "50")
    try:
        dps = int(raw)
    except ValueError:
        dps = 50
    return max(dps, 50)


# Extra digits carried internally so that cancellation in branch lifting does
# not eat into the digits needed for zero certification.
GUARD_DPS = 40


def high_precision():
    """Context manager that sets mpmath to the working precision plus guard digits."""
    return mpmath.workdps(working_dps() + GUARD_DPS)


class GaussianRational:
    """Exact complex number ``re + i*im`` with rational parts."""

    __slots__ = ("re", "im")

    re: Fraction
    im: Fraction

    def __init__(self, re: int | Fraction | str = 0, im: int | Fraction | str = 0) -> None:
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("GaussianRational is immutable")

    def __reduce__(self):
        return (GaussianRational, (self.re, self.im))

    # -- conversions -------------------------------------------------------
    @staticmethod
    def coerce(value: "Coeff") -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (int, Fraction)):
            return GaussianRational(value)
        if isinstance(value, Rational):
            return GaussianRational(Fraction(value.numerator, value.denominator))
        raise TypeError(f"cannot convert {value!r} to GaussianRational")

    def to_mpc(self) -> mpc:
        return mpc(mpf(self.re.numerator) / self.re.denominator,
                   mpf(self.im.numerator) / self.im.denominator)

    def __complex__(self) -> complex:
        return complex(float(self.re), float(self.im))

    @property
    def is_real(self) -> bool:
        return self.im == 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    # -- arithmetic --------------------------------------------------------
    def _other(self, other: object):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Fraction)):
            return GaussianRational(other)
        return None

    def __add__(self, other):
        if isinstance(other, (mpf, mpc)):
            return self.to_mpc() + other
        o = self._other(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __pos__(self) -> "GaussianRational":
        return self

    def __sub__(self, other):
        if isinstance(other, (mpf, mpc)):
            return self.to_mpc() - other
        o = self._other(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        if isinstance(other, (mpf, mpc)):
            return other - self.to_mpc()
        o = self._other(other)
        if o is None:
            return NotImplemented
        return GaussianRational(o.re - self.re, o.im - self.im)

    def __mul__(self, other):
        if isinstance(other, (mpf, mpc)):
            return self.to_mpc() * other
        o = self._other(other)
        if o is None:
            return NotImplemented
        if o.im == 0:
            return GaussianRational(self.re * o.re, self.im * o.re)
        if self.im == 0:
            return GaussianRational(self.re * o.re, self.re * o.im)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (mpf, mpc)):
            return self.to_mpc() / other
        o = self._other(other)
        if o is None:
            return NotImplemented
        if o.im == 0:
            if o.re == 0:
                raise ZeroDivisionError("division by zero Gaussian rational")
            return GaussianRational(self.re / o.re, self.im / o.re)
        den = o.re * o.re + o.im * o.im
        return GaussianRational((self.re * o.re + self.im * o.im) / den,
                                (self.im * o.re - self.re * o.im) / den)

    def __rtruediv__(self, other):
        if isinstance(other, (mpf, mpc)):
            return other / self.to_mpc()
        o = self._other(other)
        if o is None:
            return NotImplemented
        return o / self

    def __pow__(self, n: int) -> "GaussianRational":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return GaussianRational(1) / (self ** (-n))
        result = GaussianRational(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    # -- comparison --------------------------------------------------------
    def __eq__(self, other: object) -> bool:
        o = self._other(other)
        if o is None:
            if isinstance(other, complex):
                return complex(self) == other
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self) -> int:
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return bool(self.re) or bool(self.im)

    def __repr__(self) -> str:
        return f"GaussianRational({str(self.re)!r}, {str(self.im)!r})"

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return _imag_str(self.im)
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{_imag_str(abs(self.im))}"


def _imag_str(v: Fraction) -> str:
    if v == 1:
        return "i"
    if v == -1:
        return "-i"
    return f"{v}*i"


Coeff = Union[int, Fraction, GaussianRational, mpf, mpc]

I = GaussianRational(0, 1)


def is_numeric(c: object) -> bool:
    return isinstance(c, (mpf, mpc))


def is_zero(c: Coeff) -> bool:
    """Zero test: structural in exact mode, certified threshold in numeric mode."""
    if isinstance(c, (mpf, mpc)):
        mag = abs(c)
        if mag <= ZERO_TOL:
            return True
        if mag >= NONZERO_TOL:
            return False
        raise NumericInconclusive(f"coefficient of magnitude {mpmath.nstr(mag, 3)} is neither "
                                  "certifiably zero nor certifiably nonzero")
    return c == 0


def conj(c: Coeff) -> Coeff:
    if isinstance(c, GaussianRational):
        return c.conjugate()
    if isinstance(c, mpc):
        return c.conjugate()
    return c


def to_numeric(c: Coeff) -> mpf | mpc:
    if isinstance(c, (mpf, mpc)):
        return c
    if isinstance(c, GaussianRational):
        return c.to_mpc() if c.im else mpf(c.re.numerator) / c.re.denominator
    if isinstance(c, Fraction):
        return mpf(c.numerator) / c.denominator
    return mpf(c)


def to_complex(c: Coeff) -> complex:
    if isinstance(c, (mpf, mpc)):
        return complex(c)
    return complex(c)


def real_part(c: Coeff) -> Coeff:
    if isinstance(c, GaussianRational):
        return c.re
    if isinstance(c, mpc):
        return c.real
    return c


def imag_part(c: Coeff) -> Coeff:
    if isinstance(c, GaussianRational):
        return c.im
    if isinstance(c, mpc):
        return c.imag
    if isinstance(c, mpf):
        return mpf(0)
    return Fraction(0)


def as_fraction(c: Coeff) -> Fraction:
    """Exact real value of ``c``; raises ``ValueError`` for non-real or numeric input."""
    if isinstance(c, GaussianRational):
        if c.im != 0:
            raise ValueError(f"{c} is not real")
        return c.re
    if isinstance(c, (int, Fraction)):
        return Fraction(c)
    raise ValueError(f"{c!r} is not an exact rational")


def format_rational(v: Fraction | int) -> str:
    """Canonical ``a/b`` string (integers print without denominator)."""
    return str(Fraction(v))


# ---------------------------------------------------------------------------
# Bivariate polynomials
# ---------------------------------------------------------------------------

Monomial = tuple[int, int]


class BiPoly:
    """Sparse polynomial in (x, y) with Gaussian-rational coefficients.

    ``terms`` maps ``(deg_x, deg_y)`` to a nonzero coefficient.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, Coeff] | None = None) -> None:
        clean: dict[Monomial, GaussianRational] = {}
        for (i, j), c in (terms or {}).items():
            if i < 0 or j < 0:
                raise ValueError("negative exponent in BiPoly")
            g = GaussianRational.coerce(c)
            if g:
                clean[(int(i), int(j))] = g
        self._terms = clean

    @classmethod
    def _raw(cls, terms: dict[Monomial, GaussianRational]) -> "BiPoly":
        obj = cls.__new__(cls)
        obj._terms = {k: v for k, v in terms.items() if v}
        return obj

    # -- constructors ------------------------------------------------------
    @classmethod
    def const(cls, c: Coeff) -> "BiPoly":
        return cls({(0, 0): c})

    @classmethod
    def monomial(cls, i: int, j: int, c: Coeff = 1) -> "BiPoly":
        return cls({(i, j): c})

    @classmethod
    def x(cls) -> "BiPoly":
        return cls({(1, 0): 1})

    @classmethod
    def y(cls) -> "BiPoly":
        return cls({(0, 1): 1})

    @classmethod
    def from_x_poly(cls, coeffs: Sequence[Coeff]) -> "BiPoly":
        """Polynomial in x alone from ascending coefficients."""
        return cls({(k, 0): c for k, c in enumerate(coeffs)})

    # -- accessors ---------------------------------------------------------
    @property
    def terms(self) -> Mapping[Monomial, GaussianRational]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[Monomial, GaussianRational]]:
        return iter(sorted(self._terms.items()))

    def coeff(self, i: int, j: int) -> GaussianRational:
        return self._terms.get((i, j), GaussianRational(0))

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def deg_x(self) -> int:
        return max((i for i, _ in self._terms), default=-1)

    @property
    def deg_y(self) -> int:
        return max((j for _, j in self._terms), default=-1)

    @property
    def total_degree(self) -> int:
        return max((i + j for i, j in self._terms), default=-1)

    def x_order(self) -> int:
        """Largest k with x^k dividing the polynomial."""
        if not self._terms:
            raise ValueError("x_order of the zero polynomial")
        return min(i for i, _ in self._terms)

    def is_real(self) -> bool:
        return all(c.im == 0 for c in self._terms.values())

    # -- arithmetic --------------------------------------------------------
    @staticmethod
    def _lift(other: object) -> "BiPoly | None":
        if isinstance(other, BiPoly):
            return other
        if isinstance(other, (int, Fraction, GaussianRational)):
            return BiPoly.const(other)
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        out = dict(self._terms)
        for k, v in o._terms.items():
            out[k] = out[k] + v if k in out else v
        return BiPoly._raw(out)

    __radd__ = __add__

    def __neg__(self) -> "BiPoly":
        return BiPoly._raw({k: -v for k, v in self._terms.items()})

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        out: dict[Monomial, GaussianRational] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in o._terms.items():
                k = (i1 + i2, j1 + j2)
                p = c1 * c2
                out[k] = out[k] + p if k in out else p
        return BiPoly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "BiPoly":
        if not isinstance(n, int) or n < 0:
            raise ValueError("BiPoly powers must be non-negative integers")
        result = BiPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other: object) -> bool:
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self._terms == o._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def scale(self, c: Coeff) -> "BiPoly":
        g = GaussianRational.coerce(c)
        return BiPoly._raw({k: v * g for k, v in self._terms.items()})

    def map_coeffs(self, fn: Callable[[GaussianRational], Coeff]) -> "BiPoly":
        return BiPoly({k: fn(v) for k, v in self._terms.items()})

    def diff_y(self) -> "BiPoly":
        return BiPoly._raw({(i, j - 1): c * j for (i, j), c in self._terms.items() if j > 0})

    def diff_x(self) -> "BiPoly":
        return BiPoly._raw({(i - 1, j): c * i for (i, j), c in self._terms.items() if i > 0})

    def shift_x(self, k: int) -> "BiPoly":
        """Multiply by x^k (k may be negative if the division is exact)."""
        if k < 0 and self._terms and self.x_order() < -k:
            raise ValueError("x^k does not divide the polynomial")
        return BiPoly._raw({(i + k, j): c for (i, j), c in self._terms.items()})

    # -- evaluation and substitution --------------------------------------
    def y_coeffs(self) -> list[dict[int, GaussianRational]]:
        """Coefficients of y^0, y^1, ... as sparse x-polynomials."""
        out: list[dict[int, GaussianRational]] = [dict() for _ in range(self.deg_y + 1)]
        for (i, j), c in self._terms.items():
            out[j][i] = c
        return out

    def at_x0(self) -> list[GaussianRational]:
        """Dense coefficients of P(0, y) in ascending powers of y."""
        out = [GaussianRational(0)] * (self.deg_y + 1)
        for (i, j), c in self._terms.items():
            if i == 0:
                out[j] = c
        return out

    def substitute_y(self, expr: "BiPoly") -> "BiPoly":
        """Return self(x, expr(x, y))."""
        result = BiPoly()
        rows = self.y_coeffs()
        for j in range(len(rows) - 1, -1, -1):
            result = result * expr + BiPoly._raw({(i, 0): c for i, c in rows[j].items()})
        return result

    def substitute_xy(self, fx: "BiPoly", fy: "BiPoly") -> "BiPoly":
        """Return self(fx(x, y), fy(x, y))."""
        result = BiPoly()
        xp: dict[int, BiPoly] = {0: BiPoly.const(1)}
        yp: dict[int, BiPoly] = {0: BiPoly.const(1)}
        for i in range(1, self.deg_x + 1):
            xp[i] = xp[i - 1] * fx
        for j in range(1, self.deg_y + 1):
            yp[j] = yp[j - 1] * fy
        for (i, j), c in self._terms.items():
            result = result + (xp[i] * yp[j]).scale(c)
        return result

    def evaluate(self, x: Coeff, y: Coeff) -> Coeff:
        """Exact (or numeric, if inputs are numeric) value at a point."""
        total: Coeff = GaussianRational(0)
        for (i, j), c in self._terms.items():
            total = total + c * (x ** i) * (y ** j)
        return total

    def evaluate_complex(self, x: complex, y: complex) -> complex:
        total = 0j
        for (i, j), c in self._terms.items():
            total += complex(c) * x ** i * y ** j
        return total

    def compose_series(self, a: "XSeries") -> "XSeries":
        """Return the series self(x, a(x)); requires a(0) = 0 for full precision."""
        return YPolyOverXSeries.from_bipoly(self, a.prec).evaluate(a)

    def reflect(self) -> "BiPoly":
        return reflect(self)

    # -- display ------------------------------------------------------------
    def __repr__(self) -> str:
        return f"BiPoly({str(self)!r})"

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        pieces: list[str] = []
        for (i, j), c in sorted(self._terms.items(), key=lambda kv: (kv[0][0] + kv[0][1], -kv[0][1], kv[0][0])):
            mono = "*".join(
                part for part in (
                    ("x" if i == 1 else f"x^{i}") if i else "",
                    ("y" if j == 1 else f"y^{j}") if j else "",
                ) if part
            )
            if c.im == 0:
                neg = c.re < 0
                mag = str(abs(c.re))
                coef = "" if (mag == "1" and mono) else mag
            elif c.re == 0:
                neg = c.im < 0
                mag = abs(c.im)
                coef = "i" if mag == 1 else f"{mag}*i"
            else:
                neg = False
                coef = f"({c})"
            term = coef + ("*" if coef and mono else "") + mono
            if not pieces:
                pieces.append(("-" if neg else "") + term)
            else:
                pieces.append(("- " if neg else "+ ") + term)
        return " ".join(pieces)


def reflect(P: BiPoly) -> BiPoly:
    """Reflection: conjugate every coefficient of P."""
    return BiPoly._raw({k: v.conjugate() for k, v in P._terms.items()})


def real_imag_parts(P: BiPoly) -> tuple[BiPoly, BiPoly]:
    """Split P = A + iB with A, B having real coefficients."""
    A = BiPoly._raw({k: GaussianRational(v.re) for k, v in P._terms.items()})
    B = BiPoly._raw({k: GaussianRational(v.im) for k, v in P._terms.items()})
    return A, B


# ---------------------------------------------------------------------------
# Truncated series in x
# ---------------------------------------------------------------------------

def _structural_valuation(coeffs: Sequence[Coeff]) -> int:
    for k, c in enumerate(coeffs):
        if not (c == 0):
            return k
    return len(coeffs)


def _all_rational(c: Sequence[Coeff]) -> bool:
    return all(type(v) is int or type(v) is Fraction for v in c)


def _rational_convolve(a: Sequence[Coeff], b: Sequence[Coeff], va: int, vb: int,
                       n: int) -> list[Coeff]:
    """Truncated product of rational sequences via one common denominator each.

    Integer convolution avoids a gcd per multiply-add, which dominates the
    naive Fraction loop.
    """
    da = math.lcm(*(Fraction(v).denominator for v in a)) if a else 1
    db = math.lcm(*(Fraction(v).denominator for v in b)) if b else 1
    ia = [int(v * da) for v in a]
    ib = [int(v * db) for v in b]
    out = [0] * n
    for i in range(va, min(len(ia), n)):
        ai = ia[i]
        if ai == 0:
            continue
        for j in range(vb, min(len(ib), n - i)):
            bj = ib[j]
            if bj:
                out[i + j] += ai * bj
    d = da * db
    return [Fraction(v, d) if v else 0 for v in out]


class XSeries:
    """Power series in x known modulo x^prec.

    ``coeffs[k]`` is the coefficient of x^k for ``k < prec``; nothing is
    known about higher coefficients.
    """

    __slots__ = ("_c", "prec", "_num")

    def __init__(self, coeffs: Iterable[Coeff], prec: int | None = None) -> None:
        # real Gaussian rationals are stored as Fractions (much cheaper arithmetic);
        # a series with any numeric coefficient is numeric throughout
        c = [v.re if type(v) is GaussianRational and v.im == 0 else v for v in coeffs]
        num = any(is_numeric(v) for v in c)
        if num:
            c = [v if is_numeric(v) else to_numeric(v) for v in c]
        if prec is None:
            prec = len(c)
        if prec < 0:
            raise ValueError("negative truncation order")
        if len(c) < prec:
            c.extend([0] * (prec - len(c)))
        object.__setattr__(self, "_c", tuple(c[:prec]))
        object.__setattr__(self, "prec", prec)
        object.__setattr__(self, "_num", num)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("XSeries is immutable")

    def __reduce__(self):
        return (XSeries, (self._c, self.prec))

    @classmethod
    def zero(cls, prec: int) -> "XSeries":
        return cls([], prec)

    @classmethod
    def const(cls, c: Coeff, prec: int) -> "XSeries":
        return cls([c], prec)

    @classmethod
    def from_sparse(cls, terms: Mapping[int, Coeff], prec: int) -> "XSeries":
        c: list[Coeff] = [0] * prec
        for k, v in terms.items():
            if k < prec:
                c[k] = v
        return cls(c, prec)

    @property
    def coeffs(self) -> tuple[Coeff, ...]:
        return self._c

    @property
    def trunc_order(self) -> int:
        return self.prec

    @property
    def mode(self) -> str:
        return "numeric" if self._num else "exact"

    def __len__(self) -> int:
        return self.prec

    def __getitem__(self, k: int) -> Coeff:
        if k < 0:
            raise IndexError(k)
        if k >= self.prec:
            raise Inconclusive(f"coefficient x^{k} requested beyond truncation order {self.prec}")
        return self._c[k]

    # -- arithmetic ----------------------------------------------------------
    def _coerce(self, other: object) -> "XSeries | None":
        if isinstance(other, XSeries):
            return other
        if isinstance(other, (int, Fraction, GaussianRational, mpf, mpc)):
            return XSeries([other], self.prec)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = min(self.prec, o.prec)
        a, b = self._aligned(o)
        return XSeries([a[k] + b[k] for k in range(n)], n)

    __radd__ = __add__

    def __neg__(self) -> "XSeries":
        return XSeries([-c for c in self._c], self.prec)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = min(self.prec, o.prec)
        a, b = self._aligned(o)
        return XSeries([a[k] - b[k] for k in range(n)], n)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, mpf, mpc)):
            return self.scale(other)
        if not isinstance(other, XSeries):
            return NotImplemented
        va = _structural_valuation(self._c)
        vb = _structural_valuation(other._c)
        n = min(self.prec + vb, other.prec + va)
        out: list[Coeff] = [0] * n
        a, b = self._aligned(other)
        if _all_rational(a) and _all_rational(b):
            return XSeries(_rational_convolve(a, b, va, vb, n), n)
        for i in range(va, min(len(a), n)):
            ai = a[i]
            if ai == 0:
                continue
            for j in range(vb, min(len(b), n - i)):
                bj = b[j]
                if bj == 0:
                    continue
                out[i + j] = out[i + j] + ai * bj
        return XSeries(out, n)

    __rmul__ = __mul__

    def scale(self, c: Coeff) -> "XSeries":
        if self._num or is_numeric(c):
            c = to_numeric(c)
            return XSeries([c * to_numeric(v) for v in self._c], self.prec)
        return XSeries([c * v for v in self._c], self.prec)

    def _aligned(self, other: "XSeries") -> tuple[tuple[Coeff, ...], tuple[Coeff, ...]]:
        """Coefficient tuples of both operands, numeric if either one is."""
        if self._num == other._num:
            return self._c, other._c
        if self._num:
            return self._c, tuple(to_numeric(v) for v in other._c)
        return tuple(to_numeric(v) for v in self._c), other._c

    def shift(self, k: int) -> "XSeries":
        """Multiply by x^k (k >= 0)."""
        if k < 0:
            return self.unshift(-k)
        return XSeries([0] * k + list(self._c), self.prec + k)

    def unshift(self, k: int) -> "XSeries":
        """Divide by x^k; the first k coefficients must certifiably vanish."""
        if k > self.prec:
            raise Inconclusive("cannot divide by x^k beyond the truncation order")
        for c in self._c[:k]:
            if not is_zero(c):
                raise ValueError(f"x^{k} does not divide the series")
        return XSeries(self._c[k:], self.prec - k)

    def truncate(self, n: int) -> "XSeries":
        n = min(n, self.prec)
        return XSeries(self._c[:n], n)

    def with_prec(self, n: int) -> "XSeries":
        """Same known coefficients, declared truncation ``min(n, prec)``."""
        return self.truncate(n)

    def inverse(self) -> "XSeries":
        """Multiplicative inverse of a unit series."""
        if self.prec == 0:
            return XSeries([], 0)
        c0 = self._c[0]
        if is_zero(c0):
            raise ZeroDivisionError("series is not a unit")
        n = self.prec
        inv0 = 1 / c0 if not isinstance(c0, int) else Fraction(1, c0)
        out: list[Coeff] = [inv0] + [0] * (n - 1)
        a = self._c
        for k in range(1, n):
            s: Coeff = 0
            for j in range(1, k + 1):
                if a[j] == 0:
                    continue
                s = s + a[j] * out[k - j]
            out[k] = -s * inv0
        return XSeries(out, n)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, GaussianRational, mpf, mpc)):
            inv = Fraction(1, other) if isinstance(other, int) else 1 / other
            return self.scale(inv)
        if not isinstance(other, XSeries):
            return NotImplemented
        v = other.valuation()
        return self.unshift(v) * other.unshift(v).inverse()

    def derivative(self) -> "XSeries":
        if self.prec == 0:
            return self
        return XSeries([self._c[k] * k for k in range(1, self.prec)], self.prec - 1)

    def conjugate(self) -> "XSeries":
        return XSeries([conj(c) for c in self._c], self.prec)

    def to_numeric(self) -> "XSeries":
        return XSeries([to_numeric(c) for c in self._c], self.prec)

    # -- queries ------------------------------------------------------------
    def valuation(self) -> int:
        """Order of vanishing; Inconclusive when every stored coefficient vanishes."""
        for k, c in enumerate(self._c):
            if not is_zero(c):
                return k
        raise Inconclusive(f"series vanishes to its truncation order {self.prec}")

    def vanishes_to(self, k: int) -> bool:
        """True iff x^k divides the series (decided from known coefficients)."""
        for c in self._c[: min(k, self.prec)]:
            if not is_zero(c):
                return False
        if k > self.prec:
            raise Inconclusive(f"vanishing to order {k} undecidable at truncation {self.prec}")
        return True

    def is_zero_to_prec(self) -> bool:
        return all(is_zero(c) for c in self._c)

    def leading(self) -> tuple[int, Coeff]:
        v = self.valuation()
        return v, self._c[v]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, XSeries):
            return NotImplemented
        return self.prec == other.prec and self._c == other._c

    def __hash__(self) -> int:
        return hash((self._c, self.prec))

    def __repr__(self) -> str:
        return f"XSeries({list(self._c)!r}, prec={self.prec})"

    def __str__(self) -> str:
        parts = []
        for k, c in enumerate(self._c):
            if c == 0:
                continue
            cs = mpmath.nstr(c, 12) if is_numeric(c) else str(c)
            parts.append(cs if k == 0 else f"({cs})*x^{k}")
        parts.append(f"O(x^{self.prec})")
        return " + ".join(parts)


def order_of_vanishing(f: XSeries) -> int:
    """Smallest k with a nonzero coefficient; Inconclusive if none is known."""
    return f.valuation()


# ---------------------------------------------------------------------------
# Polynomials in y over truncated series
# ---------------------------------------------------------------------------

class YPolyOverXSeries:
    """Polynomial in y whose coefficients are truncated x-series."""

    __slots__ = ("_c",)

    def __init__(self, y_coeffs: Iterable[XSeries]) -> None:
        c = list(y_coeffs)
        while len(c) > 1 and all(v == 0 for v in c[-1].coeffs):
            c.pop()
        object.__setattr__(self, "_c", tuple(c))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("YPolyOverXSeries is immutable")

    @classmethod
    def from_bipoly(cls, P: BiPoly, N: int) -> "YPolyOverXSeries":
        rows = P.y_coeffs()
        if not rows:
            return cls([XSeries.zero(N)])
        return cls([XSeries.from_sparse(r, N) for r in rows])

    @classmethod
    def from_roots(cls, roots: Sequence[XSeries], N: int) -> "YPolyOverXSeries":
        """Monic product of (y - a) over the given roots."""
        result = cls([XSeries.const(1, N)])
        for a in roots:
            result = result * cls([-a, XSeries.const(1, N)])
        return result

    @classmethod
    def const(cls, c: XSeries | Coeff, N: int) -> "YPolyOverXSeries":
        if not isinstance(c, XSeries):
            c = XSeries.const(c, N)
        return cls([c])

    @property
    def y_coeffs(self) -> tuple[XSeries, ...]:
        return self._c

    @property
    def degree(self) -> int:
        if len(self._c) == 1 and all(v == 0 for v in self._c[0].coeffs):
            return -1
        return len(self._c) - 1

    @property
    def prec(self) -> int:
        return min(s.prec for s in self._c)

    def coeff(self, j: int) -> XSeries:
        if j < len(self._c):
            return self._c[j]
        return XSeries.zero(self.prec)

    def _coerce(self, other: object) -> "YPolyOverXSeries | None":
        if isinstance(other, YPolyOverXSeries):
            return other
        if isinstance(other, XSeries):
            return YPolyOverXSeries([other])
        if isinstance(other, (int, Fraction, GaussianRational, mpf, mpc)):
            return YPolyOverXSeries([XSeries.const(other, self.prec)])
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        n = max(len(self._c), len(o._c))
        return YPolyOverXSeries([self.coeff(j) + o.coeff(j) for j in range(n)])

    __radd__ = __add__

    def __neg__(self) -> "YPolyOverXSeries":
        return YPolyOverXSeries([-c for c in self._c])

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out: list[XSeries | None] = [None] * (len(self._c) + len(o._c) - 1)
        for i, a in enumerate(self._c):
            for j, b in enumerate(o._c):
                p = a * b
                out[i + j] = p if out[i + j] is None else out[i + j] + p
        return YPolyOverXSeries([v for v in out if v is not None])

    __rmul__ = __mul__

    def evaluate(self, a: XSeries) -> XSeries:
        """Horner evaluation at y = a(x)."""
        result = self._c[-1]
        for c in reversed(self._c[:-1]):
            result = result * a + c
        return result

    def diff_y(self) -> "YPolyOverXSeries":
        if len(self._c) == 1:
            return YPolyOverXSeries([XSeries.zero(self.prec)])
        return YPolyOverXSeries([self._c[j] * j for j in range(1, len(self._c))])

    def divide_linear(self, a: XSeries) -> tuple["YPolyOverXSeries", XSeries]:
        """Synthetic division by (y - a): returns (quotient, remainder = self(a))."""
        n = len(self._c)
        if n == 1:
            return YPolyOverXSeries([XSeries.zero(min(self.prec, a.prec))]), self._c[0]
        q: list[XSeries] = [self._c[-1]] * (n - 1)
        acc = self._c[-1]
        for j in range(n - 2, -1, -1):
            q[j] = acc
            acc = self._c[j] + acc * a
        return YPolyOverXSeries(q), acc

    def divmod(self, divisor: "YPolyOverXSeries") -> tuple["YPolyOverXSeries", "YPolyOverXSeries"]:
        """Division by a polynomial whose leading y-coefficient is a unit series."""
        d = divisor.degree
        if d < 0:
            raise ZeroDivisionError("division by zero polynomial")
        lead_inv = divisor._c[d].inverse()
        rem = list(self._c)
        quot: list[XSeries] = [XSeries.zero(self.prec)] * max(len(rem) - d, 1)
        for k in range(len(rem) - 1, d - 1, -1):
            factor = rem[k] * lead_inv
            quot[k - d] = factor
            for j in range(d + 1):
                rem[k - d + j] = rem[k - d + j] - factor * divisor._c[j]
        r = rem[:d] if d > 0 else [XSeries.zero(self.prec)]
        return YPolyOverXSeries(quot), YPolyOverXSeries(r)

    def truncate(self, n: int) -> "YPolyOverXSeries":
        return YPolyOverXSeries([c.truncate(n) for c in self._c])

    def is_zero_to_prec(self) -> bool:
        return all(c.is_zero_to_prec() for c in self._c)

    def to_numeric(self) -> "YPolyOverXSeries":
        return YPolyOverXSeries([c.to_numeric() for c in self._c])

    def __repr__(self) -> str:
        return f"YPolyOverXSeries({list(self._c)!r})"


def _as_ypoly(obj: "BiPoly | YPolyOverXSeries", N: int) -> YPolyOverXSeries:
    if isinstance(obj, YPolyOverXSeries):
        return obj.truncate(N)
    return YPolyOverXSeries.from_bipoly(obj, N)


def weierstrass_divide(Q: BiPoly | YPolyOverXSeries, P: BiPoly | YPolyOverXSeries,
                       N: int) -> tuple[YPolyOverXSeries, YPolyOverXSeries]:
    """Return (cofactor, remainder) with Q = cofactor*P + remainder mod x^N.

    P must be y-regular of order M at the origin with its y^M coefficient the
    top coefficient (a unit series); this covers every local model, which is
    monic in y.
    """
    Py = _as_ypoly(P, N)
    M = Py.degree
    if M < 0:
        raise NotMonicAtOrigin("divisor is zero")
    for j in range(M):
        c = Py.coeff(j)
        if c.prec and not is_zero(c[0]):
            raise NotMonicAtOrigin(f"P(0,y) has a nonzero y^{j} coefficient")
    top = Py.coeff(M)
    if top.prec == 0 or is_zero(top[0]):
        raise NotMonicAtOrigin("leading y-coefficient of P vanishes at x = 0")
    return _as_ypoly(Q, N).divmod(Py)


def weierstrass_reduce(Q: BiPoly | YPolyOverXSeries, P: BiPoly | YPolyOverXSeries,
                       N: int) -> YPolyOverXSeries:
    """Remainder Q0 of Q modulo P, deg_y Q0 < deg_y P, valid modulo x^N."""
    return weierstrass_divide(Q, P, N)[1]


def bipoly_from_ypoly(F: YPolyOverXSeries) -> BiPoly:
    """Exact polynomial from a y-polynomial with exact, finitely known coefficients."""
    terms: dict[Monomial, Coeff] = {}
    for j, s in enumerate(F.y_coeffs):
        for i, c in enumerate(s.coeffs):
            if is_numeric(c):
                raise ValueError("numeric coefficients cannot form an exact BiPoly")
            if c != 0:
                terms[(i, j)] = c
    return BiPoly(terms)


def divmod_y(Q: BiPoly, P: BiPoly) -> tuple[BiPoly, BiPoly]:
    """Exact division in y by a P whose leading y-coefficient is a nonzero constant."""
    d = P.deg_y
    if d < 0:
        raise ZeroDivisionError("division by the zero polynomial")
    lead_row = P.y_coeffs()[d]
    if set(lead_row) != {0}:
        raise NotMonicAtOrigin("leading y-coefficient of the divisor is not constant")
    lead_inv = 1 / lead_row[0]
    prow = P.y_coeffs()
    rows = Q.y_coeffs()
    quot: dict[Monomial, Coeff] = {}
    for k in range(len(rows) - 1, d - 1, -1):
        row = rows[k]
        if not row:
            continue
        factor = {i: c * lead_inv for i, c in row.items()}
        for i, c in factor.items():
            quot[(i, k - d)] = c
        for j in range(d + 1):
            target = rows[k - d + j]
            for i1, c1 in factor.items():
                for i2, c2 in prow[j].items():
                    key = i1 + i2
                    val = target.get(key, 0) - c1 * c2
                    if val == 0:
                        target.pop(key, None)
                    else:
                        target[key] = val
    rem = {(i, j): c for j, row in enumerate(rows[:d]) for i, c in row.items()}
    return BiPoly(quot), BiPoly(rem)
