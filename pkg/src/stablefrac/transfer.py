"""Cayley transfer from the bidisk to the bi-upper half-plane.

The map x -> z = (1 + ix)/(1 - ix) sends the upper half-plane onto the unit
disk and 0 onto 1.  A polynomial P(z, w) of bidegree (n, m) becomes the
polynomial (1 - ix)^n (1 - iy)^m P(z(x), w(y)), and the cleared factors do
not vanish near x = y = 0, so local integrability at (1, 1) is unchanged.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Any

from .algebra import BiPoly, GaussianRational
from .integrability import MembershipReport, is_in_Lp
from .localmodel import LocalModel, extract_local_model

_I = GaussianRational(0, 1)


@dataclass(frozen=True)
class TransferResult:
    P_halfplane: BiPoly
    bidegree: tuple[int, int]
    unit_factor_note: str

    def to_json(self) -> dict[str, Any]:
        return {"P_halfplane": str(self.P_halfplane), "bidegree": list(self.bidegree),
                "unit_factor": self.unit_factor_note}


def _powers(base: BiPoly, n: int) -> list[BiPoly]:
    out = [BiPoly.const(1)]
    for _ in range(n):
        out.append(out[-1] * base)
    return out


def _transfer(P: BiPoly, n: int, m: int) -> BiPoly:
    x, y = BiPoly.x(), BiPoly.y()
    px_plus, px_minus = _powers(1 + x.scale(_I), n), _powers(1 - x.scale(_I), n)
    py_plus, py_minus = _powers(1 + y.scale(_I), m), _powers(1 - y.scale(_I), m)
    out = BiPoly()
    for (a, b), c in P.items():
        out = out + (px_plus[a] * px_minus[n - a] * py_plus[b] * py_minus[m - b]).scale(c)
    return out


def torus_to_halfplane(P_disk: BiPoly, center: tuple[int, int] = (1, 1)) -> TransferResult:
    """Exact transfer of P(z, w) to half-plane coordinates centred at (z, w) = (1, 1).

    Other torus points are reached by rotating z and w before calling.
    """
    if tuple(center) != (1, 1):
        raise ValueError("only the point (1, 1) is supported; rotate the variables first")
    if P_disk.evaluate(1, 1) != 0:
        warnings.warn("P(1, 1) != 0, so the transferred polynomial is a unit at the origin",
                      stacklevel=2)
    n, m = P_disk.deg_x, P_disk.deg_y
    note = f"multiplied by (1-ix)^{n} (1-iy)^{m}, which is non-vanishing near the origin"
    return TransferResult(_transfer(P_disk, n, m), (n, m), note)


def analyze_disk(P_disk: BiPoly, Q_disk: BiPoly, p: Any) -> MembershipReport:
    """Decide local L^p membership of Q/P at (1, 1) on the bidisk.

    Q is transferred with its own bidegree; the two clearing factors differ
    by a unit near the point, which does not affect integrability.
    """
    P_half = torus_to_halfplane(P_disk).P_halfplane
    Q_half = _transfer(Q_disk, Q_disk.deg_x, Q_disk.deg_y)
    model: LocalModel = extract_local_model(P_half)
    return is_in_Lp(Q_half, model, p)


__all__ = ["TransferResult", "analyze_disk", "torus_to_halfplane"]
