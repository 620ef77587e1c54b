"""Regenerate tests/data/oracle_values.json from the sympy oracle.

    python3 tests/freeze_oracle_values.py > tests/data/oracle_values.json

The output is deterministic (fixed seed).  It takes about a minute.
"""

from __future__ import annotations

import json
import random
import sys
from fractions import Fraction
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

import sympy  # noqa: E402

import oracles  # noqa: E402

EXPONENTS = ["1", "5/4", "3/2", "2", "3", "5", "inf"]


def random_model(rng: random.Random, max_M: int = 3, max_L: int = 2) -> list:
    out = []
    for _ in range(rng.randint(1, max_M)):
        L = rng.randint(1, max_L)
        n = rng.randint(0, 2 * L - 1)
        q = [rng.choice([-2, -1, 0, 0, 1, 1, 2]) for _ in range(n)]
        while q and q[-1] == 0:
            q.pop()
        out.append([L, q])
    return out


def _q_text(q: list) -> str:
    return " + ".join(f"({c})*x^{k + 1}" for k, c in enumerate(q) if c) or "0"


def random_Q(rng: random.Random, model: list) -> str:
    terms = []
    for _ in range(rng.randint(1, 3)):
        a, b = rng.randint(0, 4), rng.randint(0, 2)
        c = rng.choice([-3, -1, 1, 2])
        term = f"({c})*x^{a}*y^{b}"
        if rng.random() < 0.5:
            L, q = rng.choice(model)
            term += f"*(y + {_q_text(q)})"
        terms.append(term)
    return " + ".join(terms)


def sym(text: str) -> sympy.Expr:
    return sympy.sympify(text.replace("^", "**"), locals={"x": oracles.x, "y": oracles.y})


def exponent(text: str):
    return oracles.INF if text == "inf" else Fraction(text)


def main() -> None:
    rng = random.Random(20240611)
    models = []
    for _ in range(24):
        m = random_model(rng)
        models.append({
            "model": m,
            "multiplicity": oracles.intersection_multiplicity(m),
            "colength": oracles.colength(m),
            "dims": {p: oracles.dim_Ip(m, exponent(p)) for p in EXPONENTS},
        })
    memberships = []
    for _ in range(80):
        m = random_model(rng)
        Q = random_Q(rng, m)
        p = rng.choice(EXPONENTS)
        memberships.append({"model": m, "Q": Q, "p": p,
                            "member": oracles.membership(m, sym(Q), exponent(p))})
    orders = []
    for _ in range(30):
        L = rng.randint(1, 3)
        q = [rng.choice([-1, 0, 1, 2]) for _ in range(rng.randint(0, 3))]
        Q = random_Q(rng, [[L, q]])
        n = rng.randint(1, 2 * L)
        o = oracles.order_on_datum(n, q, sym(Q))
        orders.append({"n": n, "q": q, "Q": Q, "order": "inf" if o == oracles.INF else int(o)})
    json.dump({"models": models, "memberships": memberships, "orders": orders},
              sys.stdout, indent=1, sort_keys=True)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
