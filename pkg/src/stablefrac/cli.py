"""Command-line interface: ``stablefrac <command> [options]``.

Every command prints one JSON document with sorted keys.  Rationals appear as
``"a/b"`` strings and the infinite exponent as ``"inf"``.  Exit status is 0 on
success, 2 when a computation is inconclusive and 3 on bad input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from .algebra import BiPoly, format_rational
from .errors import Inconclusive, StableFracError
from .integrability import (INF, Exponent, format_exponent, is_in_Lp, lp_threshold,
                            dim_Ip_quotient, parse_exponent)
from .localmodel import LocalModel, extract_local_model
from .parser import parse_expression

EXIT_OK = 0
EXIT_INCONCLUSIVE = 2
EXIT_INPUT = 3


class InputError(Exception):
    """Malformed command-line input."""


@dataclass
class AnalysisRequest:
    model: LocalModel | None = None
    P: BiPoly | None = None
    disk: BiPoly | None = None
    Q: BiPoly | None = None
    ps: list[Exponent] = field(default_factory=list)
    t: Fraction | None = None
    seed: int = 0


def _clean(obj: Any) -> Any:
    """Make a report JSON-safe: non-finite floats become strings."""
    if isinstance(obj, float):
        if math.isnan(obj):
            return "nan"
        if math.isinf(obj):
            return "inf" if obj > 0 else "-inf"
        return obj
    if isinstance(obj, Fraction):
        return format_rational(obj)
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(_clean(obj), sort_keys=True, ensure_ascii=False)


def load_model(text: str) -> LocalModel:
    """Model from inline JSON or from a path to a JSON file."""
    stripped = text.strip()
    if not stripped.startswith("{"):
        path = Path(text)
        if not path.is_file():
            raise InputError(f"model file not found: {text}")
        stripped = path.read_text()
    try:
        return LocalModel.from_json(json.loads(stripped))
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise InputError(f"malformed model JSON: {exc}") from exc


def _exponents(values: Sequence[str] | None) -> list[Exponent]:
    out = []
    for v in values or []:
        for part in v.split(","):
            if part.strip():
                try:
                    out.append(parse_exponent(part.strip()))
                except (ValueError, ZeroDivisionError) as exc:
                    raise InputError(f"bad exponent {part!r}") from exc
    for p in out:
        if p != INF and p < 1:
            raise InputError("exponents must be at least 1")
    return out


def _request(args: argparse.Namespace) -> AnalysisRequest:
    req = AnalysisRequest(seed=args.seed)
    if getattr(args, "model", None):
        req.model = load_model(args.model)
    if getattr(args, "P", None):
        req.P = parse_expression(args.P)
    if getattr(args, "disk", None):
        req.disk = parse_expression(args.disk)
    if getattr(args, "Q", None):
        req.Q = parse_expression(args.Q)
    req.ps = _exponents(getattr(args, "p", None))
    t = getattr(args, "t", None)
    if t is not None:
        try:
            req.t = Fraction(t)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"bad parameter t {t!r}") from exc
    return req


def _model_of(req: AnalysisRequest) -> LocalModel:
    if req.model is not None:
        return req.model
    if req.P is not None:
        return extract_local_model(req.P)
    if req.disk is not None:
        from .transfer import torus_to_halfplane
        return extract_local_model(torus_to_halfplane(req.disk).P_halfplane)
    raise InputError("one of --model, --P or --disk is required")


def _numerator(req: AnalysisRequest) -> BiPoly:
    if req.Q is None:
        raise InputError("--Q is required")
    if req.disk is not None and req.model is None and req.P is None:
        from .transfer import _transfer
        return _transfer(req.Q, req.Q.deg_x, req.Q.deg_y)
    return req.Q


def _need_p(req: AnalysisRequest) -> list[Exponent]:
    if not req.ps:
        raise InputError("--p is required")
    return req.ps


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_analyze(req: AnalysisRequest) -> Any:
    m = _model_of(req)
    Q = _numerator(req)
    rng = lp_threshold(Q, m)
    return {"model": m.to_json(), "threshold": rng.to_json(),
            "results": [is_in_Lp(Q, m, p).to_json() for p in _need_p(req)]}


def cmd_threshold(req: AnalysisRequest) -> Any:
    return lp_threshold(_numerator(req), _model_of(req)).to_json()


def cmd_dims(req: AnalysisRequest) -> Any:
    m = _model_of(req)
    dims = [{"p": format_exponent(p), "dimension": dim_Ip_quotient(m, p)} for p in _need_p(req)]
    return dims[0] if len(dims) == 1 else dims


def cmd_basis(req: AnalysisRequest) -> Any:
    from .quotient import integrability_basis
    m = _model_of(req)
    return [integrability_basis(m, p, req.t, seed=req.seed).to_json() for p in _need_p(req)]


def cmd_proper_t(req: AnalysisRequest) -> Any:
    from .branches import find_proper_t, is_proper
    m = _model_of(req)
    if req.t is not None:
        res = is_proper(m, req.t)
        out = res.to_json()
        out["proper"] = bool(res)
        return out
    _t, cert = find_proper_t(m, seed=req.seed)
    out = cert.to_json()
    out["proper"] = True
    return out


def cmd_verify_numeric(req: AnalysisRequest) -> Any:
    from .numverify import integrate_local
    m = _model_of(req)
    Q = _numerator(req)
    out = []
    for p in _need_p(req):
        if p == INF:
            raise InputError("the numerical oracle handles finite exponents only")
        rep = integrate_local(Q, m, p).to_json()
        rep["p"] = format_exponent(p)
        rep["symbolic"] = is_in_Lp(Q, m, p).verdict
        out.append(rep)
    return out


def cmd_quadrature_check(req: AnalysisRequest) -> Any:
    from .onevar import parseval_check
    if req.P is None or req.Q is None:
        raise InputError("--P and --Q (one-variable polynomials in y) are required")
    for name, poly in (("P", req.P), ("Q", req.Q)):
        if poly.deg_x > 0:
            raise InputError(f"--{name} must not involve x")
    t = float(req.t) if req.t is not None else 0.0
    return parseval_check(req.Q, req.P, t).to_json()


def cmd_transfer(req: AnalysisRequest) -> Any:
    from .transfer import analyze_disk, torus_to_halfplane
    if req.disk is None:
        raise InputError("--disk is required")
    out: dict[str, Any] = torus_to_halfplane(req.disk).to_json()
    if req.Q is not None and req.ps:
        out["results"] = [analyze_disk(req.disk, req.Q, p).to_json() for p in req.ps]
    return out


def _acceptance_path() -> Path:
    return Path(__file__).resolve().parents[2] / "tests" / "test_acceptance.py"


def cmd_selftest(req: AnalysisRequest) -> int:
    import pytest
    path = _acceptance_path()
    if not path.is_file():
        raise InputError(f"acceptance suite not found at {path}")
    return int(pytest.main(["-q", "-s", str(path)]))


COMMANDS: dict[str, Callable[[AnalysisRequest], Any]] = {
    "analyze": cmd_analyze,
    "threshold": cmd_threshold,
    "dims": cmd_dims,
    "basis": cmd_basis,
    "proper-t": cmd_proper_t,
    "verify-numeric": cmd_verify_numeric,
    "quadrature-check": cmd_quadrature_check,
    "transfer": cmd_transfer,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stablefrac", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in [*COMMANDS, "selftest"]:
        sp = sub.add_parser(name)
        sp.add_argument("--seed", type=int, default=0)
        if name == "selftest":
            continue
        sp.add_argument("--model", help="model JSON or path to a JSON file")
        sp.add_argument("--P", help="denominator expression in x, y")
        sp.add_argument("--disk", help="denominator expression in z, w on the bidisk")
        sp.add_argument("--Q", help="numerator expression")
        sp.add_argument("--p", action="append", help="exponent(s): rationals or 'inf'")
        sp.add_argument("--t", help="pencil parameter (rational)")
    return parser


def run(argv: Sequence[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            return cmd_selftest(AnalysisRequest(seed=args.seed))
        result = COMMANDS[args.command](_request(args))
    except Inconclusive as exc:
        print(dumps({"error": "inconclusive", "message": str(exc)}), file=out)
        return EXIT_INCONCLUSIVE
    except (InputError, SyntaxError, ValueError, StableFracError) as exc:
        print(dumps({"error": type(exc).__name__, "message": str(exc)}), file=out)
        return EXIT_INPUT
    print(dumps(result), file=out)
    return EXIT_OK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
