"""Command line entry point: ``besov verify|norm|hankel|berezin|partition|integrate|sections``.

Exit codes: 0 verdict pass (or command succeeded), 1 verdict fail,
2 invalid input, 3 numeric non-convergence.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .holocalc import PolySeries, TruncationError, symbol_g_r
from .operators import OperatorConfig, berezin_apply, finite_section, hankel_apply
from .partition import build_partition, check_proposition1, covering_multiplicity
from .quadrature import QuadratureError, QuadratureScheme, integrate_kernel, mc_integrate
from .report import emit_report
from .spaces import MeasureConditionError, SpaceParams, besov_norm_with_error, lp_norm_with_error
from .symbols import Symbol
from .verify import ExperimentSpec, InvalidSpecError, run
from .weights import weight_from_config

EXIT_PASS, EXIT_FAIL, EXIT_INVALID, EXIT_NONCONVERGENCE = 0, 1, 2, 3


def _read_json(path) -> dict:
    text = sys.stdin.read() if str(path) == "-" else Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InvalidSpecError(f"{path}: not valid JSON ({e})") from e


def _point(text: str) -> list[complex]:
    """'0.5+0.1j,0.3' -> [0.5+0.1j, 0.3]."""
    try:
        return [complex(s.strip().replace(" ", "")) for s in text.split(",")]
    except ValueError as e:
        raise InvalidSpecError(f"cannot parse point {text!r}") from e


def _series(args, n: int) -> PolySeries:
    if args.series is not None:
        f = PolySeries.from_dict(_read_json(args.series))
    else:
        k = [int(x) for x in args.monomial.split(",")] if args.monomial else [0] * n
        f = PolySeries.monomial(k, conjugated=args.conjugated)
    if f.dim != n:
        raise InvalidSpecError(f"series has dimension {f.dim}, config has n = {n}")
    return f


def _symbol(name: str, f: PolySeries | None, n: int):
    """one | zero | phase | conj:k1,..,kn (the monomial conj(zeta)^k)."""
    if name == "one":
        return Symbol.constant(1.0, n)
    if name == "zero":
        return Symbol.constant(0.0, n)
    if name in ("phase", "real"):
        if f is None:
            raise InvalidSpecError("the phase symbol needs an input series")
        return symbol_g_r(f, name)
    if name.startswith("conj:"):
        k = [int(x) for x in name[5:].split(",")]
        if len(k) != n:
            raise InvalidSpecError(f"symbol {name!r} needs {n} indices")
        mono = PolySeries.monomial(k, conjugated=True)
        sym = Symbol(mono, 1.0, n, name=name)
        sym.degree_hint = max(k)
        return sym
    raise InvalidSpecError(f"unknown symbol {name!r}")


def _config(args) -> dict:
    cfg = _read_json(args.config) if args.config else {}
    n = int(cfg.get("n", 1))
    cfg.setdefault("n", n)
    cfg.setdefault("weight", [{"family": "power", "a": 0.0}] * n)
    return cfg


def _operator_config(cfg: dict, kind: str, symbol) -> OperatorConfig:
    n = cfg["n"]
    alpha = np.broadcast_to(np.atleast_1d(cfg.get("alpha", 0.0)), (n,))
    scheme = QuadratureScheme.from_config(n, cfg.get("quadrature"))
    return OperatorConfig(alpha, symbol, kind, scheme=scheme)


def _print(obj):
    print(json.dumps(obj, indent=2))


# -- subcommands --------------------------------------------------------------

def cmd_verify(args) -> int:
    cfg = _read_json(args.config) if args.config else {}
    spec = ExperimentSpec.from_dict(cfg, target=args.target, mode=args.mode, seed=args.seed)
    report = run(spec, threads=args.threads)
    text = emit_report(report, args.format, args.out)
    if args.out is None:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    else:
        print(f"{spec.target} {report.mode}: {report.verdict}")
    return EXIT_PASS if report.verdict == "pass" else EXIT_FAIL


def cmd_norm(args) -> int:
    cfg = _config(args)
    n = cfg["n"]
    sp = SpaceParams(float(cfg.get("p", 2.0)), weight_from_config(cfg["weight"]),
                     QuadratureScheme.from_config(n, cfg.get("quadrature")))
    f = _series(args, n)
    if args.kind == "besov":
        val, err = besov_norm_with_error(f, sp)
    else:
        val, err = lp_norm_with_error(f, sp)
    _print({"norm": args.kind, "p": sp.p, "value": val, "est_error": err})
    return EXIT_PASS


def _apply(args, kind: str) -> int:
    cfg = _config(args)
    n = cfg["n"]
    f = _series(args, n)
    op = _operator_config(cfg, kind, _symbol(args.symbol, f, n))
    apply = hankel_apply if kind == "hankel" else berezin_apply
    rows = []
    for text in args.point:
        z = _point(text)
        val, err = apply(f, op, z, with_error=True)
        rows.append({"point": text, "re": float(np.real(val)), "im": float(np.imag(val)),
                     "est_error": float(err)})
    _print(rows)
    return EXIT_PASS


def cmd_hankel(args) -> int:
    return _apply(args, "hankel")


def cmd_berezin(args) -> int:
    return _apply(args, "berezin")


def cmd_partition(args) -> int:
    part = build_partition(args.n, args.K)
    if args.check:
        rep = check_proposition1(part, args.samples)
        rep.metrics["covering_multiplicity"] = covering_multiplicity(part)
        text = emit_report(rep, "json", args.out)
        if args.out is None:
            print(text)
        return EXIT_PASS if rep.verdict == "pass" else EXIT_FAIL
    text = part.to_csv()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS


def cmd_integrate(args) -> int:
    z = _point(args.point)
    n = len(z)
    scheme = QuadratureScheme.default(n)
    val, err = integrate_kernel(scheme, args.a, args.b, z)
    out = {"a": args.a, "b": args.b, "point": args.point,
           "re": float(np.real(val)), "im": float(np.imag(val)), "est_error": float(err)}
    if args.mc:
        def integrand(zeta):
            k = 1.0
            for zj, zeta_j in zip(z, zeta):
                k = k * (1 - np.abs(zeta_j) ** 2) ** args.a * np.abs(1 - zj * np.conj(zeta_j)) ** (-args.b)
            return k
        mv, se = mc_integrate(integrand, n, args.mc, args.seed)
        out["mc"] = {"re": float(np.real(mv)), "std_error": float(se), "samples": args.mc}
    _print(out)
    return EXIT_PASS


def cmd_sections(args) -> int:
    cfg = _config(args)
    n = cfg["n"]
    op = _operator_config(cfg, args.kind, _symbol(args.symbol, None, n))
    N = [int(x) for x in args.N.split(",")]
    sec = finite_section(op, N if len(N) > 1 else N[0])
    text = sec.to_csv()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_PASS


# -- parser -------------------------------------------------------------------

def _add_series_args(p):
    p.add_argument("--config", help="JSON config with n, p, weight, alpha, quadrature")
    p.add_argument("--series", help="JSON series file (dim, degree_bound, coeffs)")
    p.add_argument("--monomial", help="multi-index k of the input z^k, e.g. 2 or 1,3")
    p.add_argument("--conjugated", action="store_true", help="use conj(z)^k instead of z^k")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="besov", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run a sufficiency or necessity experiment")
    p.add_argument("--target", required=True)
    p.add_argument("--config")
    p.add_argument("--mode", choices=("sufficiency", "necessity"))
    p.add_argument("--out")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("norm", help="Besov or L_p norm of a series")
    _add_series_args(p)
    p.add_argument("--kind", choices=("besov", "lp"), default="besov")
    p.set_defaults(func=cmd_norm)

    for name, func in (("hankel", cmd_hankel), ("berezin", cmd_berezin)):
        p = sub.add_parser(name, help=f"evaluate the {name} operator at points")
        _add_series_args(p)
        p.add_argument("--symbol", default="one", help="one | zero | phase | real | conj:k")
        p.add_argument("--point", action="append", required=True,
                       help="comma-separated complex coordinates, repeatable")
        p.set_defaults(func=func)

    p = sub.add_parser("partition", help="dyadic cells as CSV, or the comparability check")
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--K", type=int, default=4)
    p.add_argument("--check", action="store_true")
    p.add_argument("--samples", type=int, default=8)
    p.add_argument("--out")
    p.set_defaults(func=cmd_partition)

    p = sub.add_parser("integrate", help="kernel integral (1-|zeta|^2)^a |1 - z conj(zeta)|^-b")
    p.add_argument("--a", type=float, default=0.0)
    p.add_argument("--b", type=float, default=2.0)
    p.add_argument("--point", default="0")
    p.add_argument("--mc", type=int, default=0, help="also run Monte Carlo with this many samples")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_integrate)

    p = sub.add_parser("sections", help="finite-section matrix on monomials as CSV")
    p.add_argument("--config")
    p.add_argument("--kind", choices=("hankel", "berezin"), default="hankel")
    p.add_argument("--symbol", default="one", help="one | zero | conj:k")
    p.add_argument("--N", default="4", help="degree bound, comma-separated per variable")
    p.add_argument("--out")
    p.set_defaults(func=cmd_sections)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (QuadratureError, TruncationError) as e:
        print(f"error: numeric non-convergence: {e}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (InvalidSpecError, MeasureConditionError, ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
