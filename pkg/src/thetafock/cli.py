"""Command-line interface: ``thetafock <command> [options]``.

Exit codes: 0 success, 1 a check or computation failed, 2 usage or
configuration error.
"""
from __future__ import annotations

import argparse
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .basis import NORM_VARIANTS, BasisFunction, basis_eval, basis_eval_log, log_norm_squared, norm_squared_printed
from .errors import ConfigError, DimensionError, DomainError, ThetaFockError
from .expansion import Expansion, catalog_function, expand, reconstruct
from .geometry import BasisIndex, MultiIndex, Point, SpaceConfig
from .kernel import calibrate_kernel, kernel_closed, kernel_series, kernel_truncation
from .quadrature import build_grid, gram_matrix
from .basis import index_window
from .theta import ThetaArgs, theta_eval
from .verify import report_discrepancies, verify_all

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def parse_complex(text: str) -> complex:
    """'1.5', '0.3+0.2j', '1-2i' or 'RE,IM'."""
    s = text.strip().replace(" ", "")
    if "," in s:
        parts = s.split(",")
        if len(parts) != 2:
            raise UsageError(f"expected RE,IM but got {text!r}")
        try:
            return complex(float(parts[0]), float(parts[1]))
        except ValueError:
            raise UsageError(f"cannot parse complex number {text!r}") from None
    s = s.replace("i", "j")
    try:
        return complex(s)
    except ValueError:
        raise UsageError(f"cannot parse complex number {text!r}") from None


def parse_point(text: str) -> Point:
    """'Z' or 'Z;Z2,Z3,...' with complex entries such as 0.3+0.2j."""
    head, _, tail = text.partition(";")
    zp = [parse_complex(t) for t in tail.split(",")] if tail.strip() else []
    return Point(parse_complex(head), tuple(zp))


def parse_k(text: str | None) -> MultiIndex:
    if text is None or not text.strip():
        return MultiIndex(())
    try:
        return MultiIndex(int(v) for v in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad multi-index {text!r}: {exc}") from None


def _load_config(args) -> SpaceConfig:
    cfg = SpaceConfig.load(args.config) if args.config else SpaceConfig()
    if args.seed is not None:
        try:
            cfg = cfg.replace(seed=int(args.seed, 16))
        except ValueError:
            raise UsageError(f"--seed expects a hexadecimal integer, got {args.seed!r}") from None
    return cfg


def _index(cfg: SpaceConfig, n: int, k: MultiIndex) -> BasisIndex:
    if cfg.g == 1 and k == ():
        return BasisIndex(n, k)
    if len(k) != cfg.g - 1:
        raise DimensionError(f"--k needs {cfg.g - 1} entries for g={cfg.g}, got {len(k)}")
    return BasisIndex(n, k)


def _flat_table(d: dict, prefix: str = "") -> str:
    lines = []
    for key, val in d.items():
        name = f"{prefix}{key}"
        if isinstance(val, dict):
            lines.append(_flat_table(val, name + "."))
        else:
            lines.append(f"{name:28s} {val}")
    return "\n".join(lines)


def _emit(args, payload: dict, table: str | None = None):
    if args.format == "table":
        text = (table if table is not None else _flat_table(payload)) + "\n"
    else:
        text = json.dumps(payload, sort_keys=True, indent=2, allow_nan=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_theta(args) -> int:
    targs = ThetaArgs(args.alpha, args.beta, parse_complex(args.z), parse_complex(args.tau))
    res = theta_eval(targs, args.tol, full_output=True)
    _emit(args, res.to_dict())
    return EXIT_OK


def cmd_basis_eval(args) -> int:
    cfg = _load_config(args)
    b = BasisFunction(cfg, _index(cfg, args.n, parse_k(args.k)))
    u = parse_point(args.point).check(cfg)
    log_mod, phase = basis_eval_log(b, u)
    try:
        val = basis_eval(b, u)
        re, im = val.real, val.imag
    except OverflowError:
        re = im = None
    _emit(args, {"re": re, "im": im, "log_modulus": log_mod, "phase": phase})
    return EXIT_OK


def cmd_norm(args) -> int:
    cfg = _load_config(args)
    idx = _index(cfg, args.n, parse_k(args.k))
    out = {"canonical": math.exp(log_norm_squared(cfg, idx))}
    for variant in NORM_VARIANTS:
        # lemma22 only states the k = 0 case
        out[variant] = None if variant == "lemma22" and idx.k.degree else norm_squared_printed(cfg, idx, variant)
    _emit(args, out)
    return EXIT_OK


def cmd_gram(args) -> int:
    cfg = _load_config(args)
    indices = index_window(cfg, args.n_window, args.k_window)
    G = gram_matrix(build_grid(cfg.replace(n_max=max(cfg.n_max, args.n_window),
                                           k_max=max(cfg.k_max, args.k_window))), indices)
    off = G - np.diag(np.diag(G))
    summary = {
        "size": len(indices),
        "max_offdiag": float(np.max(np.abs(off))),
        "max_diag_err": float(np.max(np.abs(np.diag(G) - 1))),
    }
    if args.csv:
        buf = io.StringIO()
        labels = [f"n={i.n} k={','.join(map(str, i.k))}" for i in indices]
        buf.write(",".join(["index"] + [f'"{s}"' for s in labels]) + "\n")
        for lab, row in zip(labels, G):
            buf.write(",".join([f'"{lab}"'] + [repr(complex(v)) for v in row]) + "\n")
        Path(args.csv).write_text(buf.getvalue())
        summary["csv"] = args.csv
    _emit(args, summary)
    return EXIT_OK


def cmd_kernel_eval(args) -> int:
    cfg = _load_config(args)
    u = parse_point(args.u).check(cfg)
    v = parse_point(args.v).check(cfg)
    if args.method == "series":
        N, Kdeg = kernel_truncation(cfg, u, v)
        val = kernel_series(cfg, u, v, N, Kdeg)
        trunc = {"N": N, "Kdeg": Kdeg}
    else:
        spec = calibrate_kernel(cfg)
        val = kernel_closed(spec, u, v)
        trunc = {"theta_tol": cfg.theta_tol}
    _emit(args, {"re": val.real, "im": val.imag, "method": args.method, "trunc": trunc})
    return EXIT_OK


def cmd_kernel_check(args) -> int:
    cfg = _load_config(args)
    spec = calibrate_kernel(cfg, probes=args.probes)
    _emit(args, spec.to_dict())
    return EXIT_OK


def _read_expansion(cfg: SpaceConfig, source: str) -> Expansion:
    path = Path(source)
    if path.suffix == ".json" or path.exists():
        try:
            return Expansion.load(cfg, path)
        except (OSError, json.JSONDecodeError, KeyError, TypeError) as exc:
            raise UsageError(f"cannot read expansion {source}: {exc}") from None
    try:
        return catalog_function(cfg, source)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_expand(args) -> int:
    cfg = _load_config(args)
    f = _read_expansion(cfg, args.input)
    e = expand(cfg, f)
    text = json.dumps(e.to_dict(), sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def cmd_reconstruct(args) -> int:
    cfg = _load_config(args)
    e = _read_expansion(cfg, args.coeffs)
    if not isinstance(e, Expansion):
        raise UsageError("--coeffs must name an expansion JSON file")
    u = parse_point(args.point).check(cfg)
    val = reconstruct(e, u)
    _emit(args, {"re": val.real, "im": val.imag})
    return EXIT_OK


def cmd_verify_all(args) -> int:
    cfg = _load_config(args)
    rep = verify_all(cfg, workers=args.workers)
    if args.format == "table":
        text = rep.to_table()
    else:
        text = rep.to_json()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    for c in rep.checks:
        if "error" in c.details:
            print(f"thetafock: {c.name}: {c.details['error']}", file=sys.stderr)
    if rep.error:
        print(f"thetafock: {rep.error}", file=sys.stderr)
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_report(args) -> int:
    cfg = _load_config(args)
    rep = report_discrepancies(cfg)
    if args.format == "table":
        text = rep.to_table()
    else:
        text = json.dumps({"config": cfg.to_dict(), "seed": hex(rep.seed), "calibration": rep.calibration},
                          sort_keys=True, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON space configuration (defaults: g=2, nu=1, alpha=0.3)")
    common.add_argument("--seed", metavar="HEX", help="override the configured seed")
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json", help="JSON output (default)")
    fmt.add_argument("--table", dest="format", action="store_const", const="table", help="human-readable output")
    common.set_defaults(format="json")
    common.add_argument("--out", metavar="PATH", help="write the output to a file")

    p = argparse.ArgumentParser(prog="thetafock", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("theta", parents=[common], help="evaluate the shifted theta series")
    s.add_argument("--alpha", type=float, default=0.0)
    s.add_argument("--beta", type=float, default=0.0)
    s.add_argument("--z", default="0,0", help="RE,IM")
    s.add_argument("--tau", default="0,1", help="RE,IM with IM > 0")
    s.add_argument("--tol", type=float, default=1e-14)
    s.set_defaults(func=cmd_theta)

    s = sub.add_parser("basis-eval", parents=[common], help="evaluate e_{n,k} at a point")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", default="", help="K2,K3,... (empty for g=1)")
    s.add_argument("--point", required=True, help="Z;Z2,... e.g. '0.3+0.1j;2'")
    s.set_defaults(func=cmd_basis_eval)

    s = sub.add_parser("norm", parents=[common], help="squared norm of e_{n,k}, canonical and printed variants")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--k", default="")
    s.set_defaults(func=cmd_norm)

    s = sub.add_parser("gram", parents=[common], help="quadrature Gram matrix of the normalized basis")
    s.add_argument("--n-window", type=int, default=2)
    s.add_argument("--k-window", type=int, default=2)
    s.add_argument("--csv", metavar="PATH", help="write the matrix as CSV")
    s.set_defaults(func=cmd_gram)

    s = sub.add_parser("kernel-eval", parents=[common], help="evaluate the reproducing kernel K(u, v)")
    s.add_argument("--u", required=True)
    s.add_argument("--v", required=True)
    s.add_argument("--method", choices=("series", "closed"), default="closed")
    s.set_defaults(func=cmd_kernel_eval)

    s = sub.add_parser("kernel-check", parents=[common], help="calibrate the theta closed form against the series")
    s.add_argument("--probes", type=int, default=50)
    s.set_defaults(func=cmd_kernel_check)

    s = sub.add_parser("expand", parents=[common], help="coefficients a_{n,k} of a function")
    s.add_argument("--input", required=True,
                   help="expansion JSON file or catalog name: gaussian, zero, basis:N:K2,..., random:SEED:TERMS")
    s.set_defaults(func=cmd_expand)

    s = sub.add_parser("reconstruct", parents=[common], help="evaluate an expansion at a point")
    s.add_argument("--coeffs", required=True)
    s.add_argument("--point", required=True)
    s.set_defaults(func=cmd_reconstruct)

    s = sub.add_parser("verify-all", parents=[common], help="run the full acceptance suite")
    s.add_argument("--workers", type=int, default=1)
    s.set_defaults(func=cmd_verify_all)

    s = sub.add_parser("report", parents=[common], help="printed versus resolved constants")
    s.set_defaults(func=cmd_report)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, ConfigError, DimensionError, DomainError) as exc:
        print(f"thetafock: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ThetaFockError as exc:
        print(f"thetafock: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except ValueError as exc:
        print(f"thetafock: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
