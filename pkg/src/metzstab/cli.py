"""Command-line interface.

Matrix results go to stdout in the package text formats (12 significant
digits); one-line human summaries go to stderr so results stay pipeable.
``--json`` switches stdout to a single schema-versioned JSON document.

Exit codes: 0 success, 2 precondition or input violation, 3 iteration
budget exhausted.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import bench, core, family, formats, gen, infnorm, lss, maxnorm, sign
from .errors import IterationLimitError, PreconditionError

SCHEMA = "metzstab.result/1"
_SIGN_CHARS = {-1: "-", 0: "0", 1: "+"}


def _read_source(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _mat(a) -> list[list[float]]:
    return [[float(x) for x in row] for row in np.asarray(a)]


def _sign_rows(m: sign.SignMatrix) -> list[list[str]]:
    return [[_SIGN_CHARS[int(x)] for x in row] for row in m.entries]


def _emit_json(payload: dict) -> None:
    payload = {"schema": SCHEMA, **payload}
    json.dump(payload, sys.stdout)
    sys.stdout.write("\n")


def _summary(text: str) -> None:
    print(text, file=sys.stderr)


def _norm_for(args, allowed: tuple[str, ...], default: str) -> str:
    norm = args.norm or default
    if norm not in allowed:
        raise PreconditionError(
            f"--norm {norm} is not applicable to {args.command} (allowed: {', '.join(allowed)})")
    return norm


def _maybe_transposed(args, arr: np.ndarray, norm: str) -> np.ndarray:
    return arr.T.copy() if norm == "one" else arr


def _cmd_eig(args) -> int:
    if args.norm:
        raise PreconditionError("--norm is not applicable to eig")
    arr = formats.read_matrix(_read_source(args.matrix))
    pair = core.selected_leading_eigenpair(
        arr, tol=args.tol or core.DEFAULT_TOL,
        max_iter=args.max_iter or core.DEFAULT_MAX_ITER)
    if args.json:
        _emit_json({"command": "eig", "value": pair.value,
                    "vector": [float(x) for x in pair.vector],
                    "iterations": pair.iterations, "residual": pair.residual})
    else:
        print(f"{pair.value:.12g}")
        print(" ".join(f"{x:.12g}" for x in pair.vector))
        _summary(f"abscissa = {pair.value:.12g}  iterations = {pair.iterations}  "
                 f"residual = {pair.residual:.3e}")
    return 0


def _stab_common(args, result: core.StabilizationResult, command: str,
                 norm: str, level: float) -> int:
    matrix = result.matrix.T if norm == "one" else result.matrix
    if args.json:
        _emit_json({"command": command, "norm": norm,
                    "tau_star": float(result.tau_star), "matrix": _mat(matrix),
                    "iterations": int(result.iterations),
                    "residual": abs(float(result.abscissa) - level),
                    "abscissa": float(result.abscissa),
                    "trace": [[float(t), float(e)] for t, e in result.trace]})
    else:
        sys.stdout.write(formats.write_matrix(matrix))
        _summary(f"tau_star = {result.tau_star:.12g}  iterations = {result.iterations}  "
                 f"abscissa = {result.abscissa:.12g}")
    return 0


def _destab_common(args, result: core.DestabilizationResult, command: str,
                   norm: str, level: float) -> int:
    matrix = result.matrix.T if norm == "one" else result.matrix
    check = core.spectral_abscissa(result.matrix)
    axis = "row" if norm == "one" else "column"
    if args.json:
        payload = {"command": command, "norm": norm,
                   "tau_star": float(result.tau_star), "matrix": _mat(matrix),
                   "iterations": 0, "residual": abs(check - level)}
        if result.column is not None:
            payload["index"] = int(result.column)
            payload["axis"] = axis
        _emit_json(payload)
    else:
        sys.stdout.write(formats.write_matrix(matrix))
        where = "" if result.column is None else f"  {axis} = {result.column}"
        _summary(f"tau_star = {result.tau_star:.12g}{where}")
    return 0


def _cmd_destab_max(args) -> int:
    _norm_for(args, ("max",), "max")
    arr = formats.read_matrix(_read_source(args.matrix))
    return _destab_common(args, maxnorm.closest_unstable_max(arr),
                          "destab-max", "max", 0.0)


def _cmd_stab_max(args) -> int:
    _norm_for(args, ("max",), "max")
    arr = formats.read_matrix(_read_source(args.matrix))
    result = maxnorm.closest_stable_max(
        arr, tol=args.tol or core.DEFAULT_TOL,
        eig_max_iter=args.max_iter or core.DEFAULT_MAX_ITER)
    return _stab_common(args, result, "stab-max", "max", 0.0)


def _cmd_destab_inf(args) -> int:
    norm = _norm_for(args, ("inf", "one"), "inf")
    arr = _maybe_transposed(args, formats.read_matrix(_read_source(args.matrix)), norm)
    return _destab_common(args, infnorm.closest_unstable_inf_hurwitz(arr),
                          "destab-inf", norm, 0.0)


def _cmd_stab_inf(args) -> int:
    norm = _norm_for(args, ("inf", "one"), "inf")
    arr = _maybe_transposed(args, formats.read_matrix(_read_source(args.matrix)), norm)
    result = infnorm.closest_stable_inf_hurwitz(
        arr, tol=args.tol or core.DEFAULT_TOL,
        max_outer=args.max_iter or 200)
    return _stab_common(args, result, "stab-inf", norm, 0.0)


def _cmd_destab_schur(args) -> int:
    norm = _norm_for(args, ("inf", "one"), "inf")
    arr = _maybe_transposed(args, formats.read_matrix(_read_source(args.matrix)), norm)
    result = infnorm.closest_unstable_inf_schur(arr, level=args.level)
    return _destab_common(args, result, "destab-schur", norm, args.level)


def _cmd_stab_schur(args) -> int:
    norm = _norm_for(args, ("inf", "one"), "inf")
    arr = _maybe_transposed(args, formats.read_matrix(_read_source(args.matrix)), norm)
    result = infnorm.closest_stable_inf_schur(
        arr, allow_metzler=args.allow_metzler,
        tol=args.tol or core.DEFAULT_TOL, max_outer=args.max_iter or 200)
    return _stab_common(args, result, "stab-schur", norm, 1.0)


def _cmd_opt_family(args) -> int:
    if args.norm:
        raise PreconditionError("--norm is not applicable to opt-family")
    fam = formats.read_family(_read_source(args.family))
    kwargs = {}
    if args.tol:
        kwargs["eig_tol"] = args.tol
    if args.max_iter:
        kwargs["max_iter"] = args.max_iter
    if args.direction == "max" and not args.no_patch:
        out = family.optimize_with_irreducibility_patch(fam, "max", **kwargs)
    else:
        out = family.selective_greedy(fam, args.direction, **kwargs)
    if args.json:
        _emit_json({"command": "opt-family", "direction": args.direction,
                    "abscissa": float(out.abscissa), "matrix": _mat(out.matrix),
                    "row_choices": [int(c) for c in out.row_choices],
                    "iterations": int(out.iterations),
                    "reducible": bool(out.reducibility_flag),
                    "eigenvector": [float(x) for x in out.eigenvector]})
    else:
        sys.stdout.write(formats.write_matrix(out.matrix))
        _summary(f"abscissa = {out.abscissa:.12g}  iterations = {out.iterations}  "
                 f"choices = {list(out.row_choices)}  reducible = {out.reducibility_flag}")
    return 0


def _cmd_sign_stab(args) -> int:
    m = formats.read_sign_matrix(_read_source(args.matrix))
    out = sign.closest_stable_sign(m)
    if args.json:
        _emit_json({"command": "sign-stab", "k_star": int(out.k_star),
                    "abscissa": float(out.abscissa),
                    "sign_matrix": _sign_rows(out.sign_matrix),
                    "evaluated": [[int(k), float(e)] for k, e in out.evaluated]})
    else:
        sys.stdout.write(formats.write_sign_matrix(out.sign_matrix))
        _summary(f"k_star = {out.k_star}  abscissa = {out.abscissa:.12g}")
    return 0


def _cmd_lss_check(args) -> int:
    system = formats.read_switching_system(_read_source(args.system))
    per_mode = [core.leading_eigenpair_with_fallback(m).value for m in system.modes]
    hull = lss.hull_max_abscissa(system, resolution=args.resolution)
    verdict = bool(hull.abscissa < 0.0) if system.dim == 2 else None
    if args.json:
        _emit_json({"command": "lss-check",
                    "mode_abscissas": [float(x) for x in per_mode],
                    "hull_abscissa": float(hull.abscissa),
                    "hull_weights": [float(w) for w in hull.weights],
                    "stable": verdict})
    else:
        for k, value in enumerate(per_mode):
            print(f"mode {k}: abscissa = {value:.12g}")
        print(f"hull max abscissa = {hull.abscissa:.12g} at weights "
              + " ".join(f"{w:.12g}" for w in hull.weights))
        if verdict is None:
            print("verdict: hull stability is sufficient only in dimension 2")
        else:
            print(f"verdict: {'stable' if verdict else 'not stable'} under arbitrary switching")
    return 0


def _cmd_lss_stab_2d(args) -> int:
    system = formats.read_switching_system(_read_source(args.system))
    out = lss.stabilize_2d_lss(system, resolution=args.resolution)
    if args.json:
        _emit_json({"command": "lss-stab-2d",
                    "modes": [_mat(m) for m in out.system.modes],
                    "mode_taus": [float(t) for t in out.mode_taus],
                    "iterations": int(out.iterations),
                    "hull_abscissa": float(out.hull.abscissa),
                    "hull_weights": [float(w) for w in out.hull.weights]})
    else:
        sys.stdout.write(formats.write_switching_system(out.system))
        _summary(f"mode_taus = {[round(t, 9) for t in out.mode_taus]}  "
                 f"hull abscissa = {out.hull.abscissa:.12g}")
    return 0


def _cmd_lss_stab_sign(args) -> int:
    system = formats.read_switching_system(_read_source(args.system))
    out = lss.stabilize_lss_by_signs(system)
    if args.json:
        _emit_json({"command": "lss-stab-sign",
                    "modes": [_mat(m) for m in out.system.modes],
                    "k_star": int(out.k_star),
                    "mode_budgets": [int(b) for b in out.mode_budgets],
                    "abscissa": float(out.abscissa),
                    "acyclic": bool(out.acyclic),
                    "stable_sign": _sign_rows(out.stable_sign)})
    else:
        sys.stdout.write(formats.write_switching_system(out.system))
        _summary(f"k_star = {out.k_star}  mode_budgets = {list(out.mode_budgets)}  "
                 f"abscissa = {out.abscissa:.12g}  acyclic = {out.acyclic}")
    return 0


def _density_percent(args):
    if not args.density:
        return None
    lo, hi = args.density
    if not 1.0 <= lo <= hi <= 100.0:
        raise PreconditionError(
            f"density bounds are percentages and must satisfy 1 <= lo <= hi <= 100, "
            f"got ({lo:g}, {hi:g})")
    return lo / 100.0, hi / 100.0


def _cmd_gen(args) -> int:
    density = _density_percent(args)
    fam = gen.generate_family(args.dim, args.count, kind=args.kind,
                              density=density, seed=args.seed)
    text = formats.write_family(fam)
    if args.output and args.output != "-":
        Path(args.output).write_text(text)
        _summary(f"wrote family to {args.output}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_bench(args) -> int:
    density = _density_percent(args)
    rows = bench.run_bench(ops=args.op, dims=args.dim, counts=args.count,
                           kind=args.kind, density=density, trials=args.trials,
                           seed=args.seed or 0, workers=args.workers)
    if args.csv:
        with open(args.csv, "w", newline="") as handle:
            bench.write_csv(rows, handle)
        _summary(f"wrote CSV to {args.csv}")
    if args.json:
        _emit_json({"command": "bench", "rows": rows})
    else:
        sys.stdout.write(bench.format_table(rows))
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=None,
                        help="convergence tolerance (op-specific default)")
    common.add_argument("--max-iter", type=int, default=None,
                        help="iteration budget (op-specific default)")
    common.add_argument("--seed", type=int, default=None, help="RNG seed")
    common.add_argument("--norm", choices=("max", "inf", "one"), default=None,
                        help="norm variant where applicable")
    common.add_argument("--json", action="store_true",
                        help="emit a JSON document on stdout")

    parser = argparse.ArgumentParser(
        prog="metzstab",
        description="Closest (un)stable Metzler/nonnegative matrices, family "
                    "optimization, sign and switching-system stabilization.")
    subs = parser.add_subparsers(dest="command", required=True)

    def sub(name, func, help_text, **kwargs):
        p = subs.add_parser(name, parents=[common], help=help_text, **kwargs)
        p.set_defaults(func=func)
        return p

    p = sub("eig", _cmd_eig, "selected leading eigenpair of a Metzler matrix")
    p.add_argument("matrix", help="matrix file or - for stdin")

    p = sub("destab-max", _cmd_destab_max, "closest unstable matrix, max norm")
    p.add_argument("matrix")
    p = sub("stab-max", _cmd_stab_max, "closest stable matrix, max norm")
    p.add_argument("matrix")

    p = sub("destab-inf", _cmd_destab_inf, "closest unstable matrix, l-inf norm")
    p.add_argument("matrix")
    p = sub("stab-inf", _cmd_stab_inf, "closest stable matrix, l-inf norm")
    p.add_argument("matrix")

    p = sub("destab-schur", _cmd_destab_schur, "closest matrix with rho >= level, l-inf norm")
    p.add_argument("matrix")
    p.add_argument("--level", type=float, default=1.0,
                   help="target spectral radius level (default 1)")
    p = sub("stab-schur", _cmd_stab_schur, "closest Schur-stable matrix, l-inf norm")
    p.add_argument("matrix")
    p.add_argument("--allow-metzler", action="store_true",
                   help="allow Metzler results with abscissa 1 instead of nonnegative")

    p = sub("opt-family", _cmd_opt_family, "optimize the abscissa over a product family")
    p.add_argument("family", help="family file or - for stdin")
    p.add_argument("--direction", choices=("max", "min"), default="max")
    p.add_argument("--no-patch", action="store_true",
                   help="skip the irreducibility patch for maximization")

    p = sub("sign-stab", _cmd_sign_stab, "closest weakly stable sign matrix")
    p.add_argument("matrix", help="sign matrix file or - for stdin")

    p = sub("lss-check", _cmd_lss_check, "hull stability check for a switching system")
    p.add_argument("system", help="system file or - for stdin")
    p.add_argument("--resolution", type=int, default=None,
                   help="simplex grid resolution for the hull scan")
    p = sub("lss-stab-2d", _cmd_lss_stab_2d, "stabilize a planar switching system")
    p.add_argument("system")
    p.add_argument("--resolution", type=int, default=None,
                   help="simplex grid resolution for the hull scan")
    p = sub("lss-stab-sign", _cmd_lss_stab_sign, "stabilize a switching system by sign cuts")
    p.add_argument("system")

    p = sub("gen", _cmd_gen, "generate a random product family")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--kind", choices=gen.KINDS, default="full")
    p.add_argument("--density", type=float, nargs=2, metavar=("LO", "HI"),
                   help="per-row density bounds in percent (e.g. 9 15)")
    p.add_argument("-o", "--output", default=None, help="output file (default stdout)")

    p = sub("bench", _cmd_bench, "benchmark iteration counts on random instances")
    p.add_argument("--op", action="append", choices=bench.OPS, required=True)
    p.add_argument("--dim", action="append", type=int, required=True)
    p.add_argument("--count", action="append", type=int, default=None)
    p.add_argument("--kind", choices=gen.KINDS, default="full")
    p.add_argument("--density", type=float, nargs=2, metavar=("LO", "HI"))
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--csv", default=None, help="also write results to a CSV file")
    p.add_argument("--workers", type=int, default=1)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "count", None) is None and args.command == "bench":
        args.count = [50]
    try:
        return args.func(args)
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except IterationLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
