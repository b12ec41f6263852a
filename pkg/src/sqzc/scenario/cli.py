"""Command-line entry point ``sqzc``.

Exit codes: 0 success, 2 configuration error, 3 solver error, 4 I/O error.
Failures print a one-line JSON object to stderr.
"""
import argparse
import json
import logging
import os
import sys
from pathlib import Path

from ..errors import ConfigError, SolverError
from ..fock.analysis import fock_optimum_detuning, solve_fock
from ..fock.states import partial_trace
from ..fock.storage import StorageError, load_state, save_state
from ..fock.wigner import wigner
from ..meanfield import optimum_detuning
from .config import dump_config, load_config
from .emit import distribution_table, emit_csv, emit_svg
from .recipes import RECIPES, recipe
from .sweep import run_sweep

__all__ = ["main", "run_scenario", "solve_variant", "EXIT_OK", "EXIT_CONFIG",
           "EXIT_SOLVER", "EXIT_IO"]

EXIT_OK, EXIT_CONFIG, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4
#: reference variance drawn on 1-D plots (single-amplifier limit)
AMPLIFIER_LIMIT = 0.25

logger = logging.getLogger("sqzc")


class SweepFailure(SolverError):
    pass


def solve_variant(cfg, variant):
    """Fock steady state for one variant of a scenario, detuning resolved."""
    s = cfg.solver
    params = cfg.variant_circuit(variant)
    config = cfg.variant_truncation(variant)
    kw = dict(method=s.method, tol=s.fock_tolerance)
    if s.optimize_detuning:
        params = params.replace(delta12=optimum_detuning(
            params, search_window=s.window, damping=s.damping, tol=s.tolerance,
            max_iter=s.max_iter).delta12_opt)
        if s.fock_refine:
            return fock_optimum_detuning(params, config, variant.hamiltonian,
                                         center=params.delta12, **kw).result
    return solve_fock(params, config, variant.hamiltonian, **kw)


def _summary(res):
    return {
        "delta12": res.params.delta12,
        "n_bar": res.n_bar,
        "aa_re": res.aa.real,
        "aa_im": res.aa.imag,
        "var_p": res.var_p,
        "var_min": res.var_min,
        "theta_min": res.theta_min,
        "moment_error": res.moment_error,
        "residual": res.residual,
    }


def run_scenario(cfg, out_dir=None, threads=1):
    """Run ``cfg`` and write its artifacts; returns the list of paths.

    Raises :class:`SweepFailure` after writing output if any sweep point
    hit a solver error.
    """
    out = Path(out_dir if out_dir is not None else cfg.output.path)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc.strerror}") from exc
    fmts = cfg.output.formats
    written = []

    def emit(obj, stem, **svg_kw):
        if "csv" in fmts:
            p = out / f"{stem}.csv"
            emit_csv(obj, p)
            written.append(p)
        if "svg" in fmts:
            p = out / f"{stem}.svg"
            emit_svg(obj, p, **svg_kw)
            written.append(p)

    if cfg.task == "sweep":
        result = run_sweep(cfg, threads)
        if "csv" in fmts:
            p = out / f"{cfg.name}.csv"
            emit_csv(result, p)
            written.append(p)
        if "svg" in fmts and 1 <= len(cfg.sweep) <= 2:
            ref = AMPLIFIER_LIMIT if len(cfg.sweep) == 1 else None
            if cfg.solver.tier in ("gaussian", "both") or len(cfg.sweep) == 1:
                p = out / f"{cfg.name}.svg"
                # effective-detuning maps show the P quadrature itself
                q = "var_p" if len(cfg.sweep) == 2 else "var_min"
                emit_svg(result, p, quantity=q, reference=ref)
                written.append(p)
            if cfg.solver.tier in ("fock", "both"):
                p = out / f"{cfg.name}_moment_error.svg"
                emit_svg(result, p, quantity="moment_error")
                written.append(p)
        if result.failures:
            raise SweepFailure(f"{len(result.failures)} sweep point(s) failed; see {cfg.name}.csv")
        return written

    summary = {}
    for variant in cfg.variant_list():
        res = solve_variant(cfg, variant)
        summary[variant.label] = _summary(res)
        stem = f"{cfg.name}_{variant.label}"
        if cfg.task == "wigner":
            grid = wigner(res.rho2, cfg.wigner.xmax, cfg.wigner.points)
            emit(grid, f"{stem}_wigner", title=variant.label)
        else:
            emit(distribution_table(res.rho2), f"{stem}_pn", title=variant.label)
    p = out / f"{cfg.name}_summary.json"
    p.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    written.append(p)
    return written


def _threads(args):
    env = os.environ.get("SQZC_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"SQZC_THREADS must be an integer, not {env!r}") from None
    else:
        n = args.threads
    if n < 1:
        raise ConfigError("thread count must be at least 1")
    return n


def _parse_window(text):
    try:
        lo, hi = (float(x) for x in text.split(","))
    except ValueError:
        raise ConfigError(f"--window expects 'lo,hi', got {text!r}") from None
    if not lo < hi:
        raise ConfigError("--window needs lo < hi")
    return lo, hi


def cmd_run(args):
    cfg = load_config(args.config)
    for p in run_scenario(cfg, args.out_dir, _threads(args)):
        print(p)


def cmd_recipe(args):
    cfg = recipe(args.name)
    if args.emit_config:
        dump_config(cfg, args.emit_config)
    else:
        sys.stdout.write(dump_config(cfg))
    if args.run:
        for p in run_scenario(cfg, args.out_dir, _threads(args)):
            print(p)


def cmd_fock_steady(args):
    cfg = load_config(args.config)
    variant = cfg.variant_list()[0]
    res = solve_variant(cfg, variant)
    save_state(args.state_out, res.state, res.params)
    print(json.dumps(_summary(res), sort_keys=True))


def cmd_fock_wigner(args):
    state, _ = load_state(args.state)
    rho2 = partial_trace(state, "cavity2") if len(state.dims) > 1 else state
    grid = wigner(rho2, args.xmax, args.points)
    emit_csv(grid, args.out)
    print(args.out)


def cmd_gaussian_optimum(args):
    cfg = load_config(args.config)
    params = cfg.variant_circuit(cfg.variant_list()[0])
    window = _parse_window(args.window) if args.window else cfg.solver.window
    s = cfg.solver
    opt = optimum_detuning(params, eps1=args.eps1, search_window=window,
                           damping=s.damping, tol=s.tolerance, max_iter=s.max_iter)
    print(json.dumps({
        "eps1": opt.solution.params_in.eps1_mag,
        "delta12_opt": opt.delta12_opt,
        "delta_tilde_opt": opt.delta_tilde_opt,
        "var_min_opt": opt.var_min_opt,
    }, sort_keys=True))


def build_parser():
    ap = argparse.ArgumentParser(prog="sqzc", description="Squeezed-vacuum cascade simulator")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run a JSON scenario")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("recipe", help="print or run a figure recipe")
    p.add_argument("name", choices=sorted(RECIPES))
    p.add_argument("--emit-config")
    p.add_argument("--run", action="store_true")
    p.add_argument("--out-dir")
    p.add_argument("--threads", type=int, default=1)
    p.set_defaults(func=cmd_recipe)

    fock = sub.add_parser("fock", help="full master-equation tools")
    fsub = fock.add_subparsers(dest="fock_command", required=True)
    p = fsub.add_parser("steady", help="solve and store a steady state")
    p.add_argument("--config", required=True)
    p.add_argument("--state-out", required=True)
    p.set_defaults(func=cmd_fock_steady)
    p = fsub.add_parser("wigner", help="Wigner grid of a stored state")
    p.add_argument("--state", required=True)
    p.add_argument("--xmax", type=float, default=4.0)
    p.add_argument("--points", type=int, default=201)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fock_wigner)

    gauss = sub.add_parser("gaussian", help="Gaussian-tier tools")
    gsub = gauss.add_subparsers(dest="gaussian_command", required=True)
    p = gsub.add_parser("optimum", help="optimum detuning at one pump strength")
    p.add_argument("--config", required=True)
    p.add_argument("--eps1", type=float)
    p.add_argument("--window")
    p.set_defaults(func=cmd_gaussian_optimum)
    return ap


def _fail(code, exc):
    sys.stderr.write(json.dumps({
        "error": type(exc).__name__, "message": str(exc), "exit_code": code,
    }) + "\n")
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc)
    except SolverError as exc:
        return _fail(EXIT_SOLVER, exc)
    except (OSError, StorageError) as exc:
        return _fail(EXIT_IO, exc)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
