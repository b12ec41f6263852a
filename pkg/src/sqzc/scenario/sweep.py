"""Parameter sweeps over the Gaussian and Fock tiers."""
import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from ..effective import reduce
from ..errors import AboveThresholdError, SolverError
from ..fock.analysis import fock_optimum_detuning, solve_fock
from ..meanfield import optimum_detuning, quadrature_variance, self_consistent_solve

__all__ = ["SweepResult", "run_sweep", "evaluate_point", "grid_points",
           "GAUSSIAN_COLUMNS", "FOCK_COLUMNS"]

logger = logging.getLogger(__name__)

GAUSSIAN_COLUMNS = (
    "delta12", "delta_tilde", "var_min", "theta_min", "var_p", "n_bar",
    "eps_re", "eps_im", "stable", "iterations", "residual",
)
FOCK_COLUMNS = (
    "fock_delta12", "fock_var_min", "fock_theta_min", "fock_var_p", "fock_n_bar",
    "moment_error", "fock_residual",
)


@dataclass
class SweepResult:
    """Per-point records in deterministic grid order.

    Rows are ordered variant-major, then by the first sweep axis, then by
    the second.
    """

    axes: tuple
    columns: tuple
    rows: list = field(default_factory=list)

    @property
    def failures(self):
        return [r for r in self.rows if r.get("status") == "error"]

    def column(self, name, variant=None):
        return [r[name] for r in self.rows if variant is None or r["variant"] == variant]

    @property
    def variants(self):
        seen = []
        for r in self.rows:
            if r["variant"] not in seen:
                seen.append(r["variant"])
        return seen


def columns_for(cfg):
    cols = ["variant"] + [ax.variable for ax in cfg.sweep]
    if cfg.solver.tier in ("gaussian", "both"):
        cols += [c for c in GAUSSIAN_COLUMNS if c not in cols]
    if cfg.solver.tier in ("fock", "both"):
        cols += FOCK_COLUMNS
    cols += ["status", "message"]
    return tuple(cols)


def grid_points(cfg):
    """``(variant, coords)`` pairs in output order."""
    axes = [ax.values() for ax in cfg.sweep]
    out = []
    for v in cfg.variant_list():
        for combo in itertools.product(*axes):
            out.append((v, dict(zip([ax.variable for ax in cfg.sweep], combo))))
    return out


def _gaussian(cfg, params, delta_tilde, rec):
    s = cfg.solver
    kw = dict(damping=s.damping, tol=s.tolerance, max_iter=s.max_iter)
    if s.optimize_detuning:
        opt = optimum_detuning(params, search_window=s.window, **kw)
        sol = opt.solution
        params = params.replace(delta12=opt.delta12_opt)
    else:
        sol = self_consistent_solve(params, delta_tilde=delta_tilde, **kw)
        if delta_tilde is not None:
            # bare detuning that would produce this effective detuning
            eff = reduce(params)
            offset = eff.delta12_base - params.delta12
            params = params.replace(
                delta12=delta_tilde - 2.0 * eff.zeta * sol.V.n_bar(2) - offset)
    rec.update(
        delta12=params.delta12, delta_tilde=sol.delta_tilde, var_min=sol.var_min(),
        theta_min=sol.theta_min(), var_p=quadrature_variance(sol.V),
        n_bar=sol.V.n_bar(2), eps_re=sol.eps_converged.real, eps_im=sol.eps_converged.imag,
        stable=True, iterations=sol.iterations, residual=sol.residual,
    )
    return params


def _fock(cfg, variant, params, rec, gaussian_done):
    s = cfg.solver
    config = cfg.variant_truncation(variant)
    if s.optimize_detuning and not gaussian_done:
        params = params.replace(delta12=optimum_detuning(
            params, search_window=s.window, damping=s.damping, tol=s.tolerance,
            max_iter=s.max_iter).delta12_opt)
    kw = dict(method=s.method, tol=s.fock_tolerance)
    if s.optimize_detuning and s.fock_refine:
        res = fock_optimum_detuning(params, config, variant.hamiltonian,
                                    center=params.delta12, **kw).result
    else:
        res = solve_fock(params, config, variant.hamiltonian, **kw)
    rec.update(
        fock_delta12=res.params.delta12, fock_var_min=res.var_min,
        fock_theta_min=res.theta_min, fock_var_p=res.var_p, fock_n_bar=res.n_bar,
        moment_error=res.moment_error, fock_residual=res.residual,
    )


def evaluate_point(cfg, variant, coords):
    """One record for ``variant`` at the sweep coordinates ``coords``."""
    cols = columns_for(cfg)
    rec = {c: math.nan for c in cols}
    rec.update(variant=variant.label, status="ok", message="", **coords)
    params = cfg.variant_circuit(variant)
    delta_tilde = None
    for ax in cfg.sweep:
        if ax.parameter == "delta_tilde":
            delta_tilde = coords[ax.variable]
        else:
            params = params.replace(**{ax.parameter: coords[ax.variable]})
    tier = cfg.solver.tier
    try:
        gaussian_done = False
        if tier in ("gaussian", "both"):
            params = _gaussian(cfg, params, delta_tilde, rec)
            gaussian_done = True
        if tier in ("fock", "both"):
            _fock(cfg, variant, params, rec, gaussian_done)
    except AboveThresholdError as exc:
        if "stable" in rec:
            rec["stable"] = False
        rec.update(status="unstable", message=str(exc))
    except (SolverError, ValueError) as exc:
        rec.update(status="error", message=f"{type(exc).__name__}: {exc}")
    logger.info("point %s %s -> %s", variant.label, coords, rec["status"])
    return rec


def _evaluate_packed(args):
    return evaluate_point(*args)


def run_sweep(cfg, threads=1):
    """Evaluate every grid point; ``threads > 1`` uses a process pool."""
    pts = grid_points(cfg)
    jobs = [(cfg, v, c) for v, c in pts]
    if threads > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_evaluate_packed, jobs))
    else:
        rows = [_evaluate_packed(j) for j in jobs]
    return SweepResult(tuple(cfg.sweep), columns_for(cfg), rows)
