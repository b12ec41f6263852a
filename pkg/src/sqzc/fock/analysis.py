"""Observables of cavity 2 from full Fock-space steady states."""
import logging
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..errors import MomentUndefinedWarning, NoBracketError
from ..meanfield import optimum_detuning
from .liouvillian import build_liouvillian
from .operators import HilbertConfig, build_collapse, build_hamiltonian, build_operators
from .states import (
    min_variance_fock,
    moment_error,
    number_distribution,
    partial_trace,
    quadrature_variance_fock,
    single_mode_moments,
)
from .steady import steady_state

__all__ = [
    "FockResult",
    "solve_fock",
    "FockOptimum",
    "fock_optimum_detuning",
    "TruncationReport",
    "truncation_report",
    "TAIL_LEVELS",
    "SHIFT_LIMIT",
]

logger = logging.getLogger(__name__)

#: number of top Fock levels counted as "tail" population
TAIL_LEVELS = 5
#: relative shift (and absolute tail mass) above which truncation is flagged
SHIFT_LIMIT = 0.01

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class FockResult:
    params: object
    config: HilbertConfig
    variant: str
    state: object = field(repr=False)
    rho2: object = field(repr=False)
    mean: complex
    n_bar: float
    aa: complex
    var_p: float
    theta_min: float
    var_min: float
    moment_error: float
    residual: float

    @property
    def distribution(self):
        return number_distribution(self.rho2)


def solve_fock(params, config, variant="full", *, method="auto", tol=1e-8, rho0=None, **kw):
    """Steady state of the cascade and the cavity-2 diagnostics."""
    ops = build_operators(config)
    L = build_liouvillian(build_hamiltonian(params, config, variant, ops),
                          build_collapse(params, config, variant, ops))
    state = steady_state(L, method, tol=tol, rho0=rho0, **kw)
    rho2 = partial_trace(state, "cavity2")
    mean, n_bar, aa = single_mode_moments(rho2)
    theta, vmin = min_variance_fock(rho2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", MomentUndefinedWarning)
        err = moment_error(rho2)
    return FockResult(
        params=params, config=config, variant=variant, state=state, rho2=rho2,
        mean=mean, n_bar=n_bar, aa=aa, var_p=quadrature_variance_fock(rho2),
        theta_min=theta, var_min=vmin, moment_error=err,
        residual=L.residual(state.matrix),
    )


@dataclass(frozen=True, eq=False)
class FockOptimum:
    delta12_opt: float
    var_min_opt: float
    result: FockResult = field(repr=False)
    evaluations: tuple = field(default=(), repr=False)


def fock_optimum_detuning(params, config, variant="full", *, center=None, half_width=0.4,
                          points=7, xtol=0.005, **solve_kw):
    """Bare detuning minimising the Fock-tier ``var_min``.

    The scan is centred on the Gaussian-tier optimum unless ``center`` is
    given; each solve is warm-started from the previous state.

    Raises
    ------
    NoBracketError
        If the best scan point lies on the edge of the window.
    """
    if center is None:
        center = optimum_detuning(params).delta12_opt
    grid = np.linspace(center - half_width, center + half_width, points)
    cache = {}
    last = [None]

    def evaluate(d):
        d = float(d)
        if d not in cache:
            rho0 = last[0].state.matrix if last[0] is not None else None
            res = solve_fock(params.replace(delta12=d), config, variant, rho0=rho0, **solve_kw)
            logger.info("fock delta12=%.6f var_min=%.6f", d, res.var_min)
            cache[d] = res
            last[0] = res
        return cache[d].var_min

    values = [evaluate(d) for d in grid]
    k = int(np.argmin(values))
    if k == 0 or k == points - 1:
        raise NoBracketError(f"Fock-tier minimum at window edge delta12={grid[k]:.6g}")
    a, b = grid[k - 1], grid[k + 1]
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = evaluate(c), evaluate(d)
    while b - a > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = evaluate(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = evaluate(d)
    best = min(cache, key=lambda x: cache[x].var_min)
    evals = tuple(sorted((x, r.var_min) for x, r in cache.items()))
    return FockOptimum(best, cache[best].var_min, cache[best], evals)


@dataclass(frozen=True)
class TruncationReport:
    n2: int
    n2_reduced: int
    n_bar: tuple
    var_min: tuple
    tail_mass: tuple
    shifts: dict
    converged: bool


def _tail(p):
    # never let the "tail" reach down to the low-lying levels of a tiny space
    return float(p[-min(TAIL_LEVELS, len(p) // 2):].sum())


def _relative(a, b):
    scale = max(abs(a), abs(b))
    return 0.0 if scale == 0 else abs(a - b) / scale


def truncation_report(params, config, variant="full", *, reduce_by=10, reference=None, **solve_kw):
    """Compare cavity-2 observables at ``n2`` and ``n2 - reduce_by``.

    ``n_bar`` and ``var_min`` shifts are relative; the tail-mass shift is
    the absolute change in population of the top ``TAIL_LEVELS`` levels.
    ``reference`` may carry an existing :class:`FockResult` at ``config``.
    """
    small_n2 = max(2, config.n2 - reduce_by)
    small = HilbertConfig(config.n1, small_n2, config.include_qubit)
    big = reference if reference is not None else solve_fock(params, config, variant, **solve_kw)
    low = solve_fock(params, small, variant, **solve_kw)
    tails = (_tail(big.distribution), _tail(low.distribution))
    shifts = {
        "n_bar": _relative(big.n_bar, low.n_bar),
        "var_min": _relative(big.var_min, low.var_min),
        "tail_mass": abs(tails[0] - tails[1]),
    }
    converged = all(v <= SHIFT_LIMIT for v in shifts.values())
    return TruncationReport(
        n2=config.n2, n2_reduced=small_n2,
        n_bar=(big.n_bar, low.n_bar), var_min=(big.var_min, low.var_min),
        tail_mass=tails, shifts=shifts, converged=converged,
    )
