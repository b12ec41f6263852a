"""Gaussian mean-field tier: complex-P drift/diffusion and self-consistency.

The phase-space variables are ordered ``(a1, a1^dag, a2, a2^dag)``.  The
stationary covariance ``V`` of the Fokker-Planck equation holds the
normal-ordered second moments, e.g. ``V[2, 2] = <a2 a2>`` and
``V[2, 3] = <a2^dag a2>``.
"""
import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics
from .effective import CircuitParams, HartreeState, hartree_drive, reduce
from .errors import (
    AboveThresholdError,
    ConvergenceError,
    NoBracketError,
    UnstableDriftError,
)

__all__ = [
    "DriftDiffusion",
    "MomentMatrix",
    "GaussianSolution",
    "StabilityReport",
    "OptimumResult",
    "build_drift_diffusion",
    "steady_covariance",
    "quadrature_variance",
    "literal_p_uncertainty",
    "min_variance",
    "self_consistent_solve",
    "stability_eigenvalues",
    "optimum_detuning",
    "squeezing_db",
]

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
#: relative margin below zero at which a drift eigenvalue counts as marginal
STABILITY_RTOL = 1e-12


@dataclass(frozen=True)
class DriftDiffusion:
    A: np.ndarray
    D: np.ndarray


@dataclass(frozen=True)
class MomentMatrix:
    V: np.ndarray

    def _idx(self, mode):
        if mode not in (1, 2):
            raise ValueError("mode must be 1 or 2")
        return 2 * (mode - 1)

    def n_bar(self, mode=2):
        i = self._idx(mode)
        return float(self.V[i, i + 1].real)

    def aa(self, mode=2):
        i = self._idx(mode)
        return complex(self.V[i, i])

    def hartree_state(self, mode=2):
        return HartreeState(max(self.n_bar(mode), 0.0), self.aa(mode))

    def invariant_error(self):
        """Largest violation of symmetry / conjugation / reality constraints."""
        V = self.V
        errs = [
            np.abs(V - V.T).max(),
            abs(V[1, 1] - np.conj(V[0, 0])),
            abs(V[3, 3] - np.conj(V[2, 2])),
            abs(V[0, 1].imag),
            abs(V[2, 3].imag),
            max(0.0, -V[0, 1].real),
            max(0.0, -V[2, 3].real),
        ]
        return float(max(errs))


@dataclass(frozen=True)
class GaussianSolution:
    params_in: CircuitParams
    eps_converged: complex
    V: MomentMatrix
    iterations: int
    residual: float
    delta_tilde: float
    kappa: float

    def var_min(self, mode=2):
        return min_variance(self.V, mode)[1]

    def theta_min(self, mode=2):
        return min_variance(self.V, mode)[0]


@dataclass(frozen=True)
class StabilityReport:
    eigenvalues: np.ndarray
    pa_unstable: bool
    cavity_unstable: bool

    @property
    def stable(self):
        return not (self.pa_unstable or self.cavity_unstable)


@dataclass(frozen=True)
class OptimumResult:
    delta12_opt: float
    var_min_opt: float
    delta_tilde_opt: float
    solution: GaussianSolution
    scan: tuple = field(default=(), repr=False)


def build_drift_diffusion(eps1, eps, delta, kappa1, kappa):
    """Drift and diffusion matrices of the cascaded two-mode system.

    Parameters
    ----------
    eps1 : complex
        Parametric pump of the amplifier cavity.
    eps : complex
        Effective (Hartree) parametric drive of the second cavity.
    delta : float
        Detuning of the second cavity in the amplifier's rotating frame.
    kappa1, kappa : float
        Linewidths; the cascade coupling is ``sqrt(kappa1 kappa)``.
    """
    if kappa1 <= 0 or kappa <= 0:
        raise ValueError("kappa1 and kappa must be positive")
    eps1 = complex(eps1)
    eps = complex(eps)
    c = -math.sqrt(kappa1 * kappa)
    A = np.array([
        [-kappa1 / 2, eps1, 0, 0],
        [eps1.conjugate(), -kappa1 / 2, 0, 0],
        [c, 0, -kappa / 2 - 1j * delta, eps],
        [0, c, eps.conjugate(), -kappa / 2 + 1j * delta],
    ], dtype=complex)
    D = np.diag([eps1, eps1.conjugate(), eps, eps.conjugate()]).astype(complex)
    return DriftDiffusion(A, D)


def stability_eigenvalues(dd):
    """Eigenvalues of the drift matrix and per-block instability flags.

    The drift matrix is block lower-triangular, so the amplifier block and
    the driven-cavity block can be judged separately.
    """
    A = dd.A
    eig = np.linalg.eigvals(A)
    # eigenvalues within rounding of the imaginary axis count as threshold
    tol = STABILITY_RTOL * max(1.0, np.abs(A).max())
    pa = np.linalg.eigvals(A[:2, :2]).real.max() >= -tol
    cav = np.linalg.eigvals(A[2:, 2:]).real.max() >= -tol
    return StabilityReport(eig, bool(pa), bool(cav))


def steady_covariance(dd):
    """Stationary moment matrix from the Lyapunov equation.

    Raises
    ------
    AboveThresholdError
        If either the amplifier or the driven cavity is at or above its
        oscillation threshold.
    """
    report = stability_eigenvalues(dd)
    if report.pa_unstable:
        raise AboveThresholdError(
            "parametric amplifier at or above threshold (|eps1| >= kappa1/2)",
            "parametric",
        )
    if report.cavity_unstable:
        raise AboveThresholdError(
            "driven cavity at or above threshold "
            "(sqrt(|eps|^2 - delta^2) >= kappa/2)",
            "cavity",
        )
    V = numerics.solve_lyapunov(dd.A, dd.D)
    V = 0.5 * (V + V.T)
    return MomentMatrix(V)


def quadrature_variance(V, mode=2, theta=0.5 * math.pi):
    """Variance of ``X_theta = (a e^{-i theta} + a^dag e^{i theta}) / sqrt 2``.

    ``theta = pi/2`` is the P quadrature.  Vacuum gives exactly 1/2.
    """
    if isinstance(V, MomentMatrix):
        n, aa = V.n_bar(mode), V.aa(mode)
    else:
        n, aa = V.n_bar, V.aa
    return n + (np.exp(-2j * theta) * aa).real + 0.5


def literal_p_uncertainty(V):
    """The expression ``-S33 - S44 + S34 + S43 + 1/2`` on the moment matrix.

    Kept for comparison only; it counts the moment terms twice relative to
    :func:`quadrature_variance` and goes negative for strong squeezing.
    """
    S = V.V if isinstance(V, MomentMatrix) else np.asarray(V)
    return float((-S[2, 2] - S[3, 3] + S[2, 3] + S[3, 2]).real + 0.5)


def min_variance(V, mode=2):
    """Minimum quadrature variance and the angle where it occurs.

    Returns ``(theta_min, var_min)`` with ``theta_min`` in ``[0, pi)``; the
    angle is reported as 0 when ``<aa>`` vanishes.
    """
    if isinstance(V, MomentMatrix):
        n, aa = V.n_bar(mode), V.aa(mode)
    else:
        n, aa = V.n_bar, V.aa
    var = n - abs(aa) + 0.5
    if aa == 0:
        return 0.0, var
    theta = (0.5 * np.angle(aa) + 0.5 * math.pi) % math.pi
    return float(theta), float(var)


def squeezing_db(var):
    """Squeezing below vacuum in dB, ``10 log10(0.5 / var)``."""
    if var <= 0:
        raise ValueError("variance must be positive")
    return 10.0 * math.log10(0.5 / var)


def self_consistent_solve(params, *, damping=0.5, tol=1e-10, max_iter=500,
                          eps0=0j, delta_tilde=None):
    """Self-consistent Hartree / Fokker-Planck steady state.

    The effective drive ``eps = -2 i zeta <a2 a2>`` and the detuning
    ``delta12_base + 2 zeta <a2^dag a2>`` depend on the moments they
    produce.  Both are iterated to a fixed point; ``eps`` is damped,
    ``eps <- (1 - damping) eps + damping * target``, the detuning is
    recomputed from the current photon number every sweep.

    Passing ``delta_tilde`` pins the effective detuning instead of deriving
    it from ``params.delta12`` (used when sweeping the effective detuning
    directly).

    Raises
    ------
    ConvergenceError
        After ``max_iter`` sweeps; ``.last`` holds the final ``eps``.
    AboveThresholdError
        Propagated from :func:`steady_covariance`.
    """
    eff = reduce(params)
    kappa = eff.kappa2_tilde
    zeta = eff.zeta
    eps1 = params.eps1

    def detuning(n):
        if delta_tilde is not None:
            return float(delta_tilde)
        return eff.delta12_base + 2.0 * zeta * n

    eps = complex(eps0)
    n = 0.0
    delta = detuning(n)
    for it in range(1, max_iter + 1):
        V = steady_covariance(build_drift_diffusion(eps1, eps, delta, params.kappa1, kappa))
        n = V.n_bar(2)
        target = hartree_drive(zeta, V.aa(2))
        new_eps = (1.0 - damping) * eps + damping * target
        new_delta = detuning(n)
        step = abs(new_eps - eps)
        dstep = abs(new_delta - delta)
        eps, delta = new_eps, new_delta
        if step <= tol * (1.0 + abs(eps)) and dstep <= tol * (1.0 + abs(delta)):
            break
    else:
        raise ConvergenceError(
            f"self-consistent iteration did not converge in {max_iter} sweeps "
            f"(last |d eps| = {step:.3e})",
            last=eps,
        )
    V = steady_covariance(build_drift_diffusion(eps1, eps, delta, params.kappa1, kappa))
    residual = abs(eps - hartree_drive(zeta, V.aa(2)))
    return GaussianSolution(
        params_in=params,
        eps_converged=eps,
        V=V,
        iterations=it,
        residual=residual,
        delta_tilde=delta,
        kappa=kappa,
    )


def default_window(params, half_width=None):
    """Detuning window centred where the effective detuning vanishes."""
    eff = reduce(params)
    center = params.delta12 - eff.delta12_base  # delta12 at which base == 0
    if half_width is None:
        half_width = 2.0 * eff.kappa2_tilde
    return center - half_width, center + half_width


def optimum_detuning(params, eps1=None, search_window=None, *, points=101,
                     xtol=1e-4, **solve_kw):
    """Bare detuning ``delta12`` minimising the P-quadrature minimum variance.

    A coarse grid scan locates the valley, then golden-section search
    refines it to ``xtol``.  Self-consistent solves along the scan are
    warm-started from the neighbouring point.

    Raises
    ------
    NoBracketError
        If the minimum of the coarse scan sits on the window boundary.
    """
    if eps1 is not None:
        params = params.replace(eps1_mag=float(eps1))
    lo, hi = search_window if search_window is not None else default_window(params)
    grid = np.linspace(lo, hi, points)
    values = np.full(points, np.inf)
    sols = [None] * points
    eps_guess = 0j
    for i, d in enumerate(grid):
        try:
            sol = self_consistent_solve(params.replace(delta12=float(d)),
                                        eps0=eps_guess, **solve_kw)
        except UnstableDriftError:
            continue
        eps_guess = sol.eps_converged
        sols[i] = sol
        values[i] = sol.var_min()
    if not np.isfinite(values).any():
        raise NoBracketError("no stable point in the search window")
    k = int(np.argmin(values))
    if k == 0 or k == points - 1:
        raise NoBracketError(
            f"variance minimum at window edge delta12={grid[k]:.6g}; "
            "widen or shift the window"
        )

    cache = {}

    def objective(d):
        if d not in cache:
            sol = self_consistent_solve(params.replace(delta12=float(d)),
                                        eps0=sols[k].eps_converged, **solve_kw)
            cache[d] = sol
        return cache[d].var_min()

    a, b = grid[k - 1], grid[k + 1]
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc, fd = objective(c), objective(d)
    while b - a > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = objective(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = objective(d)
    best = c if fc < fd else d
    sol = cache[best]
    return OptimumResult(
        delta12_opt=float(best),
        var_min_opt=sol.var_min(),
        delta_tilde_opt=sol.delta_tilde,
        solution=sol,
        scan=(grid, values),
    )
