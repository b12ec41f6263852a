"""Numerical kernels shared by the Gaussian and Fock-space tiers.

Everything here is a pure function of its arguments.  Dense matrices are
plain ``numpy`` arrays; sparse matrices are ``scipy.sparse`` objects.
"""
import heapq
import warnings

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg
from scipy.linalg.lapack import ztrsyl

from .errors import (
    QuadratureError,
    SingularMatrixError,
    StepUnderflowError,
    UnstableDriftError,
)

__all__ = [
    "solve_linear",
    "solve_lyapunov",
    "lyapunov_residual",
    "integrate_spectral",
    "spectral_density",
    "integrate_ode",
    "OdeStats",
    "solve_triangular_sylvester",
    "PIVOT_RTOL",
]

#: relative pivot magnitude below which a factorisation is declared singular
PIVOT_RTOL = 1e-14


def _max_abs(M):
    if scipy.sparse.issparse(M):
        return abs(M).max() if M.nnz else 0.0
    return np.abs(M).max() if M.size else 0.0


def solve_linear(M, b):
    """Solve ``M x = b`` for a square dense or sparse matrix.

    A single step of iterative refinement is applied after the LU solve.

    Raises
    ------
    SingularMatrixError
        If a pivot of the LU factorisation is smaller than
        ``PIVOT_RTOL`` times the largest entry of ``M``.
    """
    b = np.asarray(b)
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"matrix must be square, got shape {M.shape}")
    if M.shape[0] != b.shape[0]:
        raise ValueError("right-hand side length does not match matrix")
    scale = _max_abs(M)
    if scale == 0.0:
        raise SingularMatrixError("matrix is identically zero")
    dtype = np.result_type(M.dtype, b.dtype, np.float64)

    if scipy.sparse.issparse(M):
        A = scipy.sparse.csc_matrix(M, dtype=dtype)
        try:
            lu = scipy.sparse.linalg.splu(A)
        except RuntimeError as exc:  # "Factor is exactly singular"
            raise SingularMatrixError(str(exc)) from exc
        pivots = np.abs(lu.U.diagonal())
        solve = lu.solve
    else:
        A = np.asarray(M, dtype=dtype)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            factors = scipy.linalg.lu_factor(A, check_finite=True)
        pivots = np.abs(np.diag(factors[0]))

        def solve(rhs):
            return scipy.linalg.lu_solve(factors, rhs)

    if pivots.min() < PIVOT_RTOL * scale:
        raise SingularMatrixError(
            f"pivot {pivots.min():.3e} below {PIVOT_RTOL:g} x max entry {scale:.3e}"
        )
    rhs = b.astype(dtype)
    x = solve(rhs)
    x = x + solve(rhs - A @ x)
    return x


def solve_triangular_sylvester(T, S, Y, block=64):
    """Solve ``T X + X S^H = Y`` for upper-triangular complex ``T`` and ``S``.

    Recursive halving keeps the bulk of the work in matrix products;
    LAPACK ``ztrsyl`` handles blocks of at most ``block`` rows and columns.
    """
    m, n = Y.shape
    if m <= block and n <= block:
        X, scale, info = ztrsyl(T, S, Y, trana="N", tranb="C", isgn=1)
        if info < 0:
            raise ValueError(f"ztrsyl: illegal argument {-info}")
        return X / scale
    if m >= n:
        h = m // 2
        lower = solve_triangular_sylvester(T[h:, h:], S, Y[h:], block)
        upper = solve_triangular_sylvester(T[:h, :h], S, Y[:h] - T[:h, h:] @ lower, block)
        return np.vstack([upper, lower])
    h = n // 2
    right = solve_triangular_sylvester(T, S[h:, h:], Y[:, h:], block)
    left = solve_triangular_sylvester(T, S[:h, :h], Y[:, :h] - right @ S[:h, h:].conj().T, block)
    return np.hstack([left, right])


def _check_stable(A):
    eig = np.linalg.eigvals(A)
    if np.max(eig.real) >= 0.0:
        raise UnstableDriftError(
            f"drift matrix not stable: max Re(eig) = {np.max(eig.real):.6g}"
        )
    return eig


def solve_lyapunov(A, D):
    """Return ``V`` solving ``A V + V A^T + D = 0``.

    The transpose (not the conjugate transpose) appears because the
    variables of a complex-P Fokker-Planck equation are not conjugate
    pairs of one another.  The equation is vectorised into an
    ``n^2 x n^2`` linear system and solved exactly.
    """
    A = np.asarray(A, dtype=complex)
    D = np.asarray(D, dtype=complex)
    n = A.shape[0]
    _check_stable(A)
    eye = np.eye(n)
    # row-major vec: vec(A V) = (A kron I) vec V ; vec(V A^T) = (I kron A) vec V
    big = np.kron(A, eye) + np.kron(eye, A)
    v = solve_linear(big, -D.reshape(-1))
    return v.reshape(n, n)


def lyapunov_residual(A, V, D):
    """Max-norm of ``A V + V A^T + D``."""
    return float(np.abs(A @ V + V @ A.T + D).max())


def spectral_density(A, D, omega):
    """Spectral matrix ``(A + i w)^-1 D (A^T - i w)^-1 / 2 pi`` at one frequency."""
    n = A.shape[0]
    eye = np.eye(n)
    left = np.linalg.solve(A + 1j * omega * eye, D)
    return np.linalg.solve((A.T - 1j * omega * eye).T, left.T).T / (2 * np.pi)


# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1] (non-negative half).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
GK_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
GK_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
# gauss nodes sit at odd positions of _XGK (index 1, 3, 5, 7)
G_WEIGHTS = np.zeros(15)
G_WEIGHTS[[1, 3, 5]] = _WG[:3]
G_WEIGHTS[[13, 11, 9]] = _WG[:3]
G_WEIGHTS[7] = _WG[3]


def _gk15(f, a, b):
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = [f(mid + half * x) for x in GK_NODES]
    kron = half * sum(w * v for w, v in zip(GK_WEIGHTS, vals))
    gauss = half * sum(w * v for w, v in zip(G_WEIGHTS, vals) if w)
    return kron, float(np.abs(kron - gauss).max())


def integrate_spectral(A, D, rtol=1e-10, atol=1e-13, max_subdivisions=2000):
    """Integrate the spectral matrix over the whole real frequency axis.

    Independent check on :func:`solve_lyapunov`: the frequency integral of
    ``(A + i w)^-1 D (A^T - i w)^-1 / 2 pi`` equals the stationary
    covariance.  The real line is mapped onto ``(-pi/2, pi/2)`` through
    ``w = c tan(t)`` with ``c`` the median eigenvalue modulus of ``A``, and
    the result is built by globally adaptive Gauss-Kronrod 7/15 bisection.

    Raises
    ------
    UnstableDriftError
        If ``A`` is not Hurwitz.
    QuadratureError
        If the error target is not met within ``max_subdivisions`` intervals.
    """
    A = np.asarray(A, dtype=complex)
    D = np.asarray(D, dtype=complex)
    eig = _check_stable(A)
    c = float(np.median(np.abs(eig)))

    def f(t):
        w = c * np.tan(t)
        return spectral_density(A, D, w) * c / np.cos(t) ** 2

    # the transformed integrand is finite at +-pi/2, but tan() overflows
    # exactly there; GK nodes are interior so the endpoints are never hit.
    lo, hi = -0.5 * np.pi, 0.5 * np.pi
    # seed with a few panels so narrow features near w ~ 0 are resolved
    edges = np.linspace(lo, hi, 9)
    heap = []
    total = 0
    err_total = 0.0
    for k, (a, b) in enumerate(zip(edges[:-1], edges[1:])):
        val, err = _gk15(f, a, b)
        heapq.heappush(heap, (-err, k, a, b, val))
        total = total + val
        err_total += err
    counter = len(heap)
    while err_total > max(atol, rtol * float(np.abs(total).max())):
        if len(heap) >= max_subdivisions:
            raise QuadratureError(
                f"no convergence after {max_subdivisions} subdivisions "
                f"(error estimate {err_total:.3e})"
            )
        neg_err, _, a, b, val = heapq.heappop(heap)
        m = 0.5 * (a + b)
        left, el = _gk15(f, a, m)
        right, er = _gk15(f, m, b)
        total = total - val + left + right
        err_total += el + er + neg_err
        heapq.heappush(heap, (-el, counter, a, m, left))
        heapq.heappush(heap, (-er, counter + 1, m, b, right))
        counter += 2
    return total


# Dormand-Prince 5(4) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array(_A[6] + [0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640,
                -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


class OdeStats:
    """Bookkeeping returned alongside an ODE solution."""

    def __init__(self):
        self.steps = 0
        self.rejected = 0
        self.evaluations = 0
        self.last_dt = None

    def __repr__(self):
        return (f"OdeStats(steps={self.steps}, rejected={self.rejected}, "
                f"evaluations={self.evaluations})")


def integrate_ode(f, y0, t_span, rtol=1e-8, atol=1e-10, first_step=None,
                  max_steps=1_000_000, return_stats=False):
    """Integrate ``dy/dt = f(t, y)`` with an adaptive Dormand-Prince 5(4) pair.

    ``y0`` may be an array of any shape and may be complex.  Only the
    state at ``t_span[1]`` is returned (plus an :class:`OdeStats` when
    ``return_stats`` is set).  A step is accepted when the RMS of the
    embedded error estimate, weighted by ``atol + rtol * |y|``, is at most
    one.

    Raises
    ------
    StepUnderflowError
        If the step size falls below ``1e-12`` times the integration span.
    """
    t0, t1 = map(float, t_span)
    y = np.array(y0, dtype=np.result_type(np.asarray(y0).dtype, np.float64))
    stats = OdeStats()
    span = t1 - t0
    if span == 0.0:
        return (y, stats) if return_stats else y
    direction = np.sign(span)
    min_dt = 1e-12 * abs(span)

    k1 = f(t0, y)
    stats.evaluations += 1
    if first_step is None:
        # Hairer-Norsett-Wanner starting-step heuristic
        scale = atol + rtol * np.abs(y)
        d0 = np.sqrt(np.mean(np.abs(y / scale) ** 2))
        d1 = np.sqrt(np.mean(np.abs(k1 / scale) ** 2))
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        dt = min(h0, abs(span))
    else:
        dt = min(abs(first_step), abs(span))

    t = t0
    while direction * (t1 - t) > 0:
        if stats.steps + stats.rejected >= max_steps:
            raise StepUnderflowError(f"exceeded max_steps={max_steps}")
        if dt < min_dt:
            raise StepUnderflowError(
                f"step size {dt:.3e} below 1e-12 x span at t={t:.6g}"
            )
        h = direction * min(dt, abs(t1 - t))
        ks = [k1]
        for i in range(1, 7):
            yi = y + h * sum(a * k for a, k in zip(_A[i], ks) if a)
            ks.append(f(t + _C[i] * h, yi))
        stats.evaluations += 6
        y_new = yi  # stage 7 is evaluated at the 5th-order solution (FSAL)
        err = h * sum(e * k for e, k in zip(_E, ks) if e)
        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err_norm = float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))
        if err_norm <= 1.0:
            t = t + h
            y = y_new
            k1 = ks[6]
            stats.steps += 1
            stats.last_dt = abs(h)
            factor = 5.0 if err_norm == 0 else min(5.0, 0.9 * err_norm ** -0.2)
        else:
            stats.rejected += 1
            factor = max(0.2, 0.9 * err_norm ** -0.2)
        dt = abs(h) * factor
    return (y, stats) if return_stats else y
