"""Stationary states of the cascaded master equation.

Three routes are available:

``direct``
    Sparse LU of the explicit superoperator with one diagonal equation
    replaced by the trace constraint.  Memory grows quickly with ``d^2``,
    so it is capped by ``direct_max_dim2``.
``evolve``
    Time-march from the joint ground state with the adaptive
    Dormand-Prince integrator until ``||L rho|| <= tol ||rho||``.
``iterative``
    Matrix-free GMRES on ``L[rho] + sigma Tr(rho) = sigma`` preconditioned
    by the exact inverse of the no-jump part of ``L`` (a Sylvester equation
    solved in a precomputed Schur basis).  The state is split into
    excitation-parity sectors when the model conserves parity, which the
    Hamiltonians in :mod:`.operators` do.
"""
import logging
import math

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import LinearOperator, gmres

from .. import numerics
from ..errors import MemoryBudgetError, ResidualError
from .operators import excitation_parity
from .states import DensityMatrix

__all__ = ["steady_state", "METHODS", "DIRECT_MAX_DIM2"]

logger = logging.getLogger(__name__)

METHODS = ("auto", "direct", "evolve", "iterative")
#: default cap on d^2 for the direct sparse LU route (~5 GB machines)
DIRECT_MAX_DIM2 = 40_000
#: memory budget for the GMRES Krylov basis, bytes
KRYLOV_BUDGET = 1.5e9


def steady_state(L, method="auto", *, tol=1e-8, rho0=None,
                 direct_max_dim2=DIRECT_MAX_DIM2, shift=0.3, restart=None,
                 max_restarts=20, evolve_chunk=5.0, evolve_tmax=2000.0,
                 evolve_rtol=1e-10, evolve_atol=1e-13, refine=True, check=True):
    """Unique stationary state of a Liouvillian.

    Parameters
    ----------
    L : Liouvillian
    method : {"auto", "direct", "evolve", "iterative"}
        ``auto`` uses the direct solve when ``d^2 <= direct_max_dim2`` and
        the iterative solver otherwise.
    tol : float
        Required relative residual ``||L rho|| / ||rho||``.
    rho0 : array_like, optional
        Starting guess for ``iterative`` and ``evolve`` (e.g. the solution
        at a neighbouring parameter point).
    shift : float
        Spectral shift of the no-jump preconditioner.
    refine : bool
        For ``evolve``: once the residual stops falling (the integrator's
        own error floor), finish with the iterative solver started from
        the propagated state.

    Raises
    ------
    MemoryBudgetError
        ``direct`` requested for a system above ``direct_max_dim2``.
    ResidualError
        The returned state does not meet ``tol``.
    """
    if method not in METHODS:
        raise ValueError(f"unknown steady-state method {method!r}")
    d = L.dim
    if method == "auto":
        method = "direct" if d * d <= direct_max_dim2 else "iterative"

    if method == "direct":
        if d * d > direct_max_dim2:
            raise MemoryBudgetError(
                f"direct solve needs a {d * d} x {d * d} factorisation "
                f"(cap {direct_max_dim2}); use method='evolve' or 'iterative'"
            )
        rho = _direct(L)
    elif method == "evolve":
        rho = _evolve(L, tol, rho0, evolve_chunk, evolve_tmax, evolve_rtol, evolve_atol)
        if not isinstance(rho, np.ndarray):
            if not refine:
                raise ResidualError(f"time-marching stalled at residual {rho.residual:.3e}")
            logger.debug("evolve stalled at %.3e; refining", rho.residual)
            rho = _iterative(L, tol, rho.rho, shift, restart, max_restarts)
    else:
        rho = _iterative(L, tol, rho0, shift, restart, max_restarts)

    rho = 0.5 * (rho + rho.conj().T)
    rho = rho / np.trace(rho).real
    res = L.residual(rho)
    if res > tol:
        raise ResidualError(f"steady-state residual {res:.3e} exceeds {tol:g} ({method})")
    state = DensityMatrix(rho, L.config.dims, L.config)
    if check:
        state.check()
    return state


def _ground(d, dtype=complex):
    rho = np.zeros((d, d), dtype=dtype)
    rho[0, 0] = 1.0
    return rho


def _direct(L):
    d = L.dim
    M = L.superoperator.tolil()
    # the trace functional is the sum of the diagonal equations, so one of
    # them is redundant and can carry the normalisation instead
    M[0, :] = 0
    M[0, np.arange(d) * (d + 1)] = 1.0
    b = np.zeros(d * d, dtype=complex)
    b[0] = 1.0
    x = numerics.solve_linear(M.tocsc(), b)
    return x.reshape(d, d)


class _Stalled:
    def __init__(self, rho, residual):
        self.rho, self.residual = rho, residual


#: chunks whose residual drops by less than this factor count as stalled
STALL_RATIO = 0.9


def _evolve(L, tol, rho0, chunk, tmax, rtol, atol):
    """Time-march; returns the state, or a :class:`_Stalled` at a noise floor."""
    d = L.dim
    rho = _ground(d) if rho0 is None else np.array(rho0, dtype=complex)
    t = 0.0
    first = None
    prev = math.inf
    flat = 0
    while True:
        rho, stats = integrate_chunk(L, rho, chunk, rtol, atol, first)
        first = stats.last_dt
        t += chunk
        res = L.residual(rho)
        logger.debug("evolve t=%.3g residual=%.3e steps=%d", t, res, stats.steps)
        if res <= tol:
            return rho
        flat = flat + 1 if res > STALL_RATIO * prev else 0
        prev = res
        if flat >= 3 and res < 1e3 * tol:
            return _Stalled(rho, res)
        if t >= tmax:
            raise ResidualError(f"time-marching did not settle by t={tmax} (residual {res:.3e})")


def integrate_chunk(L, rho, duration, rtol=1e-10, atol=1e-13, first_step=None):
    """Propagate ``rho`` under ``L`` for ``duration``; returns ``(rho, stats)``."""
    return numerics.integrate_ode(
        lambda t, y: L.apply(y), rho, (0.0, duration), rtol=rtol, atol=atol,
        first_step=first_step, return_stats=True,
    )


class _Sectors:
    """Index blocks of the state that the dynamics does not mix.

    ``H`` and ``C^dag C`` are block diagonal; ``C`` maps block ``src[p]``
    into block ``p``.
    """

    def __init__(self, L):
        H, C, K, _, _, _ = L._parts
        labels = excitation_parity(L.config)
        blocks = [np.flatnonzero(labels == p) for p in (0, 1)]
        if self._parity_conserved(H, C, K, blocks):
            self.blocks = blocks
            self.src = [1, 0]
        else:
            self.blocks = [np.arange(L.dim)]
            self.src = [0]
        self.H = [H[b][:, b].tocsr() for b in self.blocks]
        self.K = [K[b][:, b].tocsr() for b in self.blocks]
        self.C = [C[b][:, self.blocks[s]].tocsr() for b, s in zip(self.blocks, self.src)]
        self.HT = [m.T.tocsr() for m in self.H]
        self.KT = [m.T.tocsr() for m in self.K]
        self.Cc = [m.conj().tocsr() for m in self.C]
        self.sizes = [len(b) ** 2 for b in self.blocks]
        self.offsets = np.concatenate([[0], np.cumsum(self.sizes)])

    @staticmethod
    def _parity_conserved(H, C, K, blocks):
        e, o = blocks
        if len(e) == 0 or len(o) == 0:
            return False

        def nnz(M):
            M = M.tocsr()
            M.eliminate_zeros()
            return M.nnz

        return (nnz(H[e][:, o]) == 0 and nnz(H[o][:, e]) == 0
                and nnz(K[e][:, o]) == 0 and nnz(K[o][:, e]) == 0
                and nnz(C[e][:, e]) == 0 and nnz(C[o][:, o]) == 0)

    @property
    def n(self):
        return int(self.offsets[-1])

    def split(self, x):
        return [x[self.offsets[p]:self.offsets[p + 1]].reshape(len(b), len(b))
                for p, b in enumerate(self.blocks)]

    def join(self, parts):
        return np.concatenate([p.ravel() for p in parts])

    def gather(self, rho):
        return self.join([rho[np.ix_(b, b)] for b in self.blocks])

    def scatter(self, x, d):
        rho = np.zeros((d, d), dtype=complex)
        for b, part in zip(self.blocks, self.split(x)):
            rho[np.ix_(b, b)] = part
        return rho

    def apply(self, parts):
        out = []
        for p, r in enumerate(parts):
            H, K, HT, KT = self.H[p], self.K[p], self.HT[p], self.KT[p]
            C, Cc = self.C[p], self.Cc[p]
            src = parts[self.src[p]]
            o = -1j * (H @ r - (HT @ r.T).T) - 0.5 * (K @ r + (KT @ r.T).T)
            o = o + (Cc @ (C @ src).T).T
            out.append(o)
        return out


def _iterative(L, tol, rho0, shift, restart, max_restarts):
    d = L.dim
    sec = _Sectors(L)
    n = sec.n
    sigma = sec.join([np.eye(len(b), dtype=complex) / d for b in sec.blocks])

    def matvec(x):
        parts = sec.split(x)
        tr = sum(np.trace(p) for p in parts)
        return sec.join(sec.apply(parts)) + sigma * tr

    schur = []
    for H, K, b in zip(sec.H, sec.K, sec.blocks):
        A = (-1j * H - 0.5 * K).toarray() - 0.5 * shift * np.eye(len(b))
        T, U = scipy.linalg.schur(A, output="complex")
        schur.append((T, U, U.conj().T))

    def precond(y):
        out = []
        for (T, U, Uh), part in zip(schur, sec.split(y)):
            X = numerics.solve_triangular_sylvester(T, T, Uh @ part @ U)
            out.append(U @ X @ Uh)
        return sec.join(out)

    if restart is None:
        restart = int(max(20, min(300, KRYLOV_BUDGET / (16.0 * n))))
    A = LinearOperator((n, n), matvec=matvec, dtype=complex)
    P = LinearOperator((n, n), matvec=precond, dtype=complex)
    x0 = sec.gather(np.asarray(rho0, dtype=complex)) if rho0 is not None else None
    # bordered-system target; the acceptance test below is on L itself
    target = 0.1 * tol * np.linalg.norm(sigma)
    x = x0
    res = math.inf
    for attempt in range(max_restarts):
        x, info = gmres(A, sigma, x0=x, M=P, rtol=0.0, atol=target,
                        restart=restart, maxiter=1)
        rho = sec.scatter(x, d)
        rho = 0.5 * (rho + rho.conj().T)
        res = L.residual(rho)
        logger.debug("gmres cycle %d: info=%d residual=%.3e", attempt, info, res)
        if res <= tol:
            return rho
    raise ResidualError(
        f"GMRES reached residual {res:.3e} > {tol:g} after {max_restarts} cycles of {restart}"
    )
