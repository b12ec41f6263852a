"""Density matrices, reductions and single-mode diagnostics."""
import math
import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.special import gammaln

from ..effective import HartreeState, factorized_fourth_moment
from ..errors import MomentUndefinedWarning
from .operators import FockOperator, destroy

__all__ = [
    "DensityMatrix",
    "ConfigMismatchError",
    "SUBSYSTEMS",
    "expect",
    "partial_trace",
    "number_distribution",
    "single_mode_moments",
    "quadrature_variance_fock",
    "min_variance_fock",
    "fourth_moments",
    "moment_error",
    "squeezed_vacuum",
    "ideal_squeezed_distribution",
    "squeeze_for_photon_number",
]

SUBSYSTEMS = {"cavity1": 0, "cavity2": 1, "qubit": 2}


class ConfigMismatchError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Dense density matrix on a tensor space with subsystem ``dims``.

    ``config`` is the :class:`~sqzc.fock.operators.HilbertConfig` for states
    of the full cascade and ``None`` for reduced states.
    """

    matrix: np.ndarray
    dims: tuple
    config: object = None

    def __post_init__(self):
        d = int(np.prod(self.dims))
        if self.matrix.shape != (d, d):
            raise ValueError(f"matrix shape {self.matrix.shape} does not match dims {self.dims}")

    @property
    def dim(self):
        return self.matrix.shape[0]

    def trace(self):
        return complex(np.trace(self.matrix))

    def hermiticity_error(self):
        return float(np.abs(self.matrix - self.matrix.conj().T).max())

    def min_eigenvalue(self):
        h = 0.5 * (self.matrix + self.matrix.conj().T)
        return float(np.linalg.eigvalsh(h)[0])

    def check(self, herm_tol=1e-10, trace_tol=1e-8, pos_tol=1e-8):
        """Raise ``ValueError`` unless Hermitian, unit-trace and positive."""
        if self.hermiticity_error() > herm_tol:
            raise ValueError(f"not Hermitian: {self.hermiticity_error():.3e}")
        if abs(self.trace() - 1.0) > trace_tol:
            raise ValueError(f"trace {self.trace()} differs from 1")
        lam = self.min_eigenvalue()
        if lam < -pos_tol:
            raise ValueError(f"negative eigenvalue {lam:.3e}")
        return self


def _as_matrix(rho):
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho)


def expect(op, rho):
    """``Tr(op rho)``.

    Raises
    ------
    ConfigMismatchError
        When operator and state are defined on different spaces.
    """
    if isinstance(op, FockOperator):
        if isinstance(rho, DensityMatrix) and rho.config is not None and rho.config != op.config:
            raise ConfigMismatchError(f"operator on {op.config}, state on {rho.config}")
        op = op.matrix
    R = _as_matrix(rho)
    if op.shape != R.shape:
        raise ConfigMismatchError(f"operator shape {op.shape} vs state shape {R.shape}")
    if sp.issparse(op):
        return complex(op.multiply(R.T).sum())
    return complex(np.einsum("ij,ji->", op, R))


def partial_trace(rho, keep):
    """Reduced state of one subsystem (``"cavity1"``, ``"cavity2"``, ``"qubit"``)."""
    if isinstance(keep, str):
        if keep not in SUBSYSTEMS:
            raise ValueError(f"unknown subsystem {keep!r}")
        keep = SUBSYSTEMS[keep]
    dims = tuple(rho.dims)
    if not 0 <= keep < len(dims):
        raise ValueError(f"subsystem index {keep} outside dims {dims}")
    n = len(dims)
    t = rho.matrix.reshape(dims + dims)
    # contract every subsystem except `keep`
    letters = "abcdefgh"
    row = list(letters[:n])
    col = list(letters[:n])
    col[keep] = "z"
    spec = "".join(row) + "".join(col) + "->" + row[keep] + "z"
    out = np.einsum(spec, t)
    return DensityMatrix(out, (dims[keep],))


def number_distribution(rho2):
    """Photon-number probabilities ``P(N)``, the diagonal of a one-mode state."""
    p = np.real(np.diag(_as_matrix(rho2))).copy()
    if abs(p.sum() - 1.0) > 1e-8:
        raise ValueError(f"probabilities sum to {p.sum():.12g}")
    return p


def single_mode_moments(rho2):
    """``(<a>, <a^dag a>, <a a>)`` of a single-mode state."""
    R = _as_matrix(rho2)
    a = destroy(R.shape[0])
    m1 = complex(a.multiply(R.T).sum())
    n = float(np.real(np.dot(np.arange(R.shape[0]), np.diag(R))))
    m2 = complex((a @ a).multiply(R.T).sum())
    return m1, n, m2


def quadrature_variance_fock(rho2, theta=0.5 * math.pi):
    """Variance of ``X_theta`` from the exact moments, mean subtracted.

    Uses ``<a a^dag> = <a^dag a> + 1`` (the untruncated commutator), so a
    truncated vacuum gives exactly 1/2.
    """
    m1, n, m2 = single_mode_moments(rho2)
    mean = math.sqrt(2.0) * (np.exp(-1j * theta) * m1).real
    second = n + (np.exp(-2j * theta) * m2).real + 0.5
    return float(second - mean * mean)


def min_variance_fock(rho2):
    """``(theta_min, var_min)`` over all quadrature angles (mean subtracted)."""
    m1, n, m2 = single_mode_moments(rho2)
    n_c = n - abs(m1) ** 2
    m_c = m2 - m1 * m1
    var = n_c - abs(m_c) + 0.5
    if m_c == 0:
        return 0.0, float(var)
    return float((0.5 * np.angle(m_c) + 0.5 * math.pi) % math.pi), float(var)


def fourth_moments(rho2):
    """Exact ``<a^dag a a^dag a>`` and its Wick-factorised counterpart."""
    R = _as_matrix(rho2)
    N = np.arange(R.shape[0])
    p = np.real(np.diag(R))
    exact = float(np.dot(N * N, p))
    _, n, m2 = single_mode_moments(R)
    factorized = factorized_fourth_moment(HartreeState(max(n, 0.0), m2))
    return exact, factorized


def moment_error(rho2):
    """Percentage deviation of the factorised fourth moment from the exact one.

    For states whose exact moment is below ``1e-12`` the error is undefined;
    0 is returned and a :class:`MomentUndefinedWarning` is issued.
    """
    exact, factorized = fourth_moments(rho2)
    if exact < 1e-12:
        warnings.warn("fourth moment vanishes; moment error undefined",
                      MomentUndefinedWarning, stacklevel=2)
        return 0.0
    return 100.0 * abs(exact - factorized) / exact


def squeeze_for_photon_number(n_bar):
    """Squeeze parameter ``r`` of the squeezed vacuum with ``sinh^2 r = n_bar``."""
    return math.asinh(math.sqrt(n_bar))


def ideal_squeezed_distribution(r, n_levels):
    """``P(N)`` of an ideal squeezed vacuum; odd photon numbers vanish."""
    p = np.zeros(n_levels)
    t = math.tanh(abs(r))
    k = np.arange(0, (n_levels + 1) // 2)
    N = 2 * k
    N = N[N < n_levels]
    k = N // 2
    logp = gammaln(N + 1) - N * math.log(2.0) - 2 * gammaln(k + 1) - math.log(math.cosh(r))
    with np.errstate(divide="ignore"):
        logp = logp + (N * math.log(t) if t > 0 else np.where(N == 0, 0.0, -np.inf))
    p[N] = np.exp(logp)
    return p


def squeezed_vacuum(r, n_levels, phi=0.0):
    """Truncated squeezed vacuum ``S(z)|0>`` with ``z = r e^{i phi}``.

    With ``S(z) = exp((z* a^2 - z a^dag^2)/2)`` the state has
    ``<a a> = -e^{i phi} sinh r cosh r``: ``phi = 0`` squeezes X and
    ``phi = pi`` squeezes P.
    """
    psi = np.zeros(n_levels, dtype=complex)
    t = math.tanh(r)
    for k in range(0, (n_levels + 1) // 2):
        N = 2 * k
        if N >= n_levels:
            break
        logamp = 0.5 * (gammaln(N + 1)) - gammaln(k + 1) - k * math.log(2.0)
        amp = math.exp(logamp) * (t ** k if k else 1.0)
        psi[N] = (-np.exp(1j * phi)) ** k * amp
    psi /= math.sqrt(math.cosh(r))
    return DensityMatrix(np.outer(psi, psi.conj()), (n_levels,))
