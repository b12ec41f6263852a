"""Wigner quasi-probability of a single-mode state.

Convention: ``W`` is a density over ``alpha = x + i p`` normalised as
``int W dx dp = 1``, so the vacuum peaks at ``2/pi``.  The evaluation sums
``rho_{m, m+k}`` along each diagonal ``k`` with a normalised associated
Laguerre recursion, which stays bounded for the Fock sizes used here.
"""
import math
import warnings
from dataclasses import dataclass

import numpy as np

from ..errors import GridWarning
from .states import _as_matrix

__all__ = ["WignerGrid", "wigner", "wigner_at", "BOUNDARY_LIMIT"]

BOUNDARY_LIMIT = 1e-4


@dataclass(frozen=True, eq=False)
class WignerGrid:
    """``values[i, j] = W(x[j] + i p[i])`` on a uniform grid."""

    x: np.ndarray
    p: np.ndarray
    values: np.ndarray

    @property
    def x_range(self):
        return float(self.x[0]), float(self.x[-1])

    @property
    def p_range(self):
        return float(self.p[0]), float(self.p[-1])

    @property
    def cell_area(self):
        return float((self.x[1] - self.x[0]) * (self.p[1] - self.p[0]))

    def integral(self):
        return float(self.values.sum() * self.cell_area)

    def boundary_max(self):
        v = np.abs(self.values)
        return float(max(v[0].max(), v[-1].max(), v[:, 0].max(), v[:, -1].max()))

    def marginal(self, axis="x"):
        """Distribution of ``Re alpha`` (``axis="x"``) or ``Im alpha``."""
        if axis == "x":
            return self.x, self.values.sum(axis=0) * float(self.p[1] - self.p[0])
        if axis == "p":
            return self.p, self.values.sum(axis=1) * float(self.x[1] - self.x[0])
        raise ValueError(f"axis must be 'x' or 'p', not {axis!r}")

    def triples(self):
        """Rows of ``(x, p, w)`` in row-major grid order."""
        X, P = np.meshgrid(self.x, self.p)
        return np.column_stack([X.ravel(), P.ravel(), self.values.ravel()])


def wigner_at(rho2, alpha):
    """``W`` at an array of complex phase-space points."""
    R = _as_matrix(rho2)
    alpha = np.asarray(alpha, dtype=complex)
    n = R.shape[0]
    x = 4.0 * np.abs(alpha) ** 2
    gauss = np.exp(-0.5 * x)
    two_alpha = 2.0 * alpha
    sign = (-1.0) ** np.arange(n)
    total = np.zeros(alpha.shape)
    # prefactor (2 alpha)^k e^{-x/2} / sqrt(k!) carried into l_0
    pref = gauss.astype(complex)
    for k in range(n):
        if k:
            pref = pref * two_alpha / math.sqrt(k)
        diag = np.diagonal(R, offset=k)
        acc = np.zeros(alpha.shape, dtype=complex)
        l_prev = np.zeros_like(pref)
        l_cur = pref
        for m in range(len(diag)):
            if diag[m] != 0:
                acc += sign[m] * diag[m] * l_cur
            l_next = ((2 * m + 1 + k - x) * l_cur - math.sqrt(m * (m + k)) * l_prev) \
                / math.sqrt((m + 1) * (m + k + 1))
            l_prev, l_cur = l_cur, l_next
        total += acc.real if k == 0 else 2.0 * acc.real
    return (2.0 / math.pi) * total


def wigner(rho2, xmax=4.0, points=201, *, pmax=None, warn=True):
    """Evaluate ``W`` on the square grid ``[-xmax, xmax]^2``.

    Issues a :class:`GridWarning` when ``|W|`` on the grid boundary exceeds
    ``BOUNDARY_LIMIT``.
    """
    if points < 2:
        raise ValueError("need at least 2 grid points per axis")
    pmax = xmax if pmax is None else pmax
    xs = np.linspace(-xmax, xmax, points)
    ps = np.linspace(-pmax, pmax, points)
    X, P = np.meshgrid(xs, ps)
    grid = WignerGrid(xs, ps, wigner_at(rho2, X + 1j * P))
    if warn and grid.boundary_max() > BOUNDARY_LIMIT:
        warnings.warn(f"|W| reaches {grid.boundary_max():.2e} on the grid boundary; "
                      "enlarge xmax", GridWarning, stacklevel=2)
    return grid
