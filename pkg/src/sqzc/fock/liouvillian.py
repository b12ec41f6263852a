"""Lindblad generator with a single combined collapse operator."""
from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp

from .operators import FockOperator

__all__ = ["Liouvillian", "build_liouvillian"]


@dataclass(frozen=True, eq=False)
class Liouvillian:
    """``L[rho] = -i[H, rho] + C rho C^dag - {C^dag C, rho}/2``.

    The generator is applied matrix-free by :meth:`apply`; the explicit
    ``d^2 x d^2`` superoperator (row-major vectorisation) is assembled on
    first access of :attr:`superoperator`.
    """

    hamiltonian: FockOperator
    collapse: FockOperator

    @property
    def config(self):
        return self.hamiltonian.config

    @property
    def dim(self):
        return self.hamiltonian.matrix.shape[0]

    @cached_property
    def _parts(self):
        H = self.hamiltonian.matrix.tocsr()
        C = self.collapse.matrix.tocsr()
        K = (C.conj().T @ C).tocsr()
        return H, C, K, H.T.tocsr(), K.T.tocsr(), C.conj().tocsr()

    def apply(self, rho):
        """Action on a (not necessarily Hermitian) ``d x d`` matrix."""
        H, C, K, HT, KT, Cc = self._parts
        rho = np.asarray(rho)
        rho_h = (HT @ rho.T).T  # rho @ H
        rho_k = (KT @ rho.T).T
        jump = (Cc @ (C @ rho).T).T  # C rho C^dag
        return -1j * (H @ rho - rho_h) + jump - 0.5 * (K @ rho + rho_k)

    @cached_property
    def superoperator(self):
        H, C, K, _, _, _ = self._parts
        eye = sp.identity(self.dim, format="csr", dtype=complex)
        L = (-1j * (sp.kron(H, eye) - sp.kron(eye, H.T))
             + sp.kron(C, C.conj())
             - 0.5 * sp.kron(K, eye) - 0.5 * sp.kron(eye, K.T))
        return L.tocsr()

    def residual(self, rho):
        """``||L rho||_2 / ||rho||_2`` (Frobenius norms)."""
        rho = np.asarray(rho)
        return float(np.linalg.norm(self.apply(rho)) / np.linalg.norm(rho))


def build_liouvillian(H, collapse):
    if H.config != collapse.config:
        raise ValueError("Hamiltonian and collapse operator live on different spaces")
    return Liouvillian(H, collapse)
