"""Truncated ladder operators and Hamiltonians on cavity1 x cavity2 x qubit.

Tensor order is fixed as ``cavity1 (x) cavity2 (x) qubit``.  The qubit
basis is ``(|g>, |e>)`` so that index 0 of the full space is the joint
ground state ``|0, 0, g>``.  Every subsystem rotates at the amplifier
frequency ``w1``.
"""
import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..effective import reduce
from ..errors import ConfigError

__all__ = [
    "HilbertConfig",
    "FockOperator",
    "OperatorSet",
    "destroy",
    "build_operators",
    "build_hamiltonian",
    "build_collapse",
    "excitation_parity",
    "VARIANTS",
]

VARIANTS = ("full", "dispersive")


@dataclass(frozen=True)
class HilbertConfig:
    n1: int = 10
    n2: int = 50
    include_qubit: bool = True

    def __post_init__(self):
        if int(self.n1) != self.n1 or int(self.n2) != self.n2:
            raise ConfigError("Fock truncations must be integers")
        if self.n1 < 2 or self.n2 < 2:
            raise ConfigError("Fock truncations must be at least 2")

    @property
    def dims(self):
        return (self.n1, self.n2, 2) if self.include_qubit else (self.n1, self.n2)

    @property
    def dim(self):
        return int(np.prod(self.dims))

    def to_dict(self):
        return {"n1": self.n1, "n2": self.n2, "include_qubit": self.include_qubit}


@dataclass(frozen=True, eq=False)
class FockOperator:
    config: HilbertConfig
    matrix: sp.csr_matrix

    def __post_init__(self):
        d = self.config.dim
        if self.matrix.shape != (d, d):
            raise ValueError(f"operator shape {self.matrix.shape} does not match dimension {d}")

    def dag(self):
        return FockOperator(self.config, self.matrix.conj().T.tocsr())

    def hermiticity_error(self):
        diff = self.matrix - self.matrix.conj().T
        return float(abs(diff).max()) if diff.nnz else 0.0


@dataclass(frozen=True, eq=False)
class OperatorSet:
    config: HilbertConfig
    a1: sp.csr_matrix
    a2: sp.csr_matrix
    sigma_minus: sp.csr_matrix
    sigma_z: sp.csr_matrix
    identity: sp.csr_matrix


def destroy(n):
    """Annihilation operator on ``n`` Fock levels: ``a|k> = sqrt(k)|k-1>``."""
    return sp.diags(np.sqrt(np.arange(1, n, dtype=float)), 1, shape=(n, n), format="csr")


def _embed(ops):
    out = ops[0]
    for op in ops[1:]:
        out = sp.kron(out, op, format="csr")
    return out.astype(complex).tocsr()


def build_operators(config):
    """Ladder and qubit operators embedded in the full tensor space.

    Without a qubit, ``sigma_minus`` is the zero operator and ``sigma_z``
    is ``-identity`` (qubit frozen in its ground state).
    """
    i1 = sp.identity(config.n1, format="csr")
    i2 = sp.identity(config.n2, format="csr")
    if config.include_qubit:
        iq = sp.identity(2, format="csr")
        sm = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))  # |g><e|
        sz = sp.diags([-1.0, 1.0], format="csr")
        a1 = _embed([destroy(config.n1), i2, iq])
        a2 = _embed([i1, destroy(config.n2), iq])
        sigma_minus = _embed([i1, i2, sm])
        sigma_z = _embed([i1, i2, sz])
    else:
        a1 = _embed([destroy(config.n1), i2])
        a2 = _embed([i1, destroy(config.n2)])
        d = config.dim
        sigma_minus = sp.csr_matrix((d, d), dtype=complex)
        sigma_z = -sp.identity(d, dtype=complex, format="csr")
    identity = sp.identity(config.dim, dtype=complex, format="csr")
    return OperatorSet(config, a1, a2, sigma_minus, sigma_z, identity)


def _sigma_z_or_scalar(ops, params):
    if ops.config.include_qubit:
        return ops.sigma_z
    return params.sigma_z * ops.identity


def build_hamiltonian(params, config, variant="full", ops=None):
    """Rotating-frame Hamiltonian of the full cascade.

    ``variant="full"`` is the bare Jaynes-Cummings model; ``"dispersive"``
    replaces the qubit coupling by its fourth-order dispersive expansion and
    rescales the cascade term by ``1 + (g/delta_q)^2 sigma_z``.  In the
    dispersive variant without a qubit, ``sigma_z`` is frozen at
    ``params.sigma_z``.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown Hamiltonian variant {variant!r}")
    ops = ops or build_operators(config)
    a1, a2 = ops.a1, ops.a2
    a1d, a2d = a1.conj().T, a2.conj().T
    eps1 = params.eps1
    n2 = a2d @ a2
    H = 0.5j * (eps1 * (a1d @ a1d) - np.conj(eps1) * (a1 @ a1))
    cascade = -0.5j * math.sqrt(params.kappa1 * params.kappa2) * (a1 @ a2d - a1d @ a2)

    if variant == "full":
        H = H + params.delta12 * n2 + cascade
        if config.include_qubit:
            sm = ops.sigma_minus
            H = H + 0.5 * params.delta_q * ops.sigma_z
            H = H + params.g * (a2 @ sm.conj().T + a2d @ sm)
    else:
        eff = reduce(params)
        sz = _sigma_z_or_scalar(ops, params)
        H = H + (params.delta12 - eff.xi) * n2
        H = H + eff.chi * (n2 + 0.5 * ops.identity) @ sz - eff.xi * (n2 @ n2) @ sz
        if config.include_qubit:
            H = H + 0.5 * params.delta_q * sz
        H = H + cascade @ _coupling_factor(params, ops)
    return FockOperator(config, sp.csr_matrix(H, dtype=complex))


def _coupling_factor(params, ops):
    if params.g == 0:
        return ops.identity
    ratio2 = (params.g / params.delta_q) ** 2
    return ops.identity + ratio2 * _sigma_z_or_scalar(ops, params)


def build_collapse(params, config, variant="full", ops=None):
    """Combined collapse operator ``sqrt(kappa1) a1 + sqrt(kappa2) a2``.

    The dispersive variant carries the same ``1 + (g/delta_q)^2 sigma_z``
    factor on the second-cavity term as the cascade coupling.
    """
    if variant not in VARIANTS:
        raise ValueError(f"unknown Hamiltonian variant {variant!r}")
    ops = ops or build_operators(config)
    second = math.sqrt(params.kappa2) * ops.a2
    if variant == "dispersive":
        second = second @ _coupling_factor(params, ops)
    C = math.sqrt(params.kappa1) * ops.a1 + second
    return FockOperator(config, sp.csr_matrix(C, dtype=complex))


def excitation_parity(config):
    """Parity of ``n1 + n2 + (qubit excited)`` for every basis index."""
    idx = np.unravel_index(np.arange(config.dim), config.dims)
    total = idx[0] + idx[1]
    if config.include_qubit:
        total = total + idx[2]
    return (total % 2).astype(np.int8)
