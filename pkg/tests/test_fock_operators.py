import numpy as np
import pytest

from oracles import cascade_hamiltonian
from sqzc.effective import CircuitParams
from sqzc.errors import ConfigError
from sqzc.fock import (
    HilbertConfig,
    build_collapse,
    build_hamiltonian,
    build_operators,
    destroy,
    excitation_parity,
)

FIG5 = CircuitParams(kappa1=50.0, kappa2=1.0, eps1_mag=10.0, g=56.0, delta_q=600.0, delta12=4.95)


def test_ladder_entries():
    a = destroy(3).toarray()
    np.testing.assert_allclose(a, [[0, 1, 0], [0, 0, np.sqrt(2)], [0, 0, 0]])


@pytest.mark.parametrize("n", [2, 5, 12])
def test_commutator_except_top_level(n):
    a = destroy(n).toarray()
    c = a @ a.T - a.T @ a
    np.testing.assert_allclose(np.diag(c)[:-1], 1.0)
    assert c[-1, -1] == pytest.approx(1 - n)
    np.testing.assert_allclose(c - np.diag(np.diag(c)), 0)


def test_number_spectrum():
    a = destroy(7)
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh((a.T @ a).toarray())), np.arange(7), atol=1e-12)


def test_config_validation_and_dims():
    assert HilbertConfig(3, 4, True).dim == 24
    assert HilbertConfig(3, 4, False).dims == (3, 4)
    for bad in ((1, 4), (3, 1), (2.5, 4)):
        with pytest.raises(ConfigError):
            HilbertConfig(*bad)


def test_tensor_ordering():
    cfg = HilbertConfig(3, 4, True)
    ops = build_operators(cfg)
    # |0,1,g> has index 2 and |1,0,g> has index 8
    assert ops.a2[0, 2] == pytest.approx(1.0)
    assert ops.a1[0, 8] == pytest.approx(1.0)
    assert ops.sigma_minus[0, 1] == 1.0
    assert ops.sigma_z[0, 0] == -1.0


def test_undriven_hamiltonian_is_diagonal():
    p = CircuitParams(kappa1=50.0, kappa2=1.0, g=0.0, delta_q=600.0, delta12=0.7)
    cfg = HilbertConfig(3, 4, True)
    H = build_hamiltonian(p.replace(kappa1=1e-300), cfg).matrix.toarray()
    np.testing.assert_allclose(H - np.diag(np.diag(H)), 0, atol=1e-140)
    n2 = np.repeat(np.tile(np.arange(4), 3), 2)
    sz = np.tile([-1.0, 1.0], 12)
    np.testing.assert_allclose(np.diag(H).real, 0.7 * n2 + 300 * sz)


def test_lattice_spectrum_without_pump_or_coupling():
    p = CircuitParams(kappa1=1e-300, kappa2=1.0, g=0.0, delta_q=6.0, delta12=1.3)
    ev = np.linalg.eigvalsh(build_hamiltonian(p, HilbertConfig(2, 3, True)).matrix.toarray())
    lattice = sorted(1.3 * n + 3.0 * s for n in range(3) for s in (-1, 1) for _ in range(2))
    np.testing.assert_allclose(ev, lattice, atol=1e-12)


@pytest.mark.parametrize("qubit", [True, False])
def test_fig5_assembly_is_hermitian_and_matches_dense(qubit):
    cfg = HilbertConfig(4, 6, qubit)
    H = build_hamiltonian(FIG5, cfg)
    assert H.hermiticity_error() <= 1e-12
    Href, Cref = cascade_hamiltonian(FIG5, 4, 6, qubit)
    np.testing.assert_allclose(H.matrix.toarray(), Href, atol=1e-12)
    np.testing.assert_allclose(build_collapse(FIG5, cfg).matrix.toarray(), Cref, atol=1e-12)


def test_dispersive_variant_is_hermitian():
    H = build_hamiltonian(FIG5, HilbertConfig(3, 8, True), "dispersive")
    assert H.hermiticity_error() <= 1e-12
    with pytest.raises(ValueError):
        build_hamiltonian(FIG5, HilbertConfig(3, 8, True), "quartic")


def test_dispersive_collapse_carries_coupling_factor():
    cfg = HilbertConfig(2, 3, True)
    C = build_collapse(FIG5, cfg, "dispersive").matrix.toarray()
    ops = build_operators(cfg)
    r2 = (56.0 / 600.0) ** 2
    expect = np.sqrt(50) * ops.a1.toarray() + ops.a2.toarray() @ (np.eye(12) + r2 * ops.sigma_z.toarray())
    np.testing.assert_allclose(C, expect, atol=1e-14)


def test_parity_commutes_with_generator():
    cfg = HilbertConfig(3, 5, True)
    par = excitation_parity(cfg)
    H = build_hamiltonian(FIG5, cfg).matrix.toarray()
    flip = par[:, None] != par[None, :]
    np.testing.assert_allclose(H[flip], 0)
    # the collapse operator changes parity by exactly one
    C = build_collapse(FIG5, cfg).matrix.toarray()
    np.testing.assert_allclose(C[~flip], 0)
