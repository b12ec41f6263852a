import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import cascade_hamiltonian, dense_liouvillian_colstack
from sqzc.effective import CircuitParams
from sqzc.fock import FockOperator, HilbertConfig, build_collapse, build_hamiltonian, build_liouvillian, build_operators
from sqzc.fock.steady import integrate_chunk


def _liouvillian(p, cfg, variant="full"):
    return build_liouvillian(build_hamiltonian(p, cfg, variant), build_collapse(p, cfg, variant))


def _random_rho(rng, d):
    B = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = B @ B.conj().T
    return rho / np.trace(rho)


params = st.builds(
    CircuitParams,
    kappa1=st.floats(1, 60), kappa2=st.floats(0.2, 3), eps1_mag=st.floats(0, 15),
    eps1_phase=st.floats(0, 2 * math.pi), g=st.floats(0, 30), delta_q=st.floats(100, 1500),
    delta12=st.floats(-5, 5),
)


@pytest.mark.filterwarnings("ignore::sqzc.errors.DispersiveWarning")
@settings(max_examples=30, deadline=None)
@given(p=params, variant=st.sampled_from(["full", "dispersive"]))
def test_trace_functional_is_left_null_vector(p, variant):
    cfg = HilbertConfig(2, 3, True)
    L = _liouvillian(p, cfg, variant).superoperator
    tr = np.eye(cfg.dim).ravel()
    scale = max(1.0, abs(L).max())
    assert np.abs(L.conj().T @ tr).max() <= 1e-10 * scale


@settings(max_examples=15, deadline=None)
@given(p=params, seed=st.integers(0, 2**31))
def test_apply_matches_superoperator_and_dense_oracle(p, seed):
    cfg = HilbertConfig(2, 3, True)
    L = _liouvillian(p, cfg)
    rho = _random_rho(np.random.default_rng(seed), cfg.dim)
    out = L.apply(rho)
    np.testing.assert_allclose((L.superoperator @ rho.ravel()).reshape(rho.shape), out, atol=1e-9)
    H, C = cascade_hamiltonian(p, 2, 3, True)
    ref = (dense_liouvillian_colstack(H, C) @ rho.ravel(order="F")).reshape(rho.shape, order="F")
    np.testing.assert_allclose(out, ref, atol=1e-9 * max(1.0, np.abs(ref).max()))


def test_damped_cavity_decay():
    cfg = HilbertConfig(2, 8, False)
    ops = build_operators(cfg)
    kappa = 0.8
    H = FockOperator(cfg, sp.csr_matrix((cfg.dim, cfg.dim), dtype=complex))
    L = build_liouvillian(H, FockOperator(cfg, math.sqrt(kappa) * ops.a2))
    rho = np.zeros((cfg.dim, cfg.dim), complex)
    rho[3, 3] = 1.0  # |0, 3>
    n2 = (ops.a2.conj().T @ ops.a2).toarray()
    for t in (0.5, 2.0):
        out, _ = integrate_chunk(L, rho, t)
        assert np.trace(n2 @ out).real == pytest.approx(3 * math.exp(-kappa * t), abs=1e-9)


def test_two_level_decay():
    cfg = HilbertConfig(2, 2, True)
    ops = build_operators(cfg)
    gamma = 1.7
    H = FockOperator(cfg, sp.csr_matrix((cfg.dim, cfg.dim), dtype=complex))
    L = build_liouvillian(H, FockOperator(cfg, math.sqrt(gamma) * ops.sigma_minus))
    rho = np.zeros((cfg.dim, cfg.dim), complex)
    rho[1, 1] = 0.6
    rho[0, 0] = 0.4
    out, _ = integrate_chunk(L, rho, 0.9)
    assert out[1, 1].real == pytest.approx(0.6 * math.exp(-gamma * 0.9), abs=1e-10)
    assert np.trace(out).real == pytest.approx(1.0, abs=1e-12)


def test_mismatched_spaces_rejected():
    p = CircuitParams()
    with pytest.raises(ValueError):
        build_liouvillian(build_hamiltonian(p, HilbertConfig(2, 3, True)),
                          build_collapse(p, HilbertConfig(2, 4, True)))
