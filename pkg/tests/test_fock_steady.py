import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import cascade_hamiltonian, null_space_state
from sqzc.effective import CircuitParams
from sqzc.errors import MemoryBudgetError, ResidualError
from sqzc.fock import (
    HilbertConfig,
    build_collapse,
    build_hamiltonian,
    build_liouvillian,
    build_operators,
    expect,
    moment_error,
    number_distribution,
    partial_trace,
    single_mode_moments,
    steady_state,
)
from sqzc.fock.analysis import solve_fock

SMALL = CircuitParams(kappa1=50.0, kappa2=1.0, eps1_mag=8.0, g=20.0, delta_q=200.0, delta12=1.5)


def _liouvillian(p, cfg):
    return build_liouvillian(build_hamiltonian(p, cfg), build_collapse(p, cfg))


@pytest.mark.parametrize("method", ["direct", "evolve", "iterative"])
def test_undriven_steady_state_is_ground(method):
    cfg = HilbertConfig(3, 4, True)
    st_ = steady_state(_liouvillian(SMALL.replace(eps1_mag=0.0), cfg), method)
    ref = np.zeros((cfg.dim, cfg.dim))
    ref[0, 0] = 1.0
    np.testing.assert_allclose(st_.matrix, ref, atol=1e-8)


def test_methods_agree_with_null_space_oracle():
    cfg = HilbertConfig(3, 4, True)
    L = _liouvillian(SMALL, cfg)
    H, C = cascade_hamiltonian(SMALL, 3, 4, True)
    ref = null_space_state(H, C)
    for method in ("direct", "evolve", "iterative"):
        rho = steady_state(L, method).matrix
        np.testing.assert_allclose(rho, ref, atol=1e-6, err_msg=method)


def test_direct_budget():
    L = _liouvillian(SMALL, HilbertConfig(3, 4, True))
    with pytest.raises(MemoryBudgetError):
        steady_state(L, "direct", direct_max_dim2=100)
    with pytest.raises(ValueError):
        steady_state(L, "magic")


def test_evolve_time_limit():
    L = _liouvillian(SMALL, HilbertConfig(3, 4, True))
    with pytest.raises(ResidualError):
        steady_state(L, "evolve", evolve_chunk=0.01, evolve_tmax=0.02)


def test_evolve_without_refinement_reports_noise_floor():
    L = _liouvillian(SMALL, HilbertConfig(3, 4, True))
    with pytest.raises(ResidualError, match="stalled"):
        steady_state(L, "evolve", refine=False)


# an uncoupled qubit (g = 0) has no unique stationary state, so g stays positive
params = st.builds(
    CircuitParams,
    kappa1=st.floats(5, 60), kappa2=st.floats(0.5, 2), eps1_mag=st.floats(0, 10),
    eps1_phase=st.floats(0, 2 * math.pi), g=st.floats(2, 20), delta_q=st.floats(150, 400),
    delta12=st.floats(-3, 3),
)


@settings(max_examples=12, deadline=None)
@given(p=params, method=st.sampled_from(["direct", "iterative"]))
def test_steady_state_invariants(p, method):
    cfg = HilbertConfig(3, 5, True)
    L = _liouvillian(p, cfg)
    state = steady_state(L, method)
    assert L.residual(state.matrix) <= 1e-8
    assert state.hermiticity_error() <= 1e-10
    assert abs(state.trace() - 1) <= 1e-8
    assert state.min_eigenvalue() >= -1e-8
    rho2 = partial_trace(state, "cavity2")
    assert abs(single_mode_moments(rho2)[0]) <= 1e-6
    # reduced and full expectations agree
    ops = build_operators(cfg)
    n_full = expect((ops.a2.conj().T @ ops.a2), state).real
    assert single_mode_moments(rho2)[1] == pytest.approx(n_full, abs=1e-12)


@settings(max_examples=6, deadline=None)
@given(phi=st.floats(0, 2 * math.pi))
def test_pump_phase_covariance(phi):
    cfg = HilbertConfig(3, 6, True)
    a = solve_fock(SMALL, cfg)
    b = solve_fock(SMALL.replace(eps1_phase=phi), cfg)
    assert b.var_min == pytest.approx(a.var_min, abs=1e-6)
    np.testing.assert_allclose(b.distribution, a.distribution, atol=1e-6)
    assert moment_error(b.rho2) == pytest.approx(moment_error(a.rho2), abs=1e-6)
    assert number_distribution(b.rho2).sum() == pytest.approx(1.0)
