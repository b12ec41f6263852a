import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_fixed_point, cascade_drift, cascade_moments
from sqzc.effective import CircuitParams, reduce
from sqzc.errors import AboveThresholdError, ConvergenceError, NoBracketError
from sqzc.meanfield import (
    MomentMatrix,
    build_drift_diffusion,
    literal_p_uncertainty,
    min_variance,
    optimum_detuning,
    quadrature_variance,
    self_consistent_solve,
    squeezing_db,
    stability_eigenvalues,
    steady_covariance,
)

NEAR = CircuitParams(kappa1=50.0, kappa2=1.0, g=56.0, delta_q=600.0)
FREE = CircuitParams(kappa1=50.0, kappa2=1.0, g=0.0)


def single_pa(eps1, kappa1=2.0):
    """Amplifier moments; the drift is block triangular so cavity 2 does not feed back."""
    dd = build_drift_diffusion(eps1, 0.0, 0.0, kappa1, 1.0)
    return steady_covariance(dd)


def test_drift_structure_undriven():
    dd = build_drift_diffusion(0, 0, 0, 50.0, 1.0)
    expect = np.diag([-25.0, -25.0, -0.5, -0.5]).astype(complex)
    expect[2, 0] = expect[3, 1] = -math.sqrt(50.0)
    np.testing.assert_array_equal(dd.A, expect)
    np.testing.assert_array_equal(dd.D, np.zeros((4, 4)))


def test_drift_entries_echo_inputs():
    dd = build_drift_diffusion(10.0, 0.3j, 2.0, 50.0, 1.0)
    A, D = cascade_drift(10.0, 0.3j, 2.0, 50.0, 1.0)
    np.testing.assert_array_equal(dd.A, A)
    np.testing.assert_array_equal(dd.D, D)


@given(e1=st.complex_numbers(max_magnitude=5), e=st.complex_numbers(max_magnitude=5),
       delta=st.floats(-5, 5))
def test_drift_conjugation_symmetry(e1, e, delta):
    dd = build_drift_diffusion(e1, e, delta, 50.0, 1.0)
    perm = [1, 0, 3, 2]
    np.testing.assert_allclose(dd.A[np.ix_(perm, perm)].conj(), dd.A)
    np.testing.assert_allclose(dd.D[np.ix_(perm, perm)].conj(), dd.D)


def test_single_pa_moments():
    V = single_pa(0.5)
    assert V.aa(1) == pytest.approx(1 / 3, abs=1e-10)
    assert V.n_bar(1) == pytest.approx(1 / 6, abs=1e-10)
    assert quadrature_variance(V, mode=1) == pytest.approx(1 / 3, abs=1e-10)
    n, aa = V.n_bar(2), V.aa(2)
    assert literal_p_uncertainty(V) == pytest.approx(2 * (n - aa.real) + 0.5, abs=1e-12)


@settings(max_examples=60)
@given(frac=st.floats(0.001, 0.999))
def test_single_pa_closed_form(frac):
    k1 = 2.0
    e1 = frac * k1 / 2
    V = single_pa(e1, k1)
    assert quadrature_variance(V, mode=1) == pytest.approx(0.5 - e1 / (k1 + 2 * e1), abs=1e-9)


def test_single_pa_threshold_limit():
    vals = [quadrature_variance(single_pa(0.5 * 2 * (1 - d)), mode=1) for d in (1e-3, 1e-5, 1e-7)]
    assert abs(vals[-1] - 0.25) < 1e-6
    assert vals[0] > vals[1] > vals[2] > 0.25


def test_vacuum_moments():
    V = steady_covariance(build_drift_diffusion(0, 0, 0.3, 50.0, 1.0))
    np.testing.assert_array_equal(V.V, 0)
    for th in np.linspace(0, math.pi, 7):
        assert quadrature_variance(V, 2, th) == 0.5
    assert min_variance(V) == (0.0, 0.5)


def test_squeezing_axis_convention():
    # <aa> > 0 squeezes P, <aa> < 0 squeezes X
    th, _ = min_variance(MomentMatrix(np.diag([0, 0, 0.3, 0.3]).astype(complex)))
    assert th == pytest.approx(math.pi / 2)
    V = np.zeros((4, 4), complex)
    V[2, 2] = V[3, 3] = -0.3
    V[2, 3] = V[3, 2] = 0.1
    th, var = min_variance(MomentMatrix(V))
    assert th == pytest.approx(0.0) and var == pytest.approx(0.1 - 0.3 + 0.5)
    assert quadrature_variance(MomentMatrix(V), 2, 0.0) == pytest.approx(var)


def test_stability_eigenvalues():
    rep = stability_eigenvalues(build_drift_diffusion(3.0, 0, 0, 50.0, 1.0))
    np.testing.assert_allclose(sorted(rep.eigenvalues.real), [-28, -22, -0.5, -0.5], atol=1e-12)
    assert rep.stable
    rep = stability_eigenvalues(build_drift_diffusion(25.0, 0, 0, 50.0, 1.0))
    assert rep.pa_unstable and abs(rep.eigenvalues.real.max()) < 1e-12
    rep = stability_eigenvalues(build_drift_diffusion(0, 0, 0, 50.0, 1.0))
    np.testing.assert_allclose(sorted(rep.eigenvalues.real), [-25, -25, -0.5, -0.5])


def test_above_threshold_names_threshold():
    with pytest.raises(AboveThresholdError) as exc:
        steady_covariance(build_drift_diffusion(26.0, 0, 0, 50.0, 1.0))
    assert exc.value.which == "parametric"
    with pytest.raises(AboveThresholdError) as exc:
        steady_covariance(build_drift_diffusion(1.0, 0.6, 0.1, 50.0, 1.0))
    assert exc.value.which == "cavity"


@settings(max_examples=40, deadline=None)
@given(e1=st.floats(0.1, 20), delta=st.floats(-3, 3), eps=st.complex_numbers(max_magnitude=0.3))
def test_covariance_matches_independent_solver(e1, delta, eps):
    V = steady_covariance(build_drift_diffusion(e1, eps, delta, 50.0, 1.0))
    ref = cascade_moments(e1, eps, delta, 50.0, 1.0)
    np.testing.assert_allclose(V.V, ref, atol=1e-9 * max(1, np.abs(ref).max()))
    assert V.invariant_error() <= 1e-9


def test_squeezing_db():
    assert squeezing_db(0.5) == 0.0
    assert squeezing_db(0.25) == pytest.approx(3.0103, abs=1e-4)
    assert squeezing_db(0.0997) == pytest.approx(7.0, abs=0.01)
    with pytest.raises(ValueError):
        squeezing_db(0.0)


def test_no_qubit_solve_is_linear_cascade():
    sol = self_consistent_solve(FREE.replace(eps1_mag=6.0))
    assert sol.iterations == 1 and sol.eps_converged == 0
    np.testing.assert_allclose(sol.V.V, cascade_moments(6.0, 0, 0, 50.0, 1.0), atol=1e-12)


def test_fixed_point_multi_start():
    p = NEAR.replace(eps1_mag=10.0, delta12=4.95)
    sol = self_consistent_solve(p)
    eff = reduce(p)
    assert abs(sol.eps_converged + 2j * eff.zeta * sol.V.aa(2)) <= 1e-8 * (1 + abs(sol.eps_converged))
    for k in range(8):
        eps0 = 0.05 * cmath.exp(2j * math.pi * k / 8)
        alt = self_consistent_solve(p, eps0=eps0)
        assert abs(alt.eps_converged - sol.eps_converged) <= 1e-8
    eps_ref, V_ref = brute_fixed_point(10.0, 50.0, eff.kappa2_tilde, eff.delta12_base, eff.zeta, 0j)
    assert abs(eps_ref - sol.eps_converged) <= 1e-8
    np.testing.assert_allclose(sol.V.V, V_ref, atol=1e-8)


def test_nonconvergence_carries_last_iterate():
    with pytest.raises(ConvergenceError) as exc:
        self_consistent_solve(NEAR.replace(eps1_mag=10.0, delta12=4.95), max_iter=2)
    assert exc.value.last is not None


@settings(max_examples=10, deadline=None)
@given(phi=st.floats(0, 2 * math.pi))
def test_phase_covariance(phi):
    p = NEAR.replace(eps1_mag=8.0, delta12=5.0)
    a = self_consistent_solve(p)
    b = self_consistent_solve(p.replace(eps1_phase=phi))
    assert b.var_min() == pytest.approx(a.var_min(), abs=1e-9)
    assert b.V.n_bar(2) == pytest.approx(a.V.n_bar(2), abs=1e-9)
    assert b.V.aa(2) == pytest.approx(a.V.aa(2) * cmath.exp(1j * phi), abs=1e-9)
    shift = (b.theta_min() - a.theta_min() - phi / 2) % math.pi
    assert min(shift, math.pi - shift) < 1e-7


@settings(max_examples=20, deadline=None)
@given(e1=st.floats(0.5, 12), d=st.floats(3, 7), th=st.floats(0, math.pi))
def test_uncertainty_relation(e1, d, th):
    try:
        sol = self_consistent_solve(NEAR.replace(eps1_mag=e1, delta12=d))
    except AboveThresholdError:
        return
    v1 = quadrature_variance(sol.V, 2, th)
    v2 = quadrature_variance(sol.V, 2, th + math.pi / 2)
    assert v1 * v2 >= 0.25 - 1e-9


@pytest.mark.parametrize("eps1,expected", [(2.0, 0.36532), (6.0, 0.19278), (10.0, 0.097586), (12.0, 0.067568)])
def test_no_qubit_optimum_at_zero_detuning(eps1, expected):
    opt = optimum_detuning(FREE, eps1=eps1)
    assert abs(opt.delta12_opt) <= 1e-4
    assert opt.var_min_opt == pytest.approx(expected, abs=1e-5)
    ref = cascade_moments(eps1, 0, 0, 50.0, 1.0)
    assert opt.var_min_opt == pytest.approx(ref[2, 3].real - abs(ref[2, 2]) + 0.5, abs=1e-9)


def test_qubit_optimum_matches_matched_linewidth_cascade():
    opt = optimum_detuning(NEAR, eps1=10.0)
    eff = reduce(NEAR)
    matched = optimum_detuning(FREE.replace(kappa2=eff.kappa2_tilde), eps1=10.0)
    assert opt.var_min_opt == pytest.approx(matched.var_min_opt, abs=1e-6)
    assert opt.var_min_opt == pytest.approx(0.0974877, abs=1e-6)
    # squeezing axis aligned with P at the optimum
    assert opt.solution.theta_min() == pytest.approx(math.pi / 2, abs=1e-3)


def test_optimum_detuning_shifts_with_pump():
    prev = None
    for e1 in (2.0, 6.0, 10.0, 12.0):
        dt = optimum_detuning(NEAR, eps1=e1).delta_tilde_opt
        assert dt < -reduce(NEAR).xi
        if prev is not None:
            assert dt < prev
        prev = dt


def test_no_bracket_when_window_misses_valley():
    with pytest.raises(NoBracketError):
        optimum_detuning(NEAR, eps1=6.0, search_window=(10.0, 12.0), points=11)


def test_pinned_effective_detuning():
    p = NEAR.replace(eps1_mag=6.0)
    sol = self_consistent_solve(p, delta_tilde=-0.1)
    assert sol.delta_tilde == -0.1
