import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcollide import core
from qcollide.bathsim import simulate_dense
from qcollide.channel import (
    BathSpec,
    CanonicalChannelParams,
    GeneralUnitaryParams,
    QubitState,
    apply_channel_once,
    apply_channel_via_trace,
    bath_qubit_fidelity,
    build_canonical,
    build_general_unitary,
    build_hamiltonian,
    closed_form_state,
    continuous_time,
    decompose_partial_swap,
    decomposition_residuals,
    expm_hamiltonian,
    iterate_channel,
    lambda_of,
    partial_swap,
    swap_unitary,
    verify_fixed_point,
)

angles = st.floats(-10, 10, allow_nan=False)
probs = st.floats(0, 1)
phis = st.floats(0, math.pi / 2)


def _random_state(rng):
    d = rng.uniform()
    r = math.sqrt(d * (1 - d)) * rng.uniform()
    return QubitState(d, r * cmath.exp(1j * rng.uniform(0, 2 * math.pi)))


def test_bath_spec():
    bath = BathSpec.from_beta_e(0.0)
    assert bath.p == 0.5
    assert BathSpec.from_beta_e(50.0).p == 1.0
    assert np.allclose(BathSpec(0.8).xi(), np.diag([0.8, 0.2]))
    with pytest.raises(ValueError):
        BathSpec(1.1)


def test_qubit_state_validation():
    with pytest.raises(ValueError):
        QubitState(0.5, 0.6)
    with pytest.raises(ValueError):
        QubitState(-0.1)
    s = QubitState.from_pure(0.6, 0.8j)
    assert s.d == pytest.approx(0.36)
    assert s.k == pytest.approx(0.6 * -0.8j)


def test_general_unitary_all_zero_is_identity():
    assert np.allclose(build_general_unitary(GeneralUnitaryParams()), np.eye(4))


@settings(max_examples=50, deadline=None)
@given(phis, angles)
def test_general_reproduces_canonical(phi, theta):
    params = CanonicalChannelParams(phi, theta)
    assert np.allclose(build_general_unitary(params.general()), build_canonical(params), atol=1e-14)


def test_general_full_swap_of_01():
    # the image carries the phase e^{i(chi2 + varphi2)} = -i
    u = build_general_unitary(GeneralUnitaryParams(phi=math.pi / 2, varphi2=-math.pi / 2))
    assert np.allclose(u @ core.ket("01"), -1j * core.ket("10"), atol=1e-15)


def _general_matrix_oracle(chi0, chi1, chi2, chi3, phi, varphi2):
    # block form: diag phases on |00>, |11>, a U(2) block on {|01>, |10>}
    c, s = math.cos(phi), math.sin(phi)
    block = np.array(
        [
            [cmath.exp(1j * chi2) * c, -cmath.exp(1j * (chi3 - varphi2)) * s],
            [cmath.exp(1j * (chi2 + varphi2)) * s, cmath.exp(1j * chi3) * c],
        ]
    )
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0], u[3, 3] = cmath.exp(1j * chi0), cmath.exp(1j * chi1)
    u[1:3, 1:3] = block
    return u


@settings(max_examples=100, deadline=None)
@given(angles, angles, angles, angles, angles, angles)
def test_phi_folding_preserves_matrix(chi0, chi1, chi2, chi3, phi, varphi2):
    params = GeneralUnitaryParams(chi0, chi1, chi2, chi3, phi, varphi2)
    assert 0 <= params.phi <= math.pi / 2
    u = build_general_unitary(params)
    assert np.allclose(u, _general_matrix_oracle(chi0, chi1, chi2, chi3, phi, varphi2), atol=1e-12)
    assert np.allclose(u @ u.conj().T, np.eye(4), atol=1e-12)


def test_canonical_examples():
    assert np.allclose(build_canonical(CanonicalChannelParams(0, 0)), np.eye(4))
    full = build_canonical(CanonicalChannelParams(math.pi / 2, math.pi / 2))
    assert np.allclose(full, 1j * swap_unitary(), atol=1e-15)
    for phi in (0.0, 0.3, 1.2, math.pi / 2):
        expected = math.cos(phi) * np.eye(4) + 1j * math.sin(phi) * swap_unitary()
        assert np.allclose(partial_swap(phi), expected, atol=1e-15)
    with pytest.raises(ValueError):
        CanonicalChannelParams(2.0)


def _expm_oracle(h, terms=60):
    # Taylor series with scaling and squaring, independent of the block route
    a = 1j * h / 64
    out = np.eye(4, dtype=complex)
    term = np.eye(4, dtype=complex)
    for j in range(1, terms):
        term = term @ a / j
        out = out + term
    for _ in range(6):
        out = out @ out
    return out


@settings(max_examples=100, deadline=None)
@given(phis, st.floats(-math.pi, math.pi))
def test_hamiltonian_generates_canonical(phi, theta):
    params = CanonicalChannelParams(phi, theta)
    h = build_hamiltonian(params)
    gen = cmath.exp(0.5j * theta) * expm_hamiltonian(h)
    assert np.abs(gen - build_canonical(params)).max() < 1e-12
    assert np.abs(expm_hamiltonian(h) - _expm_oracle(h)).max() < 1e-12


def test_hamiltonian_examples():
    assert np.array_equal(build_hamiltonian(CanonicalChannelParams(0, 0)), np.zeros((4, 4)))
    w = np.linalg.eigvalsh(build_hamiltonian(CanonicalChannelParams(math.pi / 2, 0)))
    assert np.allclose(np.sort(w), [-math.pi / 2, 0, 0, math.pi / 2])


def test_lambda_examples():
    assert lambda_of(CanonicalChannelParams(0.4, 0.0), BathSpec(0.3)) == pytest.approx(1.0)
    assert abs(lambda_of(CanonicalChannelParams(0.4, math.pi / 2), BathSpec(0.5))) < 1e-15
    lam = lambda_of(CanonicalChannelParams(0.4, 0.9), BathSpec(1.0))
    assert lam == pytest.approx(cmath.exp(0.9j))
    assert abs(lam) == pytest.approx(1.0)


@settings(max_examples=50, deadline=None)
@given(angles, angles, angles, angles, angles, angles, probs)
def test_general_lambda_matches_partial_trace(chi0, chi1, chi2, chi3, phi, varphi2, p):
    params = GeneralUnitaryParams(chi0, chi1, chi2, chi3, phi, varphi2)
    bath = BathSpec(p)
    state = QubitState(0.5, 0.5)
    out = QubitState.from_matrix(apply_channel_via_trace(state.to_matrix(), build_general_unitary(params), bath))
    expected = math.cos(params.phi) * lambda_of(params, bath) * state.k
    assert abs(out.k - expected) < 1e-12


def test_single_step_examples():
    rng = np.random.default_rng(0)
    state = _random_state(rng)
    bath = BathSpec(0.3)
    out = apply_channel_once(state, CanonicalChannelParams(math.pi / 2, 0.7), bath)
    assert out.d == pytest.approx(0.3, abs=1e-15) and abs(out.k) < 1e-15
    same = apply_channel_once(state, CanonicalChannelParams(0.0, 0.0), bath)
    assert same.d == state.d and same.k == state.k


def test_half_swap_sequence():
    params = CanonicalChannelParams(math.pi / 4)
    bath = BathSpec(1.0)
    first = apply_channel_once(QubitState(0.0), params, bath)
    second = apply_channel_once(first, params, bath)
    assert first.d == pytest.approx(0.5, abs=1e-15)
    assert second.d == pytest.approx(0.75, abs=1e-15)
    via = apply_channel_via_trace(core.P1, build_canonical(params), bath)
    assert via[0, 0].real == pytest.approx(0.5, abs=1e-15)
    assert closed_form_state(QubitState(0.0), params, bath, 2).d == pytest.approx(0.75, abs=1e-15)
    dense = simulate_dense(core.P1, params, bath, 2)
    assert dense.reduced[0].d == pytest.approx(0.75, abs=1e-14)


def test_trace_route_identity_and_fixed_point():
    rng = np.random.default_rng(1)
    rho = _random_state(rng).to_matrix()
    bath = BathSpec(0.8)
    assert np.allclose(apply_channel_via_trace(rho, np.eye(4), bath), rho)
    u = build_general_unitary(GeneralUnitaryParams(*rng.uniform(-3, 3, 6)))
    assert np.allclose(apply_channel_via_trace(bath.xi(), u, bath), bath.xi(), atol=1e-14)


def test_trace_route_matches_once():
    rng = np.random.default_rng(2)
    params = CanonicalChannelParams(0.3, 0.7)
    bath = BathSpec(0.8)
    for _ in range(20):
        state = _random_state(rng)
        via = QubitState.from_matrix(apply_channel_via_trace(state.to_matrix(), build_canonical(params), bath))
        once = apply_channel_once(state, params, bath)
        assert abs(via.d - once.d) < 1e-14 and abs(via.k - once.k) < 1e-14


def test_trajectory_fixed_point_is_constant():
    bath = BathSpec(0.6)
    traj = iterate_channel(QubitState.thermal(bath), CanonicalChannelParams(0.4, 0.2), bath, 10)
    assert np.allclose(traj.d, 0.6) and np.allclose(traj.k, 0)
    assert len(traj) == 11


def test_trajectory_converges_monotonically():
    rng = np.random.default_rng(3)
    bath = BathSpec(0.7)
    traj = iterate_channel(_random_state(rng), CanonicalChannelParams(0.3, 0.5), bath, 150)
    dev_d = np.abs(traj.d - 0.7)
    dev_k = np.abs(traj.k)
    assert np.all(np.diff(dev_d) <= 1e-15) and np.all(np.diff(dev_k) <= 1e-15)
    assert dev_d[-1] < 1e-3


def test_trajectory_detects_mismatch():
    from unittest import mock

    bad = lambda d0, p, c2n: (1 - c2n) * p - c2n * d0  # noqa: E731
    with mock.patch("qcollide.channel._relaxed_population", bad):
        with pytest.raises(RuntimeError):
            iterate_channel(QubitState(0.05), CanonicalChannelParams(0.3), BathSpec(0.9), 3)


@settings(max_examples=100, deadline=None)
@given(angles, angles, angles, angles, angles, angles, probs)
def test_fixed_point_for_thermalizing_family(chi0, chi1, chi2, chi3, phi, varphi2, p):
    u = build_general_unitary(GeneralUnitaryParams(chi0, chi1, chi2, chi3, phi, varphi2))
    assert verify_fixed_point(u, BathSpec(p)) <= 1e-12


def test_fixed_point_counterexample():
    hadamard = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    assert verify_fixed_point(np.kron(hadamard, np.eye(2)), BathSpec(0.8)) > 0.1


def test_fixed_point_pure_corners():
    u = build_general_unitary(GeneralUnitaryParams(0.3, -1.1, 2.0, 0.5, 0.9, 1.7))
    assert verify_fixed_point(u, BathSpec(0.0)) <= 1e-12
    assert verify_fixed_point(u, BathSpec(1.0)) <= 1e-12


def test_decomposition_examples():
    dephase, pswap = decompose_partial_swap(CanonicalChannelParams(0.7, 0.7))
    assert np.allclose(dephase, np.eye(4))
    assert np.allclose(pswap, partial_swap(0.7))
    dephase, pswap = decompose_partial_swap(CanonicalChannelParams(0.7, 0.0))
    assert np.allclose(dephase @ pswap, build_canonical(CanonicalChannelParams(0.7, 0.0)), atol=1e-15)
    product, commute = decomposition_residuals(CanonicalChannelParams(0.2, 0.9))
    assert product < 1e-12 and commute < 1e-12


def test_fidelity_bound_examples():
    bath = BathSpec(0.4)
    assert bath_qubit_fidelity(QubitState.thermal(bath), CanonicalChannelParams(0.8, 0.3), bath) == pytest.approx(
        1.0, abs=1e-9
    )
    f = bath_qubit_fidelity(QubitState(0.0), CanonicalChannelParams(math.pi / 2), BathSpec(1.0))
    assert f == pytest.approx(0.0, abs=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 2**32 - 1), phis, st.floats(-math.pi, math.pi), probs)
def test_fidelity_bound_property(seed, phi, theta, p):
    state = _random_state(np.random.default_rng(seed))
    f = bath_qubit_fidelity(state, CanonicalChannelParams(phi, theta), BathSpec(p))
    assert f >= math.cos(phi) - 1e-10


def test_continuous_time_t2_relations():
    assert continuous_time(1.0, 0.5, BathSpec(1.0), 1e-4).T2 == pytest.approx(2.0)
    assert continuous_time(1.3, math.inf, BathSpec(0.6), 1e-4).T2 == pytest.approx(2.6)
    rates = continuous_time(1.0, 1.0, BathSpec(0.7), 1e-4)
    assert 1 / rates.T2 - (0.5 + 0.7 * 0.3) == pytest.approx(0.0, abs=1e-15)
    assert continuous_time(math.inf, math.inf, BathSpec(0.5), 1e-4).T2 == math.inf
    with pytest.raises(ValueError):
        continuous_time(1e-5, 1.0, BathSpec(0.5), 1.0)


def test_continuous_time_matches_discrete():
    tau0 = 1e-4
    bath = BathSpec(0.7)
    rates = continuous_time(1.0, 1.0, bath, tau0)
    start = QubitState(0.2, 0.3 + 0.1j)
    for t in (0.5, 1.0, 2.0):
        n = round(t / tau0)
        disc = closed_form_state(start, rates.params, bath, n)
        assert abs(disc.d - rates.d(t, start.d)) <= 1e-3 * rates.d(t, start.d)
        ref_k = rates.abs_k(t, abs(start.k))
        assert abs(abs(disc.k) - ref_k) <= 1e-3 * ref_k
