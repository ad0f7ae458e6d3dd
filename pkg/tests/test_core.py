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
    QubitState,
    closed_form_state,
    partial_swap,
    swap_unitary,
)


def test_basis_projector_product():
    out = core.tensor_product(core.P0, core.P0)
    expected = np.zeros((4, 4))
    expected[0, 0] = 1
    assert np.array_equal(out, expected)


def test_thermal_product_is_diagonal():
    p, q = 0.8, 0.2
    xi = BathSpec(p).xi()
    out = core.tensor_product(xi, xi)
    assert np.allclose(out, np.diag([p * p, p * q, p * q, q * q]), atol=1e-15)


def test_embedding_of_pure_state():
    c0, c1 = 0.6, 0.8j
    out = core.tensor_product(np.array([c0, c1]), core.ket("0"))
    assert np.allclose(out, [c0, 0, c1, 0])


def test_tensor_product_rejects_mixed_kinds():
    with pytest.raises(ValueError):
        core.tensor_product(core.ket("0"), core.P0)


def test_identity_gate_leaves_state():
    rng = np.random.default_rng(1)
    psi = core.random_pure_state(3, rng)
    rho = core.random_density(3, rng)
    eye = np.eye(4)
    assert np.allclose(core.apply_two_qubit_unitary(psi, eye, (0, 2)), psi)
    assert np.allclose(core.apply_two_qubit_unitary(rho, eye, (1, 2)), rho)


def test_swap_exchanges_factors():
    rng = np.random.default_rng(2)
    a = core.random_pure_state(1, rng)
    b = core.random_pure_state(1, rng)
    out = core.apply_two_qubit_unitary(np.kron(a, b), swap_unitary(), (0, 1))
    assert np.allclose(out, np.kron(b, a))


def test_partial_swap_on_10():
    out = core.apply_two_qubit_unitary(core.ket("10"), partial_swap(math.pi / 4), (0, 1))
    expected = partial_swap(math.pi / 4) @ core.ket("10")
    assert np.allclose(out, expected, atol=1e-15)
    r = 1 / math.sqrt(2)
    assert np.allclose(out, r * core.ket("10") + 1j * r * core.ket("01"))


def _embed_oracle(u, m, i, j):
    # full 2^m matrix assembled entry by entry from bit strings
    dim = 1 << m
    full = np.zeros((dim, dim), dtype=complex)
    for col in range(dim):
        bits = [(col >> (m - 1 - q)) & 1 for q in range(m)]
        sub_in = 2 * bits[i] + bits[j]
        for sub_out in range(4):
            out_bits = list(bits)
            out_bits[i], out_bits[j] = sub_out >> 1, sub_out & 1
            row = sum(b << (m - 1 - q) for q, b in enumerate(out_bits))
            full[row, col] += u[sub_out, sub_in]
    return full


@pytest.mark.parametrize("targets", [(0, 1), (1, 0), (0, 3), (3, 1), (2, 3)])
def test_two_qubit_gate_matches_embedded_matrix(targets):
    rng = np.random.default_rng(3)
    m = 4
    u = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))[0]
    full = _embed_oracle(u, m, *targets)
    psi = core.random_pure_state(m, rng)
    rho = core.random_density(m, rng)
    assert np.allclose(core.apply_two_qubit_unitary(psi, u, targets), full @ psi, atol=1e-13)
    out = core.apply_two_qubit_unitary(rho, u, targets)
    assert np.allclose(out, full @ rho @ full.conj().T, atol=1e-13)


def test_gate_target_validation():
    with pytest.raises(ValueError):
        core.apply_two_qubit_unitary(core.ket("00"), np.eye(4), (1, 1))
    with pytest.raises(ValueError):
        core.apply_two_qubit_unitary(core.ket("00"), np.eye(4), (0, 2))


def test_partial_trace_product():
    assert np.allclose(core.partial_trace(core.ket("00"), [0]), core.P0)


def test_partial_trace_bell():
    bell = (core.ket("01") + core.ket("10")) / math.sqrt(2)
    assert np.allclose(core.partial_trace(bell, [0]), np.eye(2) / 2)
    assert np.allclose(core.partial_trace(core.to_density(bell), [1]), np.eye(2) / 2)


def test_partial_trace_pure_and_mixed_paths_agree():
    rng = np.random.default_rng(4)
    psi = core.random_pure_state(4, rng)
    rho = core.to_density(psi)
    for keep in ([0], [2], [1, 3], [0, 2, 3]):
        assert np.allclose(core.partial_trace(psi, keep), core.partial_trace(rho, keep), atol=1e-14)


def test_partial_trace_validation():
    with pytest.raises(ValueError):
        core.partial_trace(core.ket("00"), [])
    with pytest.raises(ValueError):
        core.partial_trace(core.ket("00"), [2])


def test_reduced_states_of_collision_output_match_closed_form():
    params = CanonicalChannelParams(0.3)
    bath = BathSpec(1.0)
    report = simulate_dense(np.array([0, 1], dtype=complex), params, bath, 3)
    sys_state = QubitState.from_matrix(core.partial_trace(report.joint, [0]))
    ref = closed_form_state(QubitState(0.0), params, bath, 3)
    assert abs(sys_state.d - ref.d) < 1e-14
    assert abs(sys_state.k - ref.k) < 1e-14
    # bath qubit k holds the excitation with weight s^2 c^(2(k-1))
    c, s = math.cos(0.3), math.sin(0.3)
    for k in range(1, 4):
        assert abs(report.reduced[k].d - (1 - s * s * c ** (2 * (k - 1)))) < 1e-14


def test_purity_values():
    assert core.purity(core.P0) == pytest.approx(1.0)
    assert core.purity(np.eye(2) / 2) == pytest.approx(0.5)
    assert core.purity(BathSpec(0.8).xi()) == pytest.approx(0.68, abs=1e-15)


def test_fidelity_values():
    rng = np.random.default_rng(5)
    rho = core.random_density(2, rng)
    assert core.fidelity(rho, rho) == pytest.approx(1.0, abs=1e-7)
    assert core.fidelity(core.P0, core.P1) == 0.0
    for p in (0.0, 0.3, 0.8, 1.0):
        assert core.fidelity(core.P0, BathSpec(p).xi()) == pytest.approx(math.sqrt(p), abs=1e-12)


def _fidelity_oracle(rho, sigma):
    # eigen-decomposition route, independent of the svd form used in core
    w, v = np.linalg.eigh(rho)
    sr = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    ev = np.linalg.eigvalsh(sr @ sigma @ sr)
    return float(np.sum(np.sqrt(np.clip(ev, 0, None))))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_fidelity_matches_eigen_route(seed, m):
    rng = np.random.default_rng(seed)
    rho = core.random_density(m, rng)
    sigma = core.random_density(m, rng)
    f = core.fidelity(rho, sigma)
    assert 0.0 <= f <= 1.0
    assert f == pytest.approx(_fidelity_oracle(rho, sigma), abs=1e-8)
    assert f == pytest.approx(core.fidelity(sigma, rho), abs=1e-8)


def test_fidelity_pure_states_is_overlap():
    rng = np.random.default_rng(6)
    a = core.random_pure_state(3, rng)
    b = core.random_pure_state(3, rng)
    f = core.fidelity(core.to_density(a), core.to_density(b))
    assert f == pytest.approx(abs(np.vdot(a, b)), abs=1e-9)


def test_validation_rejects_bad_states():
    with pytest.raises(ValueError):
        core.validate_density(np.diag([1.2, -0.2]))
    with pytest.raises(ValueError):
        core.validate_density(np.array([[0.5, 0.5], [0, 0.5]]))
    with pytest.raises(ValueError):
        core.validate_pure(np.array([1, 1], dtype=complex))
    with pytest.raises(ValueError):
        core.num_qubits(np.zeros(3))


def test_trace_distance():
    assert core.trace_distance(core.P0, core.P1) == pytest.approx(1.0)
    assert core.trace_distance(core.P0, core.P0) == 0.0
