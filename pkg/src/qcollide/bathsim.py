"""Many-qubit simulation of the collision sequence.

Qubit 0 is the system; bath qubit ``k`` (1-based collision order) is qubit
``k`` of the joint register. The dense path handles any temperature at small
``n``. At zero temperature the joint state stays inside the span of
``|0>|0^n>``, ``|1>|0^n>`` and ``|0>|1_k>``, so it is stored as ``n + 2``
amplitudes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import core
from .channel import BathSpec, CanonicalChannelParams, QubitState, build_canonical

DENSE_LIMIT_PURE = 12
DENSE_LIMIT_MIXED = 10


@dataclass(frozen=True)
class SparseThermalState:
    """Zero-temperature collision state after ``n`` collisions.

    ``a0`` multiplies ``|0>|0^n>``, ``a1`` multiplies ``|1>|0^n>`` and
    ``b[k-1]`` multiplies ``|0>|1_k>``.
    """

    n: int
    a0: complex
    a1: complex
    b: np.ndarray

    def norm_squared(self) -> float:
        return math.fsum([abs(self.a0) ** 2, abs(self.a1) ** 2, *(np.abs(self.b) ** 2)])

    def to_dense(self) -> np.ndarray:
        m = self.n + 1
        psi = np.zeros(1 << m, dtype=complex)
        psi[0] = self.a0
        psi[1 << self.n] = self.a1
        for k in range(1, self.n + 1):
            psi[1 << (self.n - k)] = self.b[k - 1]
        return psi

    def reduced_states(self) -> list[QubitState]:
        """Single-qubit marginals, system first, read off the amplitudes."""
        b2 = np.abs(self.b) ** 2
        out = [QubitState(d=1 - abs(self.a1) ** 2, k=self.a0 * np.conj(self.a1))]
        for k in range(self.n):
            out.append(QubitState(d=1 - b2[k], k=self.a0 * np.conj(self.b[k])))
        return out


@dataclass
class CollisionReport:
    joint: np.ndarray | SparseThermalState
    reduced: list[QubitState]
    fidelities: list[float]

    @property
    def n(self) -> int:
        return len(self.reduced) - 1


def _make_report(joint, reduced: list[QubitState], bath: BathSpec) -> CollisionReport:
    xi = bath.xi()
    fids = [core.fidelity(r.to_matrix(), xi) for r in reduced]
    return CollisionReport(joint=joint, reduced=reduced, fidelities=fids)


def simulate_dense(initial, params: CanonicalChannelParams, bath: BathSpec, n: int) -> CollisionReport:
    """Run ``n`` collisions on the full ``(n+1)``-qubit register.

    ``initial`` is a 2-vector or a 2x2 density matrix. A state vector is kept
    when both the input is pure and ``p = 1``; otherwise the joint density
    matrix is conjugated collision by collision.
    """
    initial = np.asarray(initial, dtype=complex)
    if n < 1:
        raise ValueError("need at least one collision")
    pure = core.is_pure(initial) and bath.p == 1.0
    limit = DENSE_LIMIT_PURE if pure else DENSE_LIMIT_MIXED
    if n > limit:
        raise ValueError(f"n={n} exceeds the dense limit {limit}")
    u = build_canonical(params)
    if pure:
        state = core.validate_pure(initial)
        for _ in range(n):
            state = np.kron(state, [1, 0])
    else:
        rho = initial if initial.ndim == 2 else core.to_density(initial)
        state = core.validate_density(rho)
        xi = bath.xi()
        for _ in range(n):
            state = np.kron(state, xi)
    for k in range(1, n + 1):
        state = core.apply_two_qubit_unitary(state, u, (0, k))
    reduced = [QubitState.from_matrix(core.partial_trace(state, [q])) for q in range(n + 1)]
    return _make_report(state, reduced, bath)


def simulate_sparse_T0(c0: complex, c1: complex, params: CanonicalChannelParams, n: int) -> SparseThermalState:
    """Zero-temperature collisions on ``c0|0> + c1|1>``, one bath qubit at a time."""
    _check_normalized(c0, c1)
    if n < 0:
        raise ValueError("n must be non-negative")
    c, s = math.cos(params.phi), math.sin(params.phi)
    phase = np.exp(1j * params.theta)
    a0, a1 = complex(c0), complex(c1)
    b = np.zeros(n, dtype=complex)
    for k in range(n):
        # |0>|1_j>|0> and |0>|0^k>|0> pick up the |00> phase; |1>|0^k>|0> splits
        b[:k] *= phase
        b[k] = 1j * s * a1
        a0 *= phase
        a1 *= c
    return SparseThermalState(n=n, a0=a0, a1=a1, b=b)


def sparse_T0_direct(c0: complex, c1: complex, params: CanonicalChannelParams, n: int) -> SparseThermalState:
    """Same state as :func:`simulate_sparse_T0`, each amplitude written down directly."""
    _check_normalized(c0, c1)
    c, s, th = math.cos(params.phi), math.sin(params.phi), params.theta
    k = np.arange(1, n + 1)
    b = c1 * 1j * s * c ** (k - 1.0) * np.exp(1j * (n - k) * th)
    return SparseThermalState(n=n, a0=complex(c0 * np.exp(1j * n * th)), a1=complex(c1 * c**n), b=b)


def sparse_report(state: SparseThermalState) -> CollisionReport:
    return _make_report(state, state.reduced_states(), BathSpec(1.0))


def _check_normalized(c0, c1, tol: float = core.TOL):
    if abs(abs(c0) ** 2 + abs(c1) ** 2 - 1) > tol:
        raise ValueError(f"|c0|^2 + |c1|^2 = {abs(c0) ** 2 + abs(c1) ** 2!r}, expected 1")


def qubit_deviations(report: CollisionReport, bath: BathSpec) -> np.ndarray:
    """Trace distance of each qubit's marginal to ``xi``, system first."""
    return np.array([r.distance_to(bath) for r in report.reduced])


def thermalization_error(report: CollisionReport, bath: BathSpec) -> float:
    return float(qubit_deviations(report, bath).max())
