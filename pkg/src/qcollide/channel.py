"""Thermalizing two-qubit unitaries and the single-qubit collision map.

The system qubit meets a fresh bath qubit in the thermal state
``xi = p|0><0| + q|1><1|`` at every step. A unitary leaves ``xi (x) xi``
invariant for all ``p`` exactly when it acts separately on ``|00>``,
``|11>`` and ``span{|01>, |10>}``; the map it induces on the system is then
fully described by the swap angle ``phi`` and one complex number ``lam``::

    d'  = d cos^2(phi) + p sin^2(phi)
    k'  = cos(phi) * lam * k

with ``d = <0|rho|0>`` and ``k = <0|rho|1>``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import core
from .core import SIGMA_X, SIGMA_Y, SIGMA_Z

HALF_PI = math.pi / 2


@dataclass(frozen=True)
class BathSpec:
    """Thermal single-qubit bath state, weight ``p`` on the ground state ``|0>``."""

    p: float
    beta_e: float | None = None

    def __post_init__(self):
        if not (0.0 <= self.p <= 1.0) or math.isnan(self.p):
            raise ValueError(f"p must lie in [0, 1], got {self.p}")

    @classmethod
    def from_beta_e(cls, beta_e: float) -> "BathSpec":
        return cls(p=0.5 * (1.0 + math.tanh(beta_e)), beta_e=beta_e)

    @property
    def q(self) -> float:
        return 1.0 - self.p

    def xi(self) -> np.ndarray:
        return np.diag([self.p, self.q]).astype(complex)


@dataclass(frozen=True)
class QubitState:
    """Single-qubit state ``d P0 + (1-d) P1 + k|0><1| + k*|1><0|``."""

    d: float
    k: complex = 0j

    def __post_init__(self):
        d, k = float(self.d), complex(self.k)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "k", k)
        if not (-core.TOL <= d <= 1 + core.TOL):
            raise ValueError(f"population d={d} outside [0, 1]")
        if abs(k) ** 2 > d * (1 - d) + core.TOL:
            raise ValueError(f"|k|^2={abs(k) ** 2:.3g} exceeds d(1-d)={d * (1 - d):.3g}")

    @classmethod
    def from_matrix(cls, rho: np.ndarray) -> "QubitState":
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got {rho.shape}")
        return cls(d=rho[0, 0].real, k=rho[0, 1])

    @classmethod
    def from_pure(cls, c0: complex, c1: complex) -> "QubitState":
        return cls(d=abs(c0) ** 2, k=c0 * np.conj(c1))

    @classmethod
    def thermal(cls, bath: BathSpec) -> "QubitState":
        return cls(d=bath.p, k=0j)

    def to_matrix(self) -> np.ndarray:
        return np.array([[self.d, self.k], [np.conj(self.k), 1 - self.d]], dtype=complex)

    def distance_to(self, bath: BathSpec) -> float:
        """Trace distance to the thermal state."""
        return math.hypot(self.d - bath.p, abs(self.k))


def _wrap(angle: float) -> float:
    return math.remainder(angle, 2 * math.pi)


@dataclass(frozen=True)
class GeneralUnitaryParams:
    """Six angles of the most general thermalizing unitary.

    ``phi`` is folded into ``[0, pi/2]`` on construction; the compensating
    shifts of ``varphi2``, ``chi2`` and ``chi3`` leave the 4x4 matrix unchanged.
    """

    chi0: float = 0.0
    chi1: float = 0.0
    chi2: float = 0.0
    chi3: float = 0.0
    phi: float = 0.0
    varphi2: float = 0.0

    def __post_init__(self):
        phi, chi2, chi3, varphi2 = (_wrap(self.phi), self.chi2, self.chi3, self.varphi2)
        if phi < 0:
            # sin flips sign, absorbed by varphi2 -> varphi2 + pi
            phi, varphi2 = -phi, varphi2 + math.pi
        if phi > HALF_PI:
            # cos flips sign, absorbed by a pi phase on both block columns
            phi = math.pi - phi
            chi2, chi3, varphi2 = chi2 + math.pi, chi3 + math.pi, varphi2 + math.pi
        object.__setattr__(self, "phi", phi)
        object.__setattr__(self, "chi2", chi2)
        object.__setattr__(self, "chi3", chi3)
        object.__setattr__(self, "varphi2", varphi2)


@dataclass(frozen=True)
class CanonicalChannelParams:
    """Swap angle ``phi`` in ``[0, pi/2]`` and dephasing angle ``theta``."""

    phi: float
    theta: float = 0.0

    def __post_init__(self):
        if not (0.0 <= self.phi <= HALF_PI):
            raise ValueError(f"phi must lie in [0, pi/2], got {self.phi}")

    def general(self) -> GeneralUnitaryParams:
        return GeneralUnitaryParams(
            chi0=self.theta, chi1=self.theta, chi2=0.0, chi3=0.0, phi=self.phi, varphi2=HALF_PI
        )


def build_general_unitary(params: GeneralUnitaryParams) -> np.ndarray:
    c, s = math.cos(params.phi), math.sin(params.phi)
    u = np.zeros((4, 4), dtype=complex)
    e = np.exp
    u[0, 0] = e(1j * params.chi0)
    u[3, 3] = e(1j * params.chi1)
    # columns are images of |01> and |10>
    u[1, 1] = e(1j * params.chi2) * c
    u[2, 1] = e(1j * (params.chi2 + params.varphi2)) * s
    u[2, 2] = e(1j * params.chi3) * c
    u[1, 2] = -e(1j * (params.chi3 - params.varphi2)) * s
    return u


def build_canonical(params: CanonicalChannelParams) -> np.ndarray:
    c, s = math.cos(params.phi), math.sin(params.phi)
    phase = np.exp(1j * params.theta)
    return np.array(
        [
            [phase, 0, 0, 0],
            [0, c, 1j * s, 0],
            [0, 1j * s, c, 0],
            [0, 0, 0, phase],
        ],
        dtype=complex,
    )


def build_hamiltonian(params: CanonicalChannelParams) -> np.ndarray:
    xx_yy = np.kron(SIGMA_X, SIGMA_X) + np.kron(SIGMA_Y, SIGMA_Y)
    return 0.5 * (params.phi * xx_yy + params.theta * np.kron(SIGMA_Z, SIGMA_Z))


def expm_hamiltonian(h: np.ndarray) -> np.ndarray:
    """``exp(iH)`` for ``H`` acting on the invariant blocks {00}, {11}, {01, 10}."""
    h = np.asarray(h, dtype=complex)
    out = np.zeros((4, 4), dtype=complex)
    out[0, 0] = np.exp(1j * h[0, 0])
    out[3, 3] = np.exp(1j * h[3, 3])
    w, v = np.linalg.eigh(h[1:3, 1:3])
    out[1:3, 1:3] = (v * np.exp(1j * w)) @ v.conj().T
    return out


def swap_unitary() -> np.ndarray:
    return np.eye(4, dtype=complex)[[0, 2, 1, 3]]


def partial_swap(phi: float) -> np.ndarray:
    """``V(phi) = cos(phi) 1 + i sin(phi) SWAP``."""
    return build_canonical(CanonicalChannelParams(phi, phi))


def unitary_of(params) -> np.ndarray:
    if isinstance(params, CanonicalChannelParams):
        return build_canonical(params)
    return build_general_unitary(params)


def _as_general(params) -> GeneralUnitaryParams:
    if isinstance(params, CanonicalChannelParams):
        return params.general()
    return params


def lambda_of(params, bath: BathSpec) -> complex:
    if isinstance(params, CanonicalChannelParams):
        return complex(bath.p * np.exp(1j * params.theta) + bath.q * np.exp(-1j * params.theta))
    g = params
    return complex(bath.p * np.exp(1j * (g.chi0 - g.chi3)) + bath.q * np.exp(1j * (g.chi2 - g.chi1)))


def _relaxed_population(d0: float, p: float, c2n: float) -> float:
    return (1 - c2n) * p + c2n * d0


def apply_channel_once(state: QubitState, params, bath: BathSpec) -> QubitState:
    c = math.cos(_as_general(params).phi)
    return QubitState(
        d=state.d * c * c + bath.p * (1 - c * c),
        k=c * lambda_of(params, bath) * state.k,
    )


def apply_channel_via_trace(rho: np.ndarray, u: np.ndarray, bath: BathSpec) -> np.ndarray:
    """``Tr_B[U (rho (x) xi) U^dagger]``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2) or np.shape(u) != (4, 4):
        raise ValueError("expected a 2x2 state and a 4x4 unitary")
    u = np.asarray(u, dtype=complex)
    joint = u @ np.kron(rho, bath.xi()) @ u.conj().T
    return core.partial_trace(joint, [0])


def closed_form_state(state: QubitState, params, bath: BathSpec, n: int) -> QubitState:
    """State after ``n`` collisions, evaluated directly rather than stepwise."""
    if n < 0:
        raise ValueError("n must be non-negative")
    c = math.cos(_as_general(params).phi)
    lam = lambda_of(params, bath)
    return QubitState(
        d=_relaxed_population(state.d, bath.p, c ** (2 * n)),
        k=state.k * (lam * c) ** n,
    )


@dataclass
class Trajectory:
    """States after 0, 1, ..., n collisions."""

    states: list[QubitState] = field(default_factory=list)

    def __len__(self):
        return len(self.states)

    def __getitem__(self, n):
        return self.states[n]

    def __iter__(self):
        return iter(enumerate(self.states))

    @property
    def d(self) -> np.ndarray:
        return np.array([s.d for s in self.states])

    @property
    def k(self) -> np.ndarray:
        return np.array([s.k for s in self.states])


def iterate_channel(
    state: QubitState, params, bath: BathSpec, n: int, check_tol: float | None = 1e-12
) -> Trajectory:
    """Apply the collision map ``n`` times.

    With ``check_tol`` set, every step is compared with the closed form and
    a ``RuntimeError`` is raised on disagreement.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    states = [state]
    for step in range(1, n + 1):
        states.append(apply_channel_once(states[-1], params, bath))
        if check_tol is not None:
            ref = closed_form_state(state, params, bath, step)
            cur = states[-1]
            if abs(cur.d - ref.d) > check_tol or abs(cur.k - ref.k) > check_tol:
                raise RuntimeError(
                    f"stepwise and closed-form states differ at n={step}: "
                    f"d {cur.d!r} vs {ref.d!r}, k {cur.k!r} vs {ref.k!r}"
                )
    return Trajectory(states)


def verify_fixed_point(u: np.ndarray, bath: BathSpec) -> float:
    """Max-entry deviation of ``U (xi (x) xi) U^dagger`` from ``xi (x) xi``."""
    u = np.asarray(u, dtype=complex)
    xx = np.kron(bath.xi(), bath.xi())
    return float(np.abs(u @ xx @ u.conj().T - xx).max())


def decompose_partial_swap(
    params: CanonicalChannelParams, tol: float = 1e-12
) -> tuple[np.ndarray, np.ndarray]:
    """Split ``V_z(phi, theta)`` into ``V_z(0, theta - phi)`` after ``V(phi)``.

    Raises ``RuntimeError`` if the product or the commutation of
    ``V_z(phi, 0)`` with ``V_z(0, theta)`` fails at ``tol``.
    """
    dephase = build_canonical(CanonicalChannelParams(0.0, params.theta - params.phi))
    pswap = partial_swap(params.phi)
    res = decomposition_residuals(params)
    if max(res) > tol:
        raise RuntimeError(f"partial-swap decomposition residuals {res} exceed {tol}")
    return dephase, pswap


def decomposition_residuals(params: CanonicalChannelParams) -> tuple[float, float]:
    """(product residual, commutation residual) as max-entry norms."""
    target = build_canonical(params)
    dephase = build_canonical(CanonicalChannelParams(0.0, params.theta - params.phi))
    product = dephase @ partial_swap(params.phi)
    a = build_canonical(CanonicalChannelParams(params.phi, 0.0))
    b = build_canonical(CanonicalChannelParams(0.0, params.theta))
    return float(np.abs(product - target).max()), float(np.abs(a @ b - b @ a).max())


def bath_qubit_fidelity(state: QubitState, params, bath: BathSpec) -> float:
    """Fidelity with ``xi`` of the bath qubit right after one collision."""
    u = unitary_of(params)
    joint = u @ np.kron(state.to_matrix(), bath.xi()) @ u.conj().T
    return core.fidelity(core.partial_trace(joint, [1]), bath.xi())


@dataclass(frozen=True)
class RelaxationRates:
    tau0: float
    T1: float
    T_pf: float
    T2: float
    p: float

    @property
    def phi(self) -> float:
        return math.sqrt(self.tau0 / self.T1)

    @property
    def theta(self) -> float:
        return math.sqrt(self.tau0 / (2 * self.T_pf))

    @property
    def params(self) -> CanonicalChannelParams:
        return CanonicalChannelParams(self.phi, self.theta)

    def d(self, t, d0: float):
        decay = np.exp(-np.asarray(t) / self.T1)
        return decay * d0 + (1 - decay) * self.p

    def abs_k(self, t, abs_k0: float):
        return np.exp(-np.asarray(t) / self.T2) * abs_k0


def continuous_time(T1: float, T_pf: float, bath: BathSpec, tau0: float) -> RelaxationRates:
    """Rates of the small-angle limit; ``T_pf = inf`` means ``theta = 0``."""
    if not (T1 > 0 and T_pf > 0 and tau0 > 0):
        raise ValueError("T1, T_pf and tau0 must be positive")
    if tau0 / T1 > HALF_PI**2:
        raise ValueError("tau0/T1 too large: swap angle would exceed pi/2")
    inv_t2 = 1 / (2 * T1) + bath.p * bath.q / T_pf
    t2 = 1 / inv_t2 if inv_t2 > 0 else math.inf
    return RelaxationRates(tau0=tau0, T1=T1, T_pf=T_pf, T2=t2, p=bath.p)
