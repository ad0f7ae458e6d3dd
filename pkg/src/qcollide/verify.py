"""End-to-end cross-checks between independent computation routes.

Each check returns a list of ``(label, measured, tolerance)`` triples and
passes when every measured value is within its tolerance. ``full=True`` runs
the sizes used by the acceptance suite; the default is a reduced sweep.
"""

from __future__ import annotations

import contextlib
import math
import zlib
from dataclasses import dataclass
from typing import Callable
from unittest import mock

import numpy as np

from . import bathsim, channel, core, entanglement, irreversibility
from .channel import BathSpec, CanonicalChannelParams, GeneralUnitaryParams, QubitState

EXACT = 1e-12
NUMERIC = 1e-10
ENTANGLEMENT_TOL = 1e-9
ENUMERATION_TOL = 1e-10
ASYMPTOTIC_REL = 1e-9
CONTINUUM_REL = 1e-3
MC_SIGMAS = 4.0

Measurement = tuple[str, float, float]


@dataclass(frozen=True)
class Check:
    name: str
    suite: str
    func: Callable[[np.random.Generator, bool], list[Measurement]]
    description: str


@dataclass
class CheckResult:
    name: str
    passed: bool
    measurements: list[Measurement]
    error: str | None = None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        if self.error:
            return f"{status} {self.name}: {self.error}"
        parts = ", ".join(f"{lab}={val:.3g} (tol {tol:.0e})" for lab, val, tol in self.measurements)
        return f"{status} {self.name}: {parts}"


def random_general_params(rng) -> GeneralUnitaryParams:
    a = rng.uniform(-math.pi, math.pi, size=6)
    return GeneralUnitaryParams(*a)


def random_canonical_params(rng) -> CanonicalChannelParams:
    return CanonicalChannelParams(rng.uniform(0, math.pi / 2), rng.uniform(-math.pi, math.pi))


def random_qubit_state(rng) -> QubitState:
    return QubitState.from_matrix(core.random_density(1, rng))


def random_amplitudes(rng) -> tuple[complex, complex]:
    a = rng.uniform()
    return (
        math.sqrt(1 - a) * np.exp(1j * rng.uniform(0, 2 * math.pi)),
        math.sqrt(a) * np.exp(1j * rng.uniform(0, 2 * math.pi)),
    )


def _max(values) -> float:
    return float(max(values, default=0.0))


def check_core(rng, full):
    m_max = 6 if full else 4
    ptrace, complement, pure_fid = [], [], []
    for m in range(2, m_max + 1):
        ma = int(rng.integers(1, m))
        a = core.random_density(ma, rng)
        b = core.random_density(m - ma, rng)
        ptrace.append(np.abs(core.partial_trace(core.tensor_product(a, b), range(ma)) - a).max())
        psi = core.random_pure_state(m, rng)
        keep = [q for q in range(m) if rng.uniform() < 0.5] or [0]
        rest = [q for q in range(m) if q not in keep]
        if rest:
            complement.append(
                abs(core.purity(core.partial_trace(psi, keep)) - core.purity(core.partial_trace(psi, rest)))
            )
        phi = core.random_pure_state(m, rng)
        pure_fid.append(abs(core.fidelity(core.to_density(psi), core.to_density(phi)) - abs(np.vdot(psi, phi))))
    return [
        ("partial_trace_of_product", _max(ptrace), NUMERIC),
        ("complement_purity", _max(complement), NUMERIC),
        ("pure_fidelity", _max(pure_fid), 1e-9),
    ]


def check_fixed_point(rng, full):
    draws = 100 if full else 20
    grid = np.linspace(0, 1, 11)
    dev = 0.0
    for _ in range(draws):
        u = channel.build_general_unitary(random_general_params(rng))
        for p in grid:
            dev = max(dev, channel.verify_fixed_point(u, BathSpec(float(p))))
    # the thermal state must also be a fixed point of the closed-form iterate
    closed = 0.0
    for p in grid:
        bath = BathSpec(float(p))
        prm = random_canonical_params(rng)
        for n in range(1, 11):
            st = channel.closed_form_state(QubitState.thermal(bath), prm, bath, n)
            closed = max(closed, abs(st.d - bath.p), abs(st.k))
    return [("unitary_fixed_point", dev, EXACT), ("closed_form_fixed_point", closed, EXACT)]


def check_dynamics(rng, full):
    draws, steps, dense_n = (50, 25, 8) if full else (10, 25, 5)
    step_err, dense_err = 0.0, 0.0
    for i in range(draws):
        bath = BathSpec(float(rng.uniform()))
        prm = random_general_params(rng) if i % 2 else random_canonical_params(rng)
        state = random_qubit_state(rng)
        traj = channel.iterate_channel(state, prm, bath, steps, check_tol=None)
        for n in range(steps + 1):
            ref = channel.closed_form_state(state, prm, bath, n)
            step_err = max(step_err, abs(traj[n].d - ref.d), abs(traj[n].k - ref.k))
        cprm = random_canonical_params(rng)
        # cycle the register size so every n up to dense_n is covered
        n_dense = 1 + i % dense_n
        rep = bathsim.simulate_dense(state.to_matrix(), cprm, bath, n_dense)
        ref = channel.closed_form_state(state, cprm, bath, n_dense)
        dense_err = max(dense_err, abs(rep.reduced[0].d - ref.d), abs(rep.reduced[0].k - ref.k))
    return [("stepwise_vs_closed", step_err, EXACT), ("dense_vs_closed", dense_err, EXACT)]


def check_fidelity_bound(rng, full):
    draws = 1000 if full else 200
    worst = math.inf
    for _ in range(draws):
        prm = random_canonical_params(rng)
        bath = BathSpec(float(rng.uniform()))
        f = channel.bath_qubit_fidelity(random_qubit_state(rng), prm, bath)
        worst = min(worst, f - math.cos(prm.phi))
    sat = channel.bath_qubit_fidelity(QubitState(0.0, 0j), CanonicalChannelParams(math.pi / 2, 0.0), BathSpec(1.0))
    return [("bound_violation", max(-worst, 0.0), NUMERIC), ("saturation", abs(sat), NUMERIC)]


def check_hamiltonian(rng, full):
    draws = 100 if full else 20
    gen_err, dec_err, comm_err = 0.0, 0.0, 0.0
    for _ in range(draws):
        prm = random_canonical_params(rng)
        v = channel.build_canonical(prm)
        w = np.exp(0.5j * prm.theta) * channel.expm_hamiltonian(channel.build_hamiltonian(prm))
        gen_err = max(gen_err, np.abs(w - v).max())
        prod_res, comm_res = channel.decomposition_residuals(prm)
        dec_err, comm_err = max(dec_err, prod_res), max(comm_err, comm_res)
    return [("generator", gen_err, EXACT), ("decomposition", dec_err, EXACT), ("commutation", comm_err, EXACT)]


def check_continuous_time(rng, full):
    tau0, bath = 1e-4, BathSpec(0.7)
    rates = channel.continuous_time(1.0, 1.0, bath, tau0)
    state = QubitState(0.2, 0.3 + 0.1j)
    times = [0.5, 1.0, 2.0] if full else [0.5, 1.0]
    traj = channel.iterate_channel(state, rates.params, bath, round(max(times) / tau0), check_tol=None)
    rel = 0.0
    for t in times:
        st = traj[round(t / tau0)]
        rel = max(
            rel,
            abs(st.d - rates.d(t, state.d)) / abs(rates.d(t, state.d)),
            abs(abs(st.k) - rates.abs_k(t, abs(state.k))) / rates.abs_k(t, abs(state.k)),
        )
    identity = abs(1 / rates.T2 - (1 / (2 * rates.T1) + bath.p * bath.q / rates.T_pf)) * rates.T2
    sat_cold = channel.continuous_time(1.3, 0.4, BathSpec(1.0), tau0)
    sat_theta0 = channel.continuous_time(1.3, math.inf, bath, tau0)
    saturation = max(abs(r.T2 - 2 * r.T1) / r.T2 for r in (sat_cold, sat_theta0))
    return [
        ("discrete_vs_continuum", rel, CONTINUUM_REL),
        ("rate_identity", identity, 4 * np.finfo(float).eps),
        ("T2_eq_2T1", saturation, 4 * np.finfo(float).eps),
    ]


def check_sparse_dense(rng, full):
    draws, n_max = (20, 10) if full else (5, 6)
    err, norm_err, direct_err = 0.0, 0.0, 0.0
    for _ in range(draws):
        c0, c1 = random_amplitudes(rng)
        prm = random_canonical_params(rng)
        for n in range(1, n_max + 1):
            sparse = bathsim.simulate_sparse_T0(c0, c1, prm, n)
            dense = bathsim.simulate_dense(np.array([c0, c1]), prm, BathSpec(1.0), n).joint
            err = max(err, np.abs(sparse.to_dense() - dense).max())
            direct = bathsim.sparse_T0_direct(c0, c1, prm, n)
            direct_err = max(direct_err, np.abs(sparse.to_dense() - direct.to_dense()).max())
            norm_err = max(norm_err, abs(sparse.norm_squared() - 1))
    return [("sparse_vs_dense", err, EXACT), ("stepwise_vs_direct", direct_err, EXACT), ("norm", norm_err, EXACT)]


def check_entanglement(rng, full):
    draws, n_max = (30, 6) if full else (8, 5)
    err = 0.0
    for _ in range(draws):
        c0, c1 = random_amplitudes(rng)
        prm = random_canonical_params(rng)
        for n in range(1, n_max + 1):
            psi = bathsim.simulate_sparse_T0(c0, c1, prm, n).to_dense()
            brute = entanglement.entanglement_bruteforce(psi).value
            closed = entanglement.entanglement_closed_form(abs(c1), math.cos(prm.phi), n).value
            err = max(err, abs(brute - closed))
    phi = float(rng.uniform(0, math.pi / 2))
    sin2 = abs(entanglement.entanglement_closed_form(1.0, math.cos(phi), 1).value - math.sin(2 * phi))
    ghz = max(
        abs(entanglement.entanglement_bruteforce(entanglement.ghz_state(n + 1)).value - entanglement.ghz_reference(n))
        for n in range(1, n_max + 1)
    )
    c = 0.9
    n = math.ceil(math.log(1e-12) / math.log(c * c)) + 1
    asym = abs(entanglement.entanglement_closed_form(1.0, c, n).value - entanglement.entanglement_limit(c))
    return [
        ("closed_vs_bruteforce", err, ENTANGLEMENT_TOL),
        ("n1_equals_sin2phi", sin2, EXACT),
        ("ghz_reference", ghz, EXACT),
        ("asymptote_c0.9", asym, 1e-6),
    ]


def check_average_fidelity(rng, full):
    draws, n_max = (10, 7) if full else (4, 6)
    err = 0.0
    for _ in range(draws):
        c0, c1 = random_amplitudes(rng)
        c = float(rng.uniform(0, 1))
        for n in range(1, n_max + 1):
            exact = irreversibility.average_fidelity_exact(c0, c1, c, n).mean
            closed = irreversibility.average_fidelity_closed(c0, c1, c, n).mean
            err = max(err, abs(exact - closed))
    closed = irreversibility.average_fidelity_closed(0, 1, 0.5, 40).mean
    asym = irreversibility.average_fidelity_asymptotic(0.5, 40).mean
    ident = 0.0
    for n in range(1, n_max + 1):
        c0, c1 = random_amplitudes(rng)
        prm = CanonicalChannelParams(float(rng.uniform(0, math.pi / 2)), float(rng.uniform(-1, 1)))
        pi = irreversibility.Permutation.identity(n)
        f = irreversibility.f_pi_closed(pi, math.cos(prm.phi), 0.0, n)
        ident = max(
            ident,
            abs(irreversibility.fidelity_of(c0, c1, f) - 1),
            abs(irreversibility.scramble_simulate(c0, c1, prm, pi, n).fidelity - 1),
        )
    return [
        ("enumeration_vs_closed", err, ENUMERATION_TOL),
        ("asymptotic_rel", abs(asym - closed) / closed, ASYMPTOTIC_REL),
        ("identity_fidelity", ident, EXACT),
    ]


def check_f_pi(rng, full):
    draws, n_max = (50, 8) if full else (6, 6)
    err = 0.0
    for n in range(1, n_max + 1):
        for _ in range(draws):
            prm = CanonicalChannelParams(float(rng.uniform(0, math.pi / 2)), 0.0)
            pi = irreversibility.Permutation.random(n, rng)
            c0, c1 = random_amplitudes(rng)
            sim = irreversibility.scramble_simulate(c0, c1, prm, pi, n)
            closed = irreversibility.f_pi_closed(pi, math.cos(prm.phi), 0.0, n)
            err = max(err, abs(sim.f_pi - closed))
    return [("closed_vs_simulation", err, EXACT)]


def check_montecarlo(rng, full):
    samples = 100_000 if full else 20_000
    n, seed = 6, int(rng.integers(2**32))
    c0, c1 = random_amplitudes(rng)
    prm = CanonicalChannelParams(float(rng.uniform(0.1, 1.2)), 0.0)
    exact = irreversibility.average_fidelity_exact(c0, c1, math.cos(prm.phi), n).mean
    one = irreversibility.average_fidelity_montecarlo(c0, c1, prm, n, samples, seed, workers=1)
    many = irreversibility.average_fidelity_montecarlo(c0, c1, prm, n, samples, seed, workers=4)
    z = abs(one.mean - exact) / one.std_error
    same = (one.mean.hex(), one.std_error.hex()) == (many.mean.hex(), many.std_error.hex())
    return [("sigmas_from_exact", z, MC_SIGMAS), ("worker_count_mismatch", float(not same), 0.0)]


CHECKS = [
    Check("core.linear_algebra", "core", check_core, "partial trace, complement purity, pure fidelity"),
    Check("channel.fixed_point", "channel", check_fixed_point, "U(xi x xi)U^+ = xi x xi for all p"),
    Check("channel.closed_form_dynamics", "channel", check_dynamics, "stepwise = closed form = dense"),
    Check("channel.fidelity_bound", "channel", check_fidelity_bound, "bath fidelity >= cos phi"),
    Check("channel.hamiltonian", "channel", check_hamiltonian, "generator and partial-swap factorization"),
    Check("channel.continuous_time", "channel", check_continuous_time, "T1/T2 exponential limit"),
    Check("bathsim.sparse_vs_dense", "bathsim", check_sparse_dense, "zero-temperature sparse state"),
    Check("entanglement.closed_form", "entanglement", check_entanglement, "closed form vs bipartition sum"),
    Check("irreversibility.average_fidelity", "irreversibility", check_average_fidelity, "enumeration vs closed"),
    Check("irreversibility.f_pi", "irreversibility", check_f_pi, "f_pi vs statevector reversal"),
    Check("irreversibility.montecarlo", "irreversibility", check_montecarlo, "Monte Carlo estimator"),
]

PERTURBATIONS = {
    # flips the sign of the initial-population term of the closed-form iterate
    "population-sign": lambda d0, p, c2n: (1 - c2n) * p - c2n * d0,
}


@contextlib.contextmanager
def perturbed(name: str | None):
    if name is None:
        yield
        return
    if name not in PERTURBATIONS:
        raise ValueError(f"unknown perturbation {name!r}; choose from {sorted(PERTURBATIONS)}")
    with mock.patch.object(channel, "_relaxed_population", PERTURBATIONS[name]):
        yield


def select(filter_: str | None = None) -> list[Check]:
    if not filter_:
        return list(CHECKS)
    return [c for c in CHECKS if filter_ in c.name or filter_ == c.suite]


def run_check(check: Check, seed: int = 0, full: bool = False) -> CheckResult:
    rng = np.random.default_rng([seed, zlib.crc32(check.name.encode())])
    try:
        meas = check.func(rng, full)
    except Exception as exc:  # a crash is a failed check, reported by name
        return CheckResult(check.name, False, [], f"{type(exc).__name__}: {exc}")
    passed = all(val <= tol for _, val, tol in meas)
    return CheckResult(check.name, passed, meas)


def run_all(filter_=None, seed=0, full=False, perturbation=None) -> list[CheckResult]:
    with perturbed(perturbation):
        return [run_check(c, seed, full) for c in select(filter_)]
