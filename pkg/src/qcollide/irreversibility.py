"""Scrambling the bath labels between a forward and a reversed evolution.

After ``n`` zero-temperature collisions the bath qubits are relabelled by a
permutation ``pi`` and the inverse collisions are applied. The system ends
in ``c0|0> + c1 f_pi |1>`` plus a part orthogonal to ``|0^n>`` on the bath,
so its fidelity with the input depends on ``f_pi`` alone.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import core
from .bathsim import DENSE_LIMIT_PURE, _check_normalized
from .channel import CanonicalChannelParams, build_canonical
from .entanglement import geometric_pair_sum, one_minus_pow

ENUMERATION_LIMIT = 8
MC_BLOCK = 4096


@dataclass(frozen=True)
class Permutation:
    """Bijection of bath labels ``{1..n}``; ``image[k-1] = pi(k)``."""

    image: tuple[int, ...]

    def __post_init__(self):
        image = tuple(int(i) for i in self.image)
        object.__setattr__(self, "image", image)
        if sorted(image) != list(range(1, len(image) + 1)):
            raise ValueError(f"{image} is not a permutation of 1..{len(image)}")

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(tuple(range(1, n + 1)))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> "Permutation":
        return cls(tuple(rng.permutation(n) + 1))

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, k: int) -> int:
        return self.image[k - 1]

    def inverse(self) -> "Permutation":
        inv = [0] * self.n
        for k, j in enumerate(self.image, start=1):
            inv[j - 1] = k
        return Permutation(tuple(inv))

    def is_identity(self) -> bool:
        return self.image == tuple(range(1, self.n + 1))


@dataclass(frozen=True)
class ScrambleResult:
    f_pi: complex
    fidelity: float
    permutation: Permutation


@dataclass(frozen=True)
class AverageFidelity:
    mean: float
    method: Literal["exact_enumeration", "closed_form", "asymptotic", "monte_carlo"]
    samples: int = 0
    std_error: float = 0.0


def f_pi_closed(pi: Permutation, c: float, theta: float, n: int) -> complex:
    """Reconstruction amplitude for ``theta = 0``."""
    if theta != 0:
        raise ValueError("the closed form for f_pi holds only at theta = 0; use scramble_simulate")
    if pi.n != n:
        raise ValueError(f"permutation acts on {pi.n} labels, expected {n}")
    s2 = 1 - c * c
    inv = pi.inverse()
    terms = [c ** (k + inv(k) - 2) for k in range(1, n + 1)]
    return complex(c ** (2 * n) + s2 * math.fsum(terms))


def _f_pi_batch(images: np.ndarray, c: float) -> np.ndarray:
    """Vectorised ``f_pi_closed`` for rows of 0-based permutation images."""
    n = images.shape[1]
    powers = c ** np.arange(n, dtype=float)
    # sum_k c^(k-1) c^(pi(k)-1) equals the same sum with pi inverse
    return c ** (2 * n) + (1 - c * c) * (powers[None, :] * powers[images]).sum(axis=1)


def fidelity_of(c0: complex, c1: complex, f_pi: complex) -> float:
    _check_normalized(c0, c1)
    a0, a1 = abs(c0) ** 2, abs(c1) ** 2
    f2 = abs(f_pi) ** 2
    return float(a0 + a1 * (f2 + 2 * a0 * (complex(f_pi).real - f2)))


def _fidelity_batch(a0: float, a1: float, f: np.ndarray) -> np.ndarray:
    return a0 + a1 * (f * f + 2 * a0 * (f - f * f))


def _permute_bath(psi: np.ndarray, pi: Permutation) -> np.ndarray:
    m = pi.n + 1
    # the content of bath label k moves to label pi(k)
    axes = [0] + list(pi.inverse().image)
    return psi.reshape((2,) * m).transpose(axes).reshape(-1)


def _forward_permute_reverse(psi: np.ndarray, u: np.ndarray, pi: Permutation) -> np.ndarray:
    n = pi.n
    for k in range(1, n + 1):
        psi = core.apply_two_qubit_unitary(psi, u, (0, k))
    psi = _permute_bath(psi, pi)
    u_dag = u.conj().T
    for k in range(n, 0, -1):
        psi = core.apply_two_qubit_unitary(psi, u_dag, (0, k))
    return psi


def scramble_simulate(c0: complex, c1: complex, params: CanonicalChannelParams, pi: Permutation, n: int) -> ScrambleResult:
    """Statevector run of forward collisions, relabelling, inverse collisions.

    Works for any ``theta``. ``f_pi`` is read off a separate run started from
    ``|1>|0^n>``; the fidelity comes from the reduced system state of the run
    started from ``c0|0> + c1|1>``.
    """
    _check_normalized(c0, c1)
    if pi.n != n:
        raise ValueError(f"permutation acts on {pi.n} labels, expected {n}")
    if n > DENSE_LIMIT_PURE:
        raise ValueError(f"n={n} exceeds the dense limit {DENSE_LIMIT_PURE}")
    u = build_canonical(params)
    zeros = core.ket("0" * n)
    excited = _forward_permute_reverse(np.kron([0, 1], zeros).astype(complex), u, pi)
    f_pi = complex(excited[1 << n])
    psi_s = np.array([c0, c1], dtype=complex)
    out = _forward_permute_reverse(np.kron(psi_s, zeros), u, pi)
    rho_s = core.partial_trace(out, [0])
    fid = float(np.vdot(psi_s, rho_s @ psi_s).real)
    return ScrambleResult(f_pi=f_pi, fidelity=fid, permutation=pi)


def _all_permutations(n: int) -> np.ndarray:
    return np.array(list(itertools.permutations(range(n))), dtype=np.intp).reshape(-1, n)


def average_fidelity_exact(c0: complex, c1: complex, c: float, n: int) -> AverageFidelity:
    """Uniform average over all ``n!`` permutations, ``theta = 0``."""
    _check_normalized(c0, c1)
    if n > ENUMERATION_LIMIT:
        raise ValueError(f"n={n} exceeds the enumeration limit {ENUMERATION_LIMIT}")
    if n < 1:
        raise ValueError("n must be at least 1")
    f = _f_pi_batch(_all_permutations(n), c)
    values = _fidelity_batch(abs(c0) ** 2, abs(c1) ** 2, f)
    return AverageFidelity(math.fsum(values) / len(values), "exact_enumeration", samples=len(values))


def _mean_f_terms(c: float, n: int) -> tuple[float, float]:
    """Permutation averages ``I1`` and ``I2`` of the sum and squared sum."""
    geo = one_minus_pow(c, n) / (1 - c)
    i1 = geo**2 / n
    geo2 = one_minus_pow(c * c, n) / (1 - c * c)
    pair = geometric_pair_sum(c, n)
    i2 = geo2**2 / n + (pair**2 / (n * (n - 1)) if n > 1 else 0.0)
    return i1, i2


def average_fidelity_closed(c0: complex, c1: complex, c: float, n: int) -> AverageFidelity:
    _check_normalized(c0, c1)
    if n < 1:
        raise ValueError("n must be at least 1")
    if not (0 <= c <= 1):
        raise ValueError(f"c must lie in [0, 1], got {c}")
    if c == 1:
        # identity channel: every permutation reconstructs perfectly
        return AverageFidelity(1.0, "closed_form")
    s2 = 1 - c * c
    i1, i2 = _mean_f_terms(c, n)
    c2n = c ** (2 * n)
    f_mean = c2n + s2 * i1
    f2_mean = c2n * c2n + 2 * c2n * s2 * i1 + s2 * s2 * i2
    a0, a1 = abs(c0) ** 2, abs(c1) ** 2
    return AverageFidelity(a0 + a1 * (f2_mean + 2 * a0 * (f_mean - f2_mean)), "closed_form")


def average_fidelity_asymptotic(c: float, n: int) -> AverageFidelity:
    """Large-``n`` form for input ``|1>``, valid once ``c**n`` is negligible."""
    if not (0 <= c < 1):
        raise ValueError(f"need 0 <= c < 1, got {c}")
    if n < 2:
        raise ValueError("n must be at least 2")
    return AverageFidelity(1 / n + 4 * (c / (1 - c)) ** 2 / (n * (n - 1)), "asymptotic")


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))


def _sample_block(n: int, size: int, seed: int, block: int) -> np.ndarray:
    base = np.broadcast_to(np.arange(n, dtype=np.intp), (size, n))
    return _block_rng(seed, block).permuted(base, axis=1)


def _blocks(samples: int) -> list[tuple[int, int]]:
    return [(j, min(MC_BLOCK, samples - j * MC_BLOCK)) for j in range(-(-samples // MC_BLOCK))]


def sample_permutations(n: int, samples: int, seed: int) -> np.ndarray:
    """Uniform random permutations as rows of 0-based images.

    Block ``j`` of ``MC_BLOCK`` rows is drawn from its own stream seeded by
    ``(seed, j)``, so the rows do not depend on how blocks are scheduled.
    """
    return np.concatenate([_sample_block(n, size, seed, j) for j, size in _blocks(samples)])


def average_fidelity_montecarlo(
    c0: complex,
    c1: complex,
    params: CanonicalChannelParams,
    n: int,
    samples: int,
    seed: int,
    workers: int = 1,
    route: Literal["auto", "simulate"] = "auto",
) -> AverageFidelity:
    """Mean reconstruction fidelity over uniformly random permutations.

    ``theta = 0`` uses the closed-form amplitude; otherwise (or with
    ``route="simulate"``) each sample is a statevector run, limited to small
    ``n``. The result is identical for any ``workers`` count.
    """
    _check_normalized(c0, c1)
    if samples < 1:
        raise ValueError("samples must be at least 1")
    simulate = route == "simulate" or params.theta != 0
    if simulate and n > DENSE_LIMIT_PURE:
        raise ValueError(f"n={n} with theta != 0 exceeds the dense limit {DENSE_LIMIT_PURE}")
    c = math.cos(params.phi)
    a0, a1 = abs(c0) ** 2, abs(c1) ** 2

    def run(block):
        j, size = block
        images = _sample_block(n, size, seed, j)
        if not simulate:
            return _fidelity_batch(a0, a1, _f_pi_batch(images, c))
        return np.array(
            [scramble_simulate(c0, c1, params, Permutation(tuple(row + 1)), n).fidelity for row in images]
        )

    blocks = _blocks(samples)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, blocks))
    else:
        parts = [run(b) for b in blocks]
    values = np.concatenate(parts)
    mean = math.fsum(values) / samples
    if samples > 1:
        var = math.fsum((values - mean) ** 2) / (samples - 1)
        std_error = math.sqrt(var / samples)
    else:
        std_error = 0.0
    return AverageFidelity(mean, "monte_carlo", samples=samples, std_error=std_error)
