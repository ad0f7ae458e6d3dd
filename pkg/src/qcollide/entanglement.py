"""Multipartite entanglement from subset purities.

For an ``m``-qubit pure state the measure is::

    E_m = 2**(1 - m/2) * sqrt(2**m - 2 - S_m)

where ``S_m`` sums ``Tr(rho_b^2)`` over every nonempty proper subset ``b``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import core

BRUTE_FORCE_LIMIT = 14


@dataclass(frozen=True)
class EntanglementResult:
    value: float
    num_qubits: int
    method: Literal["closed_form", "brute_force"]


def _subset_purity(tensor: np.ndarray, axes: list[int], m: int) -> float:
    rest = [a for a in range(m) if a not in axes]
    mat = tensor.transpose(axes + rest).reshape(1 << len(axes), 1 << len(rest))
    # smaller Gram matrix, same nonzero spectrum on either side
    gram = mat @ mat.conj().T if len(axes) <= len(rest) else mat.conj().T @ mat
    return float(np.sum(np.abs(gram) ** 2))


def subset_purities(psi: np.ndarray) -> dict[frozenset, float]:
    """``Tr(rho_b^2)`` for every nonempty proper subset, computed independently."""
    psi = core.validate_pure(psi)
    m = core.num_qubits(psi)
    t = psi.reshape((2,) * m)
    out = {}
    for mask in range(1, (1 << m) - 1):
        axes = [q for q in range(m) if mask >> (m - 1 - q) & 1]
        out[frozenset(axes)] = _subset_purity(t, axes, m)
    return out


def entanglement_bruteforce(psi: np.ndarray) -> EntanglementResult:
    psi = np.asarray(psi, dtype=complex)
    m = core.num_qubits(psi)
    if m > BRUTE_FORCE_LIMIT:
        raise ValueError(f"{m} qubits exceeds the brute-force limit {BRUTE_FORCE_LIMIT}")
    psi = core.validate_pure(psi)
    if m == 1:
        return EntanglementResult(0.0, 1, "brute_force")
    t = psi.reshape((2,) * m)
    # each complementary pair {b, complement} counted once: b never holds qubit 0
    terms = []
    for mask in range(1, 1 << (m - 1)):
        axes = [q for q in range(1, m) if mask >> (m - 1 - q) & 1]
        terms.append(_subset_purity(t, axes, m))
    s_m = 2 * math.fsum(terms)
    slack = max((1 << m) - 2 - s_m, 0.0)
    return EntanglementResult(2 ** (1 - m / 2) * math.sqrt(slack), m, "brute_force")


def _decay_factors(c: float, n: int) -> tuple[float, float]:
    c2 = c * c
    return 1 - c2**n, (1 - c2 ** (n + 1)) / (1 + c2)


def _check_closed_form_args(c1_abs: float, c: float, n: int):
    if not (0 <= c1_abs <= 1 and 0 <= c <= 1):
        raise ValueError("need 0 <= |c1| <= 1 and 0 <= c <= 1")
    if n < 1:
        raise ValueError("n must be at least 1")


def entanglement_closed_form(c1_abs: float, c: float, n: int) -> EntanglementResult:
    """Entanglement of the zero-temperature collision state after ``n`` collisions.

    Depends only on ``|c1|`` and ``c = cos(phi)``::

        E = 2 |c1|^2 sqrt((1 - c^2n) (1 - (1 - c^(2n+2)) / (1 + c^2)))

    Every marginal on the system plus a bath subset ``b`` is
    ``|v><v| + x_b |0..0><0..0|`` with ``<0..0|v> = c0``, so its purity is
    ``(1 - x_b)^2 + x_b^2 + 2 |c0|^2 x_b``. The overlap term is kept here;
    :func:`entanglement_no_overlap_form` drops it.
    """
    _check_closed_form_args(c1_abs, c, n)
    decay, tail = _decay_factors(c, n)
    value = 2 * c1_abs**2 * math.sqrt(max(decay * (1 - tail), 0.0))
    return EntanglementResult(value, n + 1, "closed_form")


def entanglement_no_overlap_form(c1_abs: float, c: float, n: int) -> EntanglementResult:
    """``2|c1| sqrt((1 - c^2n)(1 - |c1|^2 (1 - c^(2n+2)) / (1 + c^2)))``.

    Treats ``|v>`` and ``|0..0>`` as orthogonal in every marginal. Exact for
    ``|c1|`` in {0, 1}; otherwise its square exceeds the true ``E^2`` by
    ``4 |c0|^2 |c1|^2 (1 - c^2n)``.
    """
    _check_closed_form_args(c1_abs, c, n)
    decay, tail = _decay_factors(c, n)
    value = 2 * c1_abs * math.sqrt(max(decay * (1 - c1_abs**2 * tail), 0.0))
    return EntanglementResult(value, n + 1, "closed_form")


def entanglement_limit(c: float) -> float:
    """Large-``n`` value for input ``|1>``: ``2c / sqrt(1 + c^2)``."""
    return 2 * c / math.sqrt(1 + c * c)


def one_minus_pow(x: float, m: int) -> float:
    """``1 - x**m`` without cancellation near ``x = 1``."""
    if x == 0:
        return 1.0 if m > 0 else 0.0
    if x > 0:
        return -math.expm1(m * math.log(x))
    return 1 - x**m


def geometric_pair_sum(x: float, n: int) -> float:
    """``sum_{k=0}^{n-1} sum_{k' != k} x^(k+k')``; equals ``n(n-1)`` at ``x = 1``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    if not (0 <= x <= 1):
        raise ValueError(f"x must lie in [0, 1], got {x}")
    if x == 1:
        return float(n * (n - 1))
    return 2 * x * one_minus_pow(x, n - 1) * one_minus_pow(x, n) / ((1 - x) ** 2 * (1 + x))


def ghz_state(m: int) -> np.ndarray:
    psi = np.zeros(1 << m, dtype=complex)
    psi[0] = psi[-1] = 1 / math.sqrt(2)
    return psi


def ghz_reference(n: int) -> float:
    """Entanglement of the ``(n+1)``-qubit GHZ state."""
    if n < 1:
        raise ValueError("n must be at least 1")
    return math.sqrt(2) * math.sqrt(-math.expm1(-n * math.log(2)))
