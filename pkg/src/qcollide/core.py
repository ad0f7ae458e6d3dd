"""Dense linear algebra for a handful of qubits.

Pure states are 1-D complex arrays of length ``2**m``; density matrices are
square 2-D complex arrays. Qubit 0 is the most significant bit of the
amplitude index, so ``|q0 q1 ... q_{m-1}>`` sits at index
``q0 * 2**(m-1) + ... + q_{m-1}``.
"""

from __future__ import annotations

import numpy as np

TOL = 1e-10

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

P0 = np.array([[1, 0], [0, 0]], dtype=complex)
P1 = np.array([[0, 0], [0, 1]], dtype=complex)


def num_qubits(state: np.ndarray) -> int:
    dim = state.shape[0]
    m = dim.bit_length() - 1
    if dim < 1 or 1 << m != dim:
        raise ValueError(f"dimension {dim} is not a power of two")
    return m


def is_pure(state: np.ndarray) -> bool:
    if state.ndim == 1:
        return True
    if state.ndim == 2 and state.shape[0] == state.shape[1]:
        return False
    raise ValueError(f"not a state vector or square matrix: shape {state.shape}")


def validate_density(rho: np.ndarray, tol: float = TOL) -> np.ndarray:
    """Check Hermiticity, unit trace and positivity; return ``rho`` as complex."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got {rho.shape}")
    num_qubits(rho)
    if not np.all(np.isfinite(rho)):
        raise ValueError("density matrix has non-finite entries")
    if np.abs(rho - rho.conj().T).max() > tol:
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise ValueError(f"density matrix trace is {np.trace(rho).real}, expected 1")
    if np.linalg.eigvalsh(rho).min() < -tol:
        raise ValueError("density matrix has negative eigenvalues")
    return rho


def validate_pure(psi: np.ndarray, tol: float = TOL) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex)
    if psi.ndim != 1:
        raise ValueError(f"state vector must be 1-D, got {psi.shape}")
    num_qubits(psi)
    if not np.all(np.isfinite(psi)):
        raise ValueError("state vector has non-finite entries")
    if abs(np.vdot(psi, psi).real - 1) > tol:
        raise ValueError("state vector is not normalized")
    return psi


def ket(bits: str) -> np.ndarray:
    """Computational basis vector, e.g. ``ket('010')``."""
    psi = np.zeros(1 << len(bits), dtype=complex)
    psi[int(bits, 2)] = 1
    return psi


def to_density(psi: np.ndarray) -> np.ndarray:
    return np.outer(psi, psi.conj())


def tensor_product(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Kronecker product with ``a`` on the more significant qubits."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if is_pure(a) != is_pure(b):
        raise ValueError("cannot mix a state vector and a density matrix")
    return np.kron(a, b)


def _check_targets(targets, m: int) -> tuple[int, int]:
    i, j = (int(t) for t in targets)
    if i == j:
        raise ValueError(f"targets must be distinct, got ({i}, {j})")
    if not (0 <= i < m and 0 <= j < m):
        raise ValueError(f"targets ({i}, {j}) out of range for {m} qubits")
    return i, j


def _apply_to_axes(tensor: np.ndarray, u4: np.ndarray, i: int, j: int) -> np.ndarray:
    # u4 indexed as (out_i, out_j, in_i, in_j)
    out = np.tensordot(u4, tensor, axes=([2, 3], [i, j]))
    return np.moveaxis(out, [0, 1], [i, j])


def apply_two_qubit_unitary(state: np.ndarray, u: np.ndarray, targets) -> np.ndarray:
    """Apply the 4x4 ``u`` to qubits ``targets = (i, j)``, ``i`` being the
    more significant qubit of ``u``'s basis ``{|00>, |01>, |10>, |11>}``."""
    state = np.asarray(state, dtype=complex)
    m = num_qubits(state)
    i, j = _check_targets(targets, m)
    u4 = np.asarray(u, dtype=complex).reshape(2, 2, 2, 2)
    if is_pure(state):
        out = _apply_to_axes(state.reshape((2,) * m), u4, i, j)
        return out.reshape(-1)
    t = state.reshape((2,) * (2 * m))
    t = _apply_to_axes(t, u4, i, j)
    t = _apply_to_axes(t, u4.conj(), m + i, m + j)
    dim = 1 << m
    return t.reshape(dim, dim)


def partial_trace(state: np.ndarray, keep) -> np.ndarray:
    """Reduced density matrix on ``keep`` (kept qubits in ascending order)."""
    state = np.asarray(state, dtype=complex)
    m = num_qubits(state)
    keep = sorted({int(k) for k in keep})
    if not keep:
        raise ValueError("keep set must be nonempty")
    if keep[0] < 0 or keep[-1] >= m:
        raise ValueError(f"keep indices {keep} out of range for {m} qubits")
    rest = [k for k in range(m) if k not in keep]
    dk, dr = 1 << len(keep), 1 << len(rest)
    if is_pure(state):
        mat = state.reshape((2,) * m).transpose(keep + rest).reshape(dk, dr)
        return mat @ mat.conj().T
    perm = keep + rest
    t = state.reshape((2,) * (2 * m)).transpose(perm + [m + k for k in perm])
    return np.einsum("ijkj->ik", t.reshape(dk, dr, dk, dr))


def purity(rho: np.ndarray) -> float:
    rho = np.asarray(rho, dtype=complex)
    # Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    return float(np.sum(np.abs(rho) ** 2))


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(rho)
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def _det2(m: np.ndarray) -> float:
    return float((m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]).real)


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Root fidelity ``Tr sqrt(sqrt(rho) sigma sqrt(rho))``, clipped to [0, 1].

    Qubits use ``sqrt(Tr(rho sigma) + 2 sqrt(det rho det sigma))``.
    """
    rho = np.asarray(rho, dtype=complex)
    sigma = np.asarray(sigma, dtype=complex)
    if rho.shape != sigma.shape:
        raise ValueError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    if rho.shape == (2, 2):
        overlap = np.trace(rho @ sigma).real
        # explicit 2x2 determinants; LU-based det returns nan on subnormal entries
        dets = max(_det2(rho), 0.0) * max(_det2(sigma), 0.0)
        f = np.sqrt(max(overlap + 2 * np.sqrt(dets), 0.0))
    else:
        # nuclear norm of sqrt(rho) sqrt(sigma): stable for rank-deficient states
        f = np.linalg.svd(_psd_sqrt(rho) @ _psd_sqrt(sigma), compute_uv=False).sum()
    return float(min(max(f, 0.0), 1.0))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    w = np.linalg.eigvalsh(np.asarray(rho, dtype=complex) - np.asarray(sigma, dtype=complex))
    return float(0.5 * np.sum(np.abs(w)))


def random_pure_state(m: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=1 << m) + 1j * rng.normal(size=1 << m)
    return psi / np.linalg.norm(psi)


def random_density(m: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    dim = 1 << m
    g = rng.normal(size=(dim, rank or dim)) + 1j * rng.normal(size=(dim, rank or dim))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real
