"""Dense 2x2 / 4x4 complex algebra and Pauli constructors.

Basis convention used throughout the package: two-qubit states are ordered
|00>, |01>, |10>, |11> with qubit 1 the left tensor factor, so that
``pauli_two_qubit(k, l) == np.kron(PAULI[k], PAULI[l])``.  Complex
conjugation (used by the concurrence) is taken in this basis.
"""
import numpy as np

__all__ = [
    "I2", "SX", "SY", "SZ", "PAULI", "I4", "SWAP",
    "pauli_two_qubit", "pauli_axis_exponential", "matrix_exponential",
    "distance_up_to_global_phase", "dagger", "is_hermitian", "is_unitary",
]

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (I2, SX, SY, SZ)
I4 = np.eye(4, dtype=complex)
SWAP = np.array([[1, 0, 0, 0],
                 [0, 0, 1, 0],
                 [0, 1, 0, 0],
                 [0, 0, 0, 1]], dtype=complex)

_TAYLOR_ORDER = 18
_SCALE_NORM = 0.5


def _check_index(k, allowed):
    if isinstance(k, bool) or int(k) != k or int(k) not in allowed:
        raise ValueError(f"Pauli index {k!r} not in {sorted(allowed)}")
    return int(k)


def dagger(a):
    return np.conj(np.swapaxes(a, -1, -2))


def is_hermitian(a, tol=1e-12):
    return bool(np.max(np.abs(a - dagger(a)), initial=0.0) < tol)


def is_unitary(u, tol=1e-10):
    n = u.shape[-1]
    return bool(np.max(np.abs(dagger(u) @ u - np.eye(n))) < tol)


def pauli_two_qubit(k, l):
    """Return sigma_k (x) sigma_l with sigma_0 the identity."""
    k = _check_index(k, {0, 1, 2, 3})
    l = _check_index(l, {0, 1, 2, 3})
    return np.kron(PAULI[k], PAULI[l])


def pauli_axis_exponential(k, theta):
    """Closed form of exp(-i theta sigma_k) = cos(theta) I - i sin(theta) sigma_k."""
    k = _check_index(k, {1, 2, 3})
    theta = float(theta)
    if not np.isfinite(theta):
        raise ValueError("theta must be finite")
    return np.cos(theta) * I2 - 1j * np.sin(theta) * PAULI[k]


def matrix_exponential(a):
    """Matrix exponential by scaling and squaring with a truncated Taylor kernel.

    Accepts a single square matrix or a stack ``(..., n, n)``; each matrix is
    scaled by ``2**-s`` until its 1-norm is below 0.5, expanded to order 18
    and squared back ``s`` times.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected square matrices, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    norm = np.max(np.sum(np.abs(a), axis=-2), axis=-1)
    nmax = float(np.max(norm, initial=0.0))
    s = 0 if nmax <= _SCALE_NORM else int(np.ceil(np.log2(nmax / _SCALE_NORM)))
    x = a / 2.0 ** s
    n = a.shape[-1]
    eye = np.broadcast_to(np.eye(n, dtype=complex), a.shape)
    # Horner form of sum_k x^k / k!
    result = eye.copy()
    for k in range(_TAYLOR_ORDER, 0, -1):
        result = eye + (x @ result) / k
    for _ in range(s):
        result = result @ result
    return result


def distance_up_to_global_phase(u, v):
    """Max-entry distance between U and V after removing a global phase.

    The phase is aligned on the largest-magnitude entry of V^dagger U, and
    the result is max|V^dagger U - e^{i phi} I|, which is zero exactly when
    U = e^{i phi} V.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape or u.shape[0] != u.shape[1]:
        raise ValueError(f"shape mismatch: {u.shape} vs {v.shape}")
    w = dagger(v) @ u
    idx = np.unravel_index(np.argmax(np.abs(w)), w.shape)
    phase = w[idx] / abs(w[idx])
    return float(np.max(np.abs(w - phase * np.eye(u.shape[0]))))
