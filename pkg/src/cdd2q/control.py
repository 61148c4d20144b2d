"""Continuous decoupling control operators, their generators, and cycle averages.

All control operators are evaluated in closed form from single-qubit Euler
factors and accept either a scalar time or an array of times (returning a
stack of 4x4 matrices in the latter case).
"""
from dataclasses import dataclass

import numpy as np

from .tensor import I2, SX, SY, SZ, dagger

__all__ = [
    "FrequencyTuple", "DephasingTuple", "InvalidTupleError", "validate_tuple",
    "uc_state_protection", "hc_state_protection", "uc_dephasing", "hc_dephasing",
    "uc_local_same_fields", "hc_local_same_fields", "cycle_average",
    "decoupling_residual", "average_hamiltonian", "DEFAULT_NPOINTS",
]

DEFAULT_NPOINTS = 4096


class InvalidTupleError(ValueError):
    """Frequency tuple violates one of the universal decoupling conditions."""


def _positive_int(name, value):
    if isinstance(value, bool) or int(value) != value or int(value) < 1:
        raise ValueError(f"{name} must be a positive integer, got {value!r}")
    return int(value)


def _positive_period(tc):
    tc = float(tc)
    if not np.isfinite(tc) or tc <= 0:
        raise ValueError(f"cycle period must be positive, got {tc!r}")
    return tc


@dataclass(frozen=True)
class FrequencyTuple:
    """Harmonics (nx1, nz1, nx2, nz2) of the two local control fields and the cycle period."""

    nx1: int
    nz1: int
    nx2: int
    nz2: int
    tc: float = 0.5

    def __post_init__(self):
        for name in ("nx1", "nz1", "nx2", "nz2"):
            object.__setattr__(self, name, _positive_int(name, getattr(self, name)))
        object.__setattr__(self, "tc", _positive_period(self.tc))

    @property
    def omega(self):
        return 2 * np.pi / self.tc

    @property
    def harmonics(self):
        return (self.nx1, self.nz1, self.nx2, self.nz2)


@dataclass(frozen=True)
class DephasingTuple:
    """Harmonics (n1, n2) of the sigma_x rotations protecting against pure dephasing."""

    n1: int
    n2: int
    tc: float = 0.5

    def __post_init__(self):
        object.__setattr__(self, "n1", _positive_int("n1", self.n1))
        object.__setattr__(self, "n2", _positive_int("n2", self.n2))
        object.__setattr__(self, "tc", _positive_period(self.tc))
        if self.n1 == self.n2:
            raise InvalidTupleError("n1 == n2: sigma_z sigma_z noise is not averaged out")

    @property
    def omega(self):
        return 2 * np.pi / self.tc


def validate_tuple(ft):
    """Return the labels of every violated universal condition (empty if valid)."""
    a, b, c, d = ft.harmonics
    checks = [
        ("nx1 < nz1 < nx2 < nz2", a < b < c < d),
        ("nx2 != nx1 + nz1", c != a + b),
        ("nz2 != nx1 + nx2", d != a + c),
        ("nz2 != nx1 + nz1", d != a + b),
        ("nz2 != nz1 + nx2", d != b + c),
        ("nx1 + nz1 + nx2 - nz2 != 0", a + b + c - d != 0),
        ("nx1 - nz1 - nx2 + nz2 != 0", a - b - c + d != 0),
    ]
    return [label for label, ok in checks if not ok]


def _require_valid(ft):
    bad = validate_tuple(ft)
    if bad:
        raise InvalidTupleError(f"{ft.harmonics} violates: {', '.join(bad)}")


def _axis_exp(pauli, theta):
    # exp(-i theta sigma), broadcast over an array of angles
    theta = np.asarray(theta, dtype=float)[..., None, None]
    return np.cos(theta) * I2 - 1j * np.sin(theta) * pauli


def _kron2(a, b):
    # batched kron of (..., 2, 2) x (..., 2, 2) -> (..., 4, 4)
    out = a[..., :, None, :, None] * b[..., None, :, None, :]
    return out.reshape(a.shape[:-2] + (4, 4))


def _local_frame(w, nx, nz, t):
    t = np.asarray(t, dtype=float)
    return _axis_exp(SX, w * nx * t) @ _axis_exp(SZ, w * nz * t)


def _local_generator(w, nx, nz, t):
    t = np.asarray(t, dtype=float)[..., None, None]
    return w * nx * SX + w * nz * (np.cos(2 * w * nx * t) * SZ - np.sin(2 * w * nx * t) * SY)


def uc_state_protection(t, ft, strict=True):
    """Universal control operator U_c(t) = U_c^(1)(t) (x) U_c^(2)(t).

    Set ``strict=False`` to evaluate tuples that fail the decoupling
    conditions (useful for demonstrating the failure).
    """
    if strict:
        _require_valid(ft)
    w = ft.omega
    return _kron2(_local_frame(w, ft.nx1, ft.nz1, t), _local_frame(w, ft.nx2, ft.nz2, t))


def hc_state_protection(t, ft, strict=True):
    """Control Hamiltonian generating :func:`uc_state_protection`."""
    if strict:
        _require_valid(ft)
    w = ft.omega
    h1 = _local_generator(w, ft.nx1, ft.nz1, t)
    h2 = _local_generator(w, ft.nx2, ft.nz2, t)
    return _kron2(h1, np.broadcast_to(I2, h1.shape)) + _kron2(np.broadcast_to(I2, h2.shape), h2)


def uc_dephasing(t, dt_):
    w = dt_.omega
    return _kron2(_axis_exp(SX, w * dt_.n1 * np.asarray(t, dtype=float)),
                  _axis_exp(SX, w * dt_.n2 * np.asarray(t, dtype=float)))


def hc_dephasing(t, dt_):
    w = dt_.omega
    h = w * dt_.n1 * np.kron(SX, I2) + w * dt_.n2 * np.kron(I2, SX)
    t = np.asarray(t, dtype=float)
    return np.broadcast_to(h, t.shape + (4, 4)).copy()


def _check_same_fields(nx, nz, tc):
    nx = _positive_int("nx", nx)
    nz = _positive_int("nz", nz)
    if nx == nz:
        raise InvalidTupleError("nx == nz: the second rotation undoes part of the first")
    return nx, nz, 2 * np.pi / _positive_period(tc)


def uc_local_same_fields(t, nx, nz, tc):
    """Control operator applying identical static-plus-rotating fields to both qubits."""
    nx, nz, w = _check_same_fields(nx, nz, tc)
    u = _local_frame(w, nx, nz, t)
    return _kron2(u, u)


def hc_local_same_fields(t, nx, nz, tc):
    nx, nz, w = _check_same_fields(nx, nz, tc)
    h = _local_generator(w, nx, nz, t)
    eye = np.broadcast_to(I2, h.shape)
    return _kron2(h, eye) + _kron2(eye, h)


def _simpson_weights(npoints):
    if isinstance(npoints, bool) or int(npoints) != npoints:
        raise ValueError("npoints must be an integer")
    npoints = int(npoints)
    if npoints < 512 or npoints % 2:
        raise ValueError(f"npoints must be even and >= 512, got {npoints}")
    w = np.ones(npoints + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return w / (3.0 * npoints)


def cycle_average(op, control, tc, npoints=DEFAULT_NPOINTS):
    """(1/tc) * integral over one cycle of U_c^dagger(t) op(t) U_c(t), composite Simpson.

    ``op`` is a constant matrix or a callable of time; ``control`` maps an
    array of times to a stack of unitaries.  ``npoints`` is the number of
    Simpson intervals.
    """
    weights = _simpson_weights(npoints)
    tc = _positive_period(tc)
    ts = np.linspace(0.0, tc, len(weights))
    u = np.asarray(control(ts))
    if callable(op):
        a = np.stack([np.asarray(op(t)) for t in ts])
    else:
        a = np.asarray(op, dtype=complex)
    rotated = dagger(u) @ a @ u
    return np.sum(weights[:, None, None] * rotated, axis=0)


def decoupling_residual(S, control, tc, npoints=DEFAULT_NPOINTS):
    """Spectral norm of the cycle-averaged, control-frame coupling operator S."""
    avg = cycle_average(S, control, tc, npoints)
    return float(np.linalg.norm(avg, 2))


def average_hamiltonian(H0, control, tc, npoints=DEFAULT_NPOINTS):
    """First-order average Hamiltonian of H0 in the control frame (Hermitian part)."""
    avg = cycle_average(H0, control, tc, npoints)
    return 0.5 * (avg + dagger(avg))
