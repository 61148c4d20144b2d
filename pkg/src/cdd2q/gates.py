"""Bare and decoherence-protected Hamiltonians for the CNOT-bar and CZ gates.

The protected Hamiltonians are the closed-form generators of
U_c(t) U0(t), where U0 is the rotating-frame gate propagator and U_c the
decoupling frame (sigma_x rotations for CNOT-bar under pure dephasing, the
universal frame for CZ).
"""
import enum
from dataclasses import dataclass

import numpy as np

from .control import (DephasingTuple, FrequencyTuple, hc_dephasing, hc_state_protection,
                      uc_dephasing, uc_state_protection)
from .tensor import I4, matrix_exponential, pauli_two_qubit

__all__ = [
    "GateKind", "GateSpec", "U_CZ", "h0_bare", "u0_rotating", "gate_target",
    "hs_protected_cnotbar", "hs_protected_cz", "lab_frame_propagator",
]

U_CZ = np.diag([1, 1, 1, -1]).astype(complex)

_X1, _Y1, _Z1 = (pauli_two_qubit(k, 0) for k in (1, 2, 3))
_Y2, _Z2 = pauli_two_qubit(0, 2), pauli_two_qubit(0, 3)
_X1Z2, _X1Y2 = pauli_two_qubit(1, 3), pauli_two_qubit(1, 2)
_Z1Z2, _Z1Y2 = pauli_two_qubit(3, 3), pauli_two_qubit(3, 2)
_Y1Z2, _Y1Y2 = pauli_two_qubit(2, 3), pauli_two_qubit(2, 2)


class GateKind(enum.Enum):
    CNOTBAR = "cnotbar"
    CZ = "cz"


@dataclass(frozen=True)
class GateSpec:
    """Gate kind, gate time tau and number of control cycles N with tau = N tc."""

    kind: GateKind
    tau: float = 0.5
    cycles: int = 1

    def __post_init__(self):
        object.__setattr__(self, "kind", GateKind(self.kind))
        tau = float(self.tau)
        if not np.isfinite(tau) or tau <= 0:
            raise ValueError(f"gate time must be positive, got {self.tau!r}")
        object.__setattr__(self, "tau", tau)
        if isinstance(self.cycles, bool) or int(self.cycles) != self.cycles or self.cycles < 1:
            raise ValueError(f"cycles must be a positive integer, got {self.cycles!r}")
        object.__setattr__(self, "cycles", int(self.cycles))

    @property
    def tc(self):
        return self.tau / self.cycles

    @property
    def rate(self):
        """Prefactor pi / (2 tau) of the gate Hamiltonian."""
        return np.pi / (2 * self.tau)


def _check_commensurate(spec, tc):
    if abs(spec.tc - tc) > 1e-12 * spec.tc:
        raise ValueError(f"tau = {spec.tau} is not {spec.cycles} x tc = {tc}")


def _bare_generator(kind):
    # (I + A + B - AB), whose spectrum is {2, 2, 2, -2}
    if kind is GateKind.CZ:
        return I4 + _Z1 + _Z2 - _Z1Z2
    return I4 + _X1 + _Z2 - _X1Z2


def h0_bare(spec):
    """Time-independent Hamiltonian implementing the gate in time tau, without protection."""
    return spec.rate * 0.5 * (_bare_generator(spec.kind) - I4)


def _u0(spec, t):
    return matrix_exponential(-1j * spec.rate * (t / 2) * _bare_generator(spec.kind))


def u0_rotating(spec, t):
    """Rotating-frame gate propagator; equals the target gate (up to phase) at t = tau."""
    t = float(t)
    if not 0.0 <= t <= spec.tau * (1 + 1e-12):
        raise ValueError(f"t = {t} outside [0, tau = {spec.tau}]")
    return _u0(spec, t)


def gate_target(spec):
    """Target unitary: diag(1, 1, 1, -1) for CZ, the rotating-frame propagator at tau for CNOT-bar."""
    if spec.kind is GateKind.CZ:
        return U_CZ.copy()
    return u0_rotating(spec, spec.tau)


def hs_protected_cnotbar(t, dt_, spec):
    """CNOT-bar Hamiltonian that also protects against two-qubit pure dephasing."""
    if spec.kind is not GateKind.CNOTBAR:
        raise ValueError("spec is not a CNOT-bar gate")
    _check_commensurate(spec, dt_.tc)
    t = np.asarray(t, dtype=float)
    phase = (2 * dt_.omega * dt_.n2 * t)[..., None, None]
    c, s = np.cos(phase), np.sin(phase)
    gate = _X1 + c * _Z2 - s * _Y2 - c * _X1Z2 + s * _X1Y2
    return hc_dephasing(t, dt_) + spec.rate * 0.5 * gate


def hs_protected_cz(t, ft, spec):
    """CZ Hamiltonian protected against arbitrary two-qubit system-bath coupling."""
    if spec.kind is not GateKind.CZ:
        raise ValueError("spec is not a CZ gate")
    _check_commensurate(spec, ft.tc)
    t = np.asarray(t, dtype=float)
    a1 = (2 * ft.omega * ft.nx1 * t)[..., None, None]
    a2 = (2 * ft.omega * ft.nx2 * t)[..., None, None]
    c1, s1, c2, s2 = np.cos(a1), np.sin(a1), np.cos(a2), np.sin(a2)
    gate = (_Z1 * c1 - _Y1 * s1 + _Z2 * c2 - _Y2 * s2
            - _Z1Z2 * c1 * c2 + _Z1Y2 * c1 * s2 + _Y1Z2 * s1 * c2 - _Y1Y2 * s1 * s2)
    return hc_state_protection(t, ft) + spec.rate * 0.5 * gate


def lab_frame_propagator(spec, control, t):
    """Closed-form U_c(t) U0(t) for a protected gate; ``control`` is the tuple that defines U_c.

    Unlike :func:`u0_rotating` this is defined for any t >= 0, so it also
    describes the evolution after the gate time.
    """
    if isinstance(control, DephasingTuple):
        uc = uc_dephasing(t, control)
    elif isinstance(control, FrequencyTuple):
        uc = uc_state_protection(t, control)
    else:
        raise TypeError(f"unsupported control {control!r}")
    return uc @ _u0(spec, float(t))
