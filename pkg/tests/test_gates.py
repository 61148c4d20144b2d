import numpy as np
import pytest

from cdd2q.control import DephasingTuple, FrequencyTuple, hc_dephasing, hc_state_protection
from cdd2q.engine import CouplingSet, SimulationConfig, propagate
from cdd2q.gates import (GateKind, GateSpec, U_CZ, gate_target, h0_bare, hs_protected_cnotbar,
                         hs_protected_cz, lab_frame_propagator, u0_rotating)
from cdd2q.observables import concurrence
from cdd2q.tensor import I2, I4, SX, SZ, dagger, distance_up_to_global_phase, matrix_exponential

CZ = GateSpec(GateKind.CZ, 0.5, 1)
CNOT = GateSpec(GateKind.CNOTBAR, 0.5, 1)
FT = FrequencyTuple(1, 2, 4, 8, tc=0.5)
DT = DephasingTuple(2, 1, 0.5)


def test_gate_spec_validation():
    assert GateSpec("cz", 1.0, 2).tc == 0.5
    for tau, cycles in [(0.0, 1), (-1.0, 1), (0.5, 0), (0.5, 1.5), (np.inf, 1)]:
        with pytest.raises(ValueError):
            GateSpec(GateKind.CZ, tau, cycles)


def test_h0_bare_cz_example():
    expected = np.pi * 0.5 * np.diag([1, 1, 1, -3])
    assert np.max(np.abs(h0_bare(CZ) - expected)) < 1e-14


def test_h0_bare_cnotbar_spectrum():
    ev = np.sort(np.linalg.eigvalsh(h0_bare(CNOT)))
    rate = np.pi / (2 * 0.5)
    np.testing.assert_allclose(ev, rate * np.array([-1.5, 0.5, 0.5, 0.5]), atol=1e-12)
    h = h0_bare(CNOT)
    assert np.max(np.abs(h - dagger(h))) < 1e-15


@pytest.mark.parametrize("kind", list(GateKind))
def test_h0_bare_scaling(kind):
    a, b = h0_bare(GateSpec(kind, 0.5, 1)), h0_bare(GateSpec(kind, 1.0, 2))
    assert np.max(np.abs(a - 2 * b)) < 1e-14


@pytest.mark.parametrize("kind", list(GateKind))
def test_u0_rotating_endpoints_and_range(kind):
    spec = GateSpec(kind, 0.5, 1)
    assert np.max(np.abs(u0_rotating(spec, 0.0) - I4)) < 1e-15
    for t in (-1e-3, 0.51):
        with pytest.raises(ValueError):
            u0_rotating(spec, t)


def test_u0_rotating_cz_reaches_target():
    assert distance_up_to_global_phase(u0_rotating(CZ, 0.5), U_CZ) < 1e-12
    np.testing.assert_array_equal(gate_target(CZ), U_CZ)


def test_u0_rotating_cz_half_time():
    p = np.exp(-1j * np.pi / 4)
    expected = np.diag([p, p, p, np.conj(p)])
    assert np.max(np.abs(u0_rotating(CZ, 0.25) - expected)) < 1e-12


@pytest.mark.parametrize("kind", list(GateKind))
def test_u0_rotating_group_property(kind, rng):
    spec = GateSpec(kind, 0.5, 1)
    for _ in range(10):
        t1, t2 = rng.uniform(0, 0.25, 2)
        prod = u0_rotating(spec, t1) @ u0_rotating(spec, t2)
        assert np.max(np.abs(prod - u0_rotating(spec, t1 + t2))) < 1e-10


def test_cnotbar_target_is_cnot_up_to_local_phases():
    # Bell-state creation from |0>(|0> - |1>)/sqrt2
    psi0 = np.kron([1, 0], np.array([1, -1]) / np.sqrt(2))
    psi = gate_target(CNOT) @ psi0
    assert abs(concurrence(np.outer(psi, psi.conj())) - 1) < 1e-10


def test_cnotbar_target_is_controlled_operation():
    u = gate_target(CNOT)
    # the exponent only involves sigma_x on qubit 1 and sigma_z on qubit 2, so it commutes with both
    for op in (np.kron(SX, I2), np.kron(I2, SZ)):
        assert np.max(np.abs(u @ op - op @ u)) < 1e-12


def test_protected_hamiltonians_at_zero():
    w = DT.omega
    static = w * (2 * np.kron(SX, I2) + 1 * np.kron(I2, SX))
    assert np.max(np.abs(hs_protected_cnotbar(0.0, DT, CNOT) - (static + h0_bare(CNOT)))) < 1e-12
    assert np.max(np.abs(hs_protected_cz(0.0, FT, CZ) - (hc_state_protection(0.0, FT) + h0_bare(CZ)))) < 1e-12


def _fd_generator(u, t, h=1e-7):
    return 1j * (u(t + h) - u(t - h)) / (2 * h) @ dagger(u(t))


@pytest.mark.parametrize("spec,control,hs", [
    (CNOT, DT, lambda t: hs_protected_cnotbar(t, DT, CNOT)),
    (CZ, FT, lambda t: hs_protected_cz(t, FT, CZ)),
])
def test_protected_generator_consistency(spec, control, hs, rng):
    # the closed forms drop the identity part of the gate generator, a global phase
    u = lambda t: lab_frame_propagator(spec, control, t)
    for t in rng.uniform(0.01, 0.49, 8):
        g = _fd_generator(u, t) - spec.rate * 0.5 * I4
        assert np.max(np.abs(g - hs(t))) < 1e-5


def test_protected_hamiltonians_hermitian(rng):
    for t in rng.uniform(0, 2, 10):
        for h in (hs_protected_cnotbar(t, DT, CNOT), hs_protected_cz(t, FT, CZ)):
            assert np.max(np.abs(h - dagger(h))) < 1e-13


def test_protected_rejects_mismatch():
    with pytest.raises(ValueError):
        hs_protected_cz(0.0, FrequencyTuple(1, 2, 4, 8, tc=0.25), CZ)
    with pytest.raises(ValueError):
        hs_protected_cnotbar(0.0, DT, CZ)
    with pytest.raises(ValueError):
        hs_protected_cz(0.0, FT, CNOT)
    assert np.all(np.isfinite(hs_protected_cz(0.1, FrequencyTuple(1, 2, 4, 8, tc=0.25), GateSpec("cz", 0.5, 2))))


def test_cz_with_rate_zeroed_equals_state_protection(rng):
    class Zeroed(GateSpec):
        @property
        def rate(self):
            return 0.0

    spec = Zeroed(GateKind.CZ, 0.5, 1)
    for t in rng.uniform(0, 1, 10):
        np.testing.assert_array_equal(hs_protected_cz(t, FT, spec), hc_state_protection(t, FT))


def test_cnotbar_pure_field_terms_periodic(rng):
    for t in rng.uniform(0, 1, 10):
        assert np.max(np.abs(hs_protected_cnotbar(t + 0.5, DT, CNOT) - hs_protected_cnotbar(t, DT, CNOT))) < 1e-9
        assert np.max(np.abs(hc_dephasing(t + 0.5, DT) - hc_dephasing(t, DT))) < 1e-9


def test_cz_zz_coefficient_frequency_content():
    n = 512
    t = 0.5 * np.arange(n) / n
    zz = np.kron(SZ, SZ)
    coeff = np.einsum("ij,tji->t", zz, hs_protected_cz(t, FT, CZ)).real / 4
    spectrum = np.abs(np.fft.rfft(coeff)) / n
    # harmonic m of the cycle is angular frequency m * omega
    allowed = {2 * (FT.nx1 + FT.nx2), 2 * abs(FT.nx1 - FT.nx2)}
    peaks = {m for m in range(len(spectrum)) if spectrum[m] > 1e-10}
    assert peaks == allowed


def _stepped(hs, step=1e-4):
    config = SimulationConfig(hamiltonian=hs, couplings=CouplingSet(()), rho0=np.diag([1, 0, 0, 0]),
                              t_end=0.5, dt=2 * step, substeps=2)
    return propagate(config)[-1]


def test_closed_cnotbar_gate():
    u = _stepped(lambda t: hs_protected_cnotbar(t, DT, CNOT))
    assert distance_up_to_global_phase(u, u0_rotating(CNOT, 0.5)) < 1e-6


def test_closed_cz_gate():
    u = _stepped(lambda t: hs_protected_cz(t, FT, CZ))
    assert distance_up_to_global_phase(u, U_CZ) < 1e-6


def test_lab_frame_propagator_unitary_and_matches_u0_at_tau(rng):
    for spec, control in ((CZ, FT), (CNOT, DT)):
        u = lab_frame_propagator(spec, control, 0.5)
        assert distance_up_to_global_phase(u, u0_rotating(spec, 0.5)) < 1e-10
        v = lab_frame_propagator(spec, control, rng.uniform(0, 3))
        assert np.max(np.abs(dagger(v) @ v - I4)) < 1e-10
    with pytest.raises(TypeError):
        lab_frame_propagator(CZ, (1, 2, 4, 8), 0.1)


def test_matrix_exponential_oracle_for_u0():
    t = 0.17
    h = h0_bare(CZ) + CZ.rate * 0.5 * I4
    assert np.max(np.abs(u0_rotating(CZ, t) - matrix_exponential(-1j * h * t))) < 1e-13
