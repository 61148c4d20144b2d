import numpy as np
import pytest

import cdd2q.engine as engine
from cdd2q.bath import OhmicBath
from cdd2q.control import FrequencyTuple, hc_state_protection
from cdd2q.engine import (Coupling, CouplingSet, IntegrationError, SimulationConfig,
                          accumulate_propagators, constant_hamiltonian, dissipator_operator, evolve,
                          interaction_rhs, master_rhs, memory_integrals, propagate, zero_hamiltonian)
from cdd2q.experiments import build_config
from cdd2q.gates import GateKind, GateSpec, U_CZ, h0_bare, hs_protected_cz
from cdd2q.observables import concurrence
from cdd2q.tensor import I2, I4, SZ, dagger, distance_up_to_global_phase, matrix_exponential

BATH = OhmicBath(0.05, 2 * np.pi, 2.0)
PLUS = np.full(4, 0.5)
RHO_PLUS = np.outer(PLUS, PLUS)
CZ = GateSpec(GateKind.CZ, 0.5, 1)
FT = FrequencyTuple(1, 2, 4, 8, 0.5)
ZI = np.kron(SZ, I2)


def _config(h=zero_hamiltonian, couplings=(), rho0=RHO_PLUS, t_end=0.5, **kw):
    return SimulationConfig(hamiltonian=h, couplings=CouplingSet(tuple(couplings)), rho0=rho0,
                            t_end=t_end, **kw)


def test_coupling_must_be_hermitian():
    with pytest.raises(ValueError):
        Coupling(np.array([[0, 1], [0, 0]]), BATH)
    with pytest.raises(ValueError):
        Coupling(1j * ZI, BATH)
    assert CouplingSet(()).operators.shape == (0, 4, 4)


@pytest.mark.parametrize("kw", [
    dict(rho0=np.diag([1, 0, 0, 0.1])),
    dict(rho0=np.diag([1.5, 0, 0, -0.5])),
    dict(rho0=np.array([[0.5, 1], [0, 0.5]])),
    dict(substeps=3), dict(substeps=0), dict(micro=0), dict(stepper="euler"), dict(frame="rotating"),
    dict(t_end=0.5005), dict(dt=-1.0),
])
def test_config_validation(kw):
    with pytest.raises(ValueError):
        _config(**kw)


def test_zero_hamiltonian_gives_identity():
    u = propagate(_config())
    assert np.max(np.abs(u - I4)) == 0.0


def test_constant_hamiltonian_matches_exponential():
    h = h0_bare(CZ)
    u = propagate(_config(constant_hamiltonian(h), dt=1e-3))[-1]
    assert np.max(np.abs(u - matrix_exponential(-1j * h * 0.5))) < 1e-8


@pytest.mark.parametrize("stepper,tol", [("magnus4", 1e-6), ("midpoint", 1e-2)])
def test_protected_cz_propagator(stepper, tol):
    h = lambda t: hs_protected_cz(t, FT, CZ)
    u = propagate(_config(h, dt=2e-4, substeps=2, stepper=stepper))
    assert distance_up_to_global_phase(u[-1], U_CZ) < tol
    assert np.max(np.abs(dagger(u) @ u - I4)) < 1e-8


def test_micro_steps_refine_propagator():
    h = lambda t: hs_protected_cz(t, FT, CZ)
    coarse = distance_up_to_global_phase(propagate(_config(h, dt=1e-2, substeps=2))[-1], U_CZ)
    fine = distance_up_to_global_phase(propagate(_config(h, dt=1e-2, substeps=2, micro=4))[-1], U_CZ)
    assert fine < coarse / 50


def test_non_finite_hamiltonian_rejected():
    with pytest.raises(ValueError):
        propagate(_config(lambda t: np.full(np.shape(t) + (4, 4), np.nan)))


def test_dissipator_vanishes_at_t0():
    cache = accumulate_propagators(_config(couplings=[Coupling(ZI, BATH)]))
    assert np.max(np.abs(dissipator_operator(cache, 0, 0.0))) == 0.0
    with pytest.raises(ValueError):
        dissipator_operator(cache, 0, 0.6)


def test_dissipator_with_unit_correlation_stub():
    cache = accumulate_propagators(_config(couplings=[Coupling(ZI, BATH)]), correlation=np.ones_like)
    for t in (0.1, 0.25, 0.5):
        assert np.max(np.abs(dissipator_operator(cache, 0, t) - t * ZI)) < 1e-13


def test_memory_integrals_match_direct_trapezoid(rng):
    J, n = 3, 57
    f = rng.normal(size=(J, n, 4, 4)) + 1j * rng.normal(size=(J, n, 4, 4))
    c = [rng.normal(size=n) + 1j * rng.normal(size=n) for _ in range(J)]
    step = 0.01
    got = memory_integrals(f, c, step)
    for j in range(J):
        for m in (0, 1, 2, 30, n - 1):
            w = np.full(m + 1, step)
            w[[0, m]] *= 0.5
            direct = sum(w[k] * c[j][m - k] * f[j, k] for k in range(m + 1)) if m else 0 * f[j, 0]
            assert np.max(np.abs(got[j, m] - direct)) < 1e-12


def test_memory_integral_step_halving_fig1():
    # D at t = 1 for the fig-1 control run, fine step 5e-4 against 2.5e-4
    over = {"variant": "control-weak", "t_end": 1.0}
    _, coarse = build_config("fig1-state-diffbaths", over)
    _, fine = build_config("fig1-state-diffbaths", dict(over, dt=1e-3))
    a, b = accumulate_propagators(coarse), accumulate_propagators(fine)
    for j in range(15):
        d = dissipator_operator(a, j, 1.0) - dissipator_operator(b, j, 1.0)
        assert np.max(np.abs(d)) < 1e-6


def test_memory_end_correction_is_fourth_order():
    # error ratio of successive halvings near 16 with end corrections, 4 without
    def d(dt):
        _, c = build_config("fig1-state-diffbaths", {"variant": "control-weak", "t_end": 0.5, "dt": dt})
        return dissipator_operator(accumulate_propagators(c), 3, 0.5)

    d1, d2, d3 = d(2e-3), d(1e-3), d(5e-4)
    ratio = np.max(np.abs(d1 - d2)) / np.max(np.abs(d2 - d3))
    assert 10 < ratio < 20


def test_rhs_constant_hamiltonian_no_couplings(rng):
    h = h0_bare(CZ)
    cache = accumulate_propagators(_config(constant_hamiltonian(h)))
    out = master_rhs(RHO_PLUS, 0.25, cache)
    assert np.max(np.abs(out - 1j * (RHO_PLUS @ h - h @ RHO_PLUS))) < 1e-14


def test_pure_dephasing_keeps_populations(rng):
    cache = accumulate_propagators(_config(couplings=[Coupling(0.5 * ZI, BATH)]))
    psi = rng.normal(size=4) + 1j * rng.normal(size=4)
    psi /= np.linalg.norm(psi)
    rho = np.outer(psi, psi.conj())
    for t in (0.1, 0.3, 0.5):
        out = master_rhs(rho, t, cache)
        assert np.max(np.abs(np.diag(out))) < 1e-14


@pytest.fixture(scope="module")
def fig1_cache():
    _, config = build_config("fig1-state-diffbaths", {"variant": "control-weak", "t_end": 1.0})
    return config, accumulate_propagators(config)


def test_rhs_hermitian_and_traceless(fig1_cache, rng):
    config, cache = fig1_cache
    grid = cache.times
    for t in rng.choice(grid, 10):
        out = master_rhs(config.rho0, t, cache)
        assert abs(np.trace(out)) < 1e-12
        assert np.max(np.abs(out - dagger(out))) < 1e-12


def test_interaction_rhs_consistent_with_lab(fig1_cache, rng):
    config, cache = fig1_cache
    for n in rng.integers(0, len(cache.times), 5):
        u = cache.unitaries[n]
        rho_i = config.rho0
        rho = u @ rho_i @ dagger(u)
        h = cache.hamiltonian(np.asarray(cache.times[n]))
        dissipative = master_rhs(rho, cache.times[n], cache) - 1j * (rho @ h - h @ rho)
        assert np.max(np.abs(u @ interaction_rhs(rho_i, n, cache) @ dagger(u) - dissipative)) < 1e-10


def test_free_evolution_is_exact():
    series = evolve(_config(t_end=1.0))
    assert np.all(series.states == RHO_PLUS)
    assert np.all(np.diff(series.times) > 0)


def test_closed_bare_cz_creates_entanglement():
    series = evolve(_config(constant_hamiltonian(h0_bare(CZ)), dt=1e-3))
    assert abs(series.concurrence[-1] - 1) < 1e-8
    psi = U_CZ @ PLUS
    assert abs(np.vdot(psi, series.states[-1] @ psi).real - 1) < 1e-8


def test_closed_protected_cz_matches_gate_check():
    _, config = build_config("sanity-cz-closed", {"variant": "protected"})
    series = evolve(config)
    assert abs(series.concurrence[-1] - 1) < 1e-8
    assert abs(series.records[-1].fidelity - 1) < 1e-8


def test_lab_and_interaction_frames_agree():
    h = lambda t: hc_state_protection(t, FT)
    rho0 = np.outer([0, 1, 1, 0], [0, 1, 1, 0]) / 2
    couplings = [Coupling(0.5 * np.kron(SZ, SZ), BATH), Coupling(0.5 * ZI, BATH)]
    a = evolve(_config(h, couplings, rho0=rho0, t_end=0.1, dt=1e-4, substeps=2))
    b = evolve(_config(h, couplings, rho0=rho0, t_end=0.1, dt=1e-4, substeps=2, frame="lab"))
    assert np.max(np.abs(a.states - b.states)) < 1e-7


def test_output_stride():
    series = evolve(_config(t_end=0.5, dt=0.01, output_stride=7))
    assert series.times[0] == 0.0 and series.times[-1] == pytest.approx(0.5)
    assert np.allclose(np.diff(series.times[:-1]), 0.07)


def test_open_evolution_preserves_trace_and_hermiticity():
    couplings = [Coupling(0.5 * ZI, BATH)]
    bell = np.outer([0, 1, 1, 0], [0, 1, 1, 0]) / 2
    series = evolve(_config(couplings=couplings, rho0=bell, t_end=1.0))
    assert np.max(series.column("trace_residual")) < 1e-8
    assert np.max(series.column("herm_residual")) < 1e-10
    assert concurrence(series.states[-1]) < concurrence(series.states[0])


def test_trace_drift_aborts(monkeypatch):
    leak = lambda rho_i, n, cache: -np.eye(4) / 4
    monkeypatch.setattr(engine, "interaction_rhs", leak)
    with pytest.raises(IntegrationError, match="trace drift"):
        evolve(_config(couplings=[Coupling(ZI, BATH)]))


def test_hermiticity_loss_aborts(monkeypatch):
    skew = lambda rho_i, n, cache: 1e-6 * np.triu(np.ones((4, 4)), 1)
    monkeypatch.setattr(engine, "interaction_rhs", skew)
    with pytest.raises(IntegrationError, match="Hermiticity"):
        evolve(_config(couplings=[Coupling(ZI, BATH)]))


def test_runs_are_independent_and_deterministic():
    couplings = [Coupling(0.5 * ZI, BATH)]
    a = evolve(_config(couplings=couplings, t_end=0.3))
    b = evolve(_config(couplings=couplings, t_end=0.3))
    assert np.array_equal(a.states, b.states)
