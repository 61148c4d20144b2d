"""Memory-kernel integrator for the second-order time-local master equation

    d rho/dt = i [rho, H_S(t)] + sum_j ( [D_j(t) rho, F_j] + h.c. ),
    D_j(t)   = int_{t0}^t U_S(t,s) F_j U_S(t,s)^dagger C_j(t - s) ds.

rho enters only at the current time, so the memory integral is a
time-dependent operator, not a convolution over the state history.  With
F_j(s) = U^dagger(s) F_j U(s) (the interaction picture on a fine grid of step
delta = dt / substeps) and M_j(t) = int F_j(s) C_j(t - s) ds, one has
D_j(t) = U(t) M_j(t) U^dagger(t).  All M_j on the fine grid are computed at
once as causal discrete convolutions (trapezoid rule with Euler-Maclaurin end
corrections, evaluated by FFT).

The state is advanced with classic fixed-step RK4.  By default the
integration variable is the interaction-picture state U^dagger rho U, which
removes the large control Hamiltonian from the right-hand side; ``frame="lab"``
integrates the lab-frame equation directly.
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
import scipy.fft

from .bath import OhmicBath, build_correlation_table
from .observables import observe
from .tensor import I4, dagger, is_hermitian, matrix_exponential

__all__ = [
    "Coupling", "CouplingSet", "SimulationConfig", "PropagatorCache", "TimeSeries",
    "IntegrationError", "zero_hamiltonian", "constant_hamiltonian",
    "propagate", "accumulate_propagators", "memory_integrals", "dissipator_operator",
    "master_rhs", "interaction_rhs", "evolve",
]

_GAUSS_OFFSET = np.sqrt(3) / 6
_TRACE_ABORT = 1e-6
_HERM_ABORT = 1e-8


class IntegrationError(RuntimeError):
    """Integration left its trust region (trace drift or loss of Hermiticity)."""


def zero_hamiltonian(t):
    t = np.asarray(t, dtype=float)
    return np.zeros(t.shape + (4, 4), dtype=complex)


def constant_hamiltonian(h):
    h = np.array(h, dtype=complex)

    def hamiltonian(t):
        t = np.asarray(t, dtype=float)
        return np.broadcast_to(h, t.shape + (4, 4)).copy()

    return hamiltonian


@dataclass(frozen=True)
class Coupling:
    F: np.ndarray
    bath: OhmicBath

    def __post_init__(self):
        F = np.array(self.F, dtype=complex)
        if F.shape != (4, 4) or not is_hermitian(F, 1e-12):
            raise ValueError("coupling operator must be a Hermitian 4x4 matrix")
        F.flags.writeable = False
        object.__setattr__(self, "F", F)


@dataclass(frozen=True)
class CouplingSet:
    items: tuple = ()

    def __post_init__(self):
        items = tuple(c if isinstance(c, Coupling) else Coupling(*c) for c in self.items)
        object.__setattr__(self, "items", items)

    def __len__(self):
        return len(self.items)

    def __iter__(self):
        return iter(self.items)

    def __getitem__(self, j):
        return self.items[j]

    @property
    def operators(self):
        if not self.items:
            return np.zeros((0, 4, 4), dtype=complex)
        return np.stack([c.F for c in self.items])


@dataclass(frozen=True)
class SimulationConfig:
    """One open-system run.

    ``hamiltonian`` maps an array of times to a stack of 4x4 Hermitian
    matrices.  The RK4 step is ``dt``; propagators and memory integrals live
    on the finer grid of step ``dt / substeps``, each fine interval being
    covered by ``micro`` Magnus steps (``stepper`` "magnus4" or "midpoint").
    """

    hamiltonian: Callable
    couplings: CouplingSet
    rho0: np.ndarray
    t_end: float
    dt: float = 2e-3
    substeps: int = 2
    t0: float = 0.0
    micro: int = 1
    stepper: str = "magnus4"
    frame: str = "interaction"
    output_stride: int = 1
    target: Optional[np.ndarray] = None
    label: str = ""

    def __post_init__(self):
        if not isinstance(self.couplings, CouplingSet):
            object.__setattr__(self, "couplings", CouplingSet(tuple(self.couplings)))
        rho0 = np.array(self.rho0, dtype=complex)
        if rho0.shape != (4, 4):
            raise ValueError("rho0 must be 4x4")
        if not is_hermitian(rho0, 1e-12):
            raise ValueError("rho0 is not Hermitian")
        if abs(np.trace(rho0) - 1) > 1e-12:
            raise ValueError("rho0 must have unit trace")
        if np.linalg.eigvalsh(rho0).min() < -1e-10:
            raise ValueError("rho0 is not positive semidefinite")
        object.__setattr__(self, "rho0", rho0)
        if self.substeps < 2 or self.substeps % 2:
            raise ValueError("substeps must be even and >= 2 so RK4 stages land on the fine grid")
        if self.micro < 1:
            raise ValueError("micro must be >= 1")
        if self.stepper not in ("magnus4", "midpoint"):
            raise ValueError(f"unknown stepper {self.stepper!r}")
        if self.frame not in ("interaction", "lab"):
            raise ValueError(f"unknown frame {self.frame!r}")
        if not self.dt > 0 or not self.t_end > self.t0:
            raise ValueError("need dt > 0 and t_end > t0")
        steps = (self.t_end - self.t0) / self.dt
        if abs(steps - round(steps)) > 1e-9 * max(1.0, steps):
            raise ValueError(f"t_end - t0 = {self.t_end - self.t0} is not a multiple of dt = {self.dt}")
        if self.target is not None:
            target = np.array(self.target, dtype=complex).ravel()
            object.__setattr__(self, "target", target)

    @property
    def n_steps(self):
        return int(round((self.t_end - self.t0) / self.dt))

    @property
    def fine_step(self):
        return self.dt / self.substeps


@dataclass(frozen=True, eq=False)
class PropagatorCache:
    """U(t_k, t0) and interaction-picture couplings on the fine grid.

    ``memory[j, k]`` holds M_j(t_k) = int_{t0}^{t_k} Fcheck_j(s) C_j(t_k - s) ds.
    """

    t0: float
    step: float
    unitaries: np.ndarray
    couplings: np.ndarray
    fcheck: np.ndarray
    memory: np.ndarray
    hamiltonian: Callable = field(repr=False)

    @property
    def times(self):
        return self.t0 + self.step * np.arange(len(self.unitaries))

    def index(self, t):
        k = (t - self.t0) / self.step
        n = int(round(k))
        if abs(k - n) > 1e-6 or not 0 <= n < len(self.unitaries):
            raise ValueError(f"t = {t} is not a grid time of the propagator cache")
        return n


def _step_generators(hamiltonian, starts, h, stepper):
    """Exponent Omega for each step [t, t + h] (dU/dt = -i H U)."""
    if stepper == "midpoint":
        return -1j * h * np.asarray(hamiltonian(starts + 0.5 * h))
    a1 = -1j * np.asarray(hamiltonian(starts + (0.5 - _GAUSS_OFFSET) * h))
    a2 = -1j * np.asarray(hamiltonian(starts + (0.5 + _GAUSS_OFFSET) * h))
    return 0.5 * h * (a1 + a2) + (np.sqrt(3) / 12) * h * h * (a2 @ a1 - a1 @ a2)


def propagate(config):
    """Fine-grid propagators U(t_k, t0), k = 0..substeps * n_steps."""
    n_fine = config.n_steps * config.substeps
    h = config.fine_step / config.micro
    starts = config.t0 + h * np.arange(n_fine * config.micro)
    omegas = _step_generators(config.hamiltonian, starts, h, config.stepper)
    if not np.all(np.isfinite(omegas)):
        raise ValueError("Hamiltonian returned non-finite values")
    steps = matrix_exponential(omegas)
    out = np.empty((n_fine + 1, 4, 4), dtype=complex)
    u = I4.copy()
    out[0] = u
    for i, e in enumerate(steps):
        u = e @ u
        if (i + 1) % config.micro == 0:
            out[(i + 1) // config.micro] = u
    drift = np.max(np.abs(dagger(out) @ out - I4))
    if drift > 1e-8:
        raise IntegrationError(f"propagator lost unitarity ({drift:.2e})")
    return out


def _lag_correlations(config, correlation):
    """Per-coupling C(k delta) and dC/dtau on the fine grid; one table per distinct bath.

    A test stub ``correlation`` has no slopes, and the second list is then None.
    """
    n_fine = config.n_steps * config.substeps
    lags = config.fine_step * np.arange(n_fine + 1)
    if correlation is not None:
        c = np.asarray(correlation(lags), dtype=complex)
        return [c] * len(config.couplings), None
    tables = {}
    values, slopes = [], []
    for coupling in config.couplings:
        key = coupling.bath.key
        if key not in tables:
            table = build_correlation_table(coupling.bath, lags[-1], config.fine_step)
            tables[key] = (table.values[:n_fine + 1], table.slopes[:n_fine + 1])
        values.append(tables[key][0])
        slopes.append(tables[key][1])
    return values, slopes


def memory_integrals(fcheck, lag_corr, step, fdot=None, lag_slope=None):
    """Memory integrals M_j(t_n) = int_{t_0}^{t_n} F_j(s) C_j(t_n - s) ds for every fine-grid time.

    ``fcheck`` is (J, N+1, 4, 4) and ``lag_corr`` a length-J sequence of
    C(k step), k = 0..N.  The causal trapezoid sums are evaluated by
    zero-padded FFT convolution.  When the derivatives ``fdot`` (same shape as
    ``fcheck``) and ``lag_slope`` (dC/dtau on the lag grid) are given, the
    Euler-Maclaurin end correction -step^2/12 [g'(t_n) - g'(t_0)] of the
    integrand g(s) = F(s) C(t_n - s) is added, raising the order from 2 to 4.
    """
    J, n1 = fcheck.shape[:2]
    out = np.zeros((J, n1, 4, 4), dtype=complex)
    if J == 0:
        return out
    size = scipy.fft.next_fast_len(2 * n1 - 1)
    flat = fcheck.reshape(J, n1, 16)
    cache = {}
    for j in range(J):
        c = np.asarray(lag_corr[j])
        key = id(lag_corr[j])
        if key not in cache:
            cache[key] = scipy.fft.fft(c, size)
        conv = scipy.fft.ifft(cache[key][:, None] * scipy.fft.fft(flat[j], size, axis=0),
                              axis=0)[:n1]
        conv -= 0.5 * (c[:, None] * flat[j, 0][None, :] + c[0] * flat[j])
        if fdot is not None and lag_slope is not None:
            dc = np.asarray(lag_slope[j])
            fd = fdot[j].reshape(n1, 16)
            g_end = fd * c[0] - flat[j] * dc[0]
            g_start = fd[0][None, :] * c[:, None] - flat[j, 0][None, :] * dc[:, None]
            conv -= (step / 12.0) * (g_end - g_start)
        out[j] = (step * conv).reshape(n1, 4, 4)
        out[j, 0] = 0.0
    return out


def accumulate_propagators(config, correlation=None):
    """Propagators, interaction-picture couplings and memory integrals for ``config``.

    ``correlation`` optionally replaces every bath correlation function by a
    callable of the lag (used for testing); the memory quadrature is then the
    plain trapezoid rule.
    """
    unitaries = propagate(config)
    ops = config.couplings.operators
    udag = dagger(unitaries)
    fcheck = udag[None] @ ops[:, None] @ unitaries[None]
    values, slopes = _lag_correlations(config, correlation)
    fdot = None
    if slopes is not None and len(ops):
        # d/ds U^dag F U = U^dag i[H, F] U
        h = np.asarray(config.hamiltonian(config.t0 + config.fine_step * np.arange(len(unitaries))))
        comm = 1j * (h[None] @ ops[:, None] - ops[:, None] @ h[None])
        fdot = udag[None] @ comm @ unitaries[None]
    memory = memory_integrals(fcheck, values, config.fine_step, fdot, slopes)
    for a in (unitaries, ops, fcheck, memory):
        a.flags.writeable = False
    return PropagatorCache(t0=config.t0, step=config.fine_step, unitaries=unitaries,
                           couplings=ops, fcheck=fcheck, memory=memory,
                           hamiltonian=config.hamiltonian)


def dissipator_operator(cache, j, t):
    """D_j(t) = U(t) M_j(t) U^dagger(t) in the lab frame."""
    n = cache.index(t)
    u = cache.unitaries[n]
    return u @ cache.memory[j, n] @ dagger(u)


def _hermitian_part(x):
    return x + dagger(x)


def master_rhs(rho, t, cache, couplings=None):
    """Lab-frame right-hand side i[rho, H_S(t)] + sum_j ([D_j rho, F_j] + h.c.)."""
    n = cache.index(t)
    h = np.asarray(cache.hamiltonian(np.asarray(cache.times[n])))
    ops = cache.couplings if couplings is None else CouplingSet(tuple(couplings)).operators
    u = cache.unitaries[n]
    d = u @ cache.memory[:, n] @ dagger(u)
    dr = d @ rho
    x = np.sum(dr @ ops - ops @ dr, axis=0) if len(ops) else np.zeros((4, 4), dtype=complex)
    out = 1j * (rho @ h - h @ rho) + _hermitian_part(x)
    return 0.5 * (out + dagger(out))


def interaction_rhs(rho_i, n, cache):
    """Same equation for U^dagger rho U at fine-grid index n."""
    m = cache.memory[:, n]
    if not len(m):
        return np.zeros((4, 4), dtype=complex)
    f = cache.fcheck[:, n]
    mr = m @ rho_i
    x = np.sum(mr @ f - f @ mr, axis=0)
    return _hermitian_part(x)


@dataclass(frozen=True, eq=False)
class TimeSeries:
    times: np.ndarray
    states: np.ndarray
    records: list
    min_eigenvalue: float
    label: str = ""

    def column(self, name):
        return np.array([np.nan if getattr(r, name) is None else getattr(r, name)
                         for r in self.records], dtype=float)

    @property
    def concurrence(self):
        return self.column("concurrence")


def _check_state(rho, t):
    tr = abs(np.trace(rho) - 1.0)
    herm = float(np.max(np.abs(rho - dagger(rho))))
    if tr > _TRACE_ABORT or herm > _HERM_ABORT:
        raise IntegrationError(f"t = {t:.6g}: trace drift {tr:.2e}, Hermiticity residual {herm:.2e}")


def evolve(config, cache=None):
    """Integrate the master equation with fixed-step RK4 and record observables."""
    if cache is None:
        cache = accumulate_propagators(config)
    sub, half = config.substeps, config.substeps // 2
    dt = config.dt
    lab = config.frame == "lab"
    times = [config.t0]
    if lab:
        rho = config.rho0.copy()

        def rhs(r, k):
            return master_rhs(r, cache.times[k], cache)

        def lab_state(r, k):
            return r
    else:
        rho = config.rho0.copy()

        def rhs(r, k):
            return interaction_rhs(r, k, cache)

        def lab_state(r, k):
            u = cache.unitaries[k]
            return u @ r @ dagger(u)

    states = [lab_state(rho, 0)]
    min_eig = float(np.linalg.eigvalsh(states[0]).min())
    for step in range(config.n_steps):
        k = step * sub
        k1 = rhs(rho, k)
        k2 = rhs(rho + 0.5 * dt * k1, k + half)
        k3 = rhs(rho + 0.5 * dt * k2, k + half)
        k4 = rhs(rho + dt * k3, k + sub)
        rho = rho + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = config.t0 + (step + 1) * dt
        _check_state(rho, t)
        if (step + 1) % config.output_stride == 0 or step + 1 == config.n_steps:
            state = lab_state(rho, k + sub)
            times.append(t)
            states.append(state)
            min_eig = min(min_eig, float(np.linalg.eigvalsh(0.5 * (state + dagger(state))).min()))
    states = np.array(states)
    records = [observe(t, s, config.target) for t, s in zip(times, states)]
    return TimeSeries(times=np.array(times), states=states, records=records,
                      min_eigenvalue=min_eig, label=config.label)
