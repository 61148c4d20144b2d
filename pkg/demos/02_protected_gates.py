"""
Gates that carry their own decoupling
=====================================

The protected CNOT-bar and CZ Hamiltonians are the generators of U_c(t) U0(t).
Propagating them with no environment must land on the target gate at t = tau.
"""
import numpy as np

from cdd2q.control import DephasingTuple, FrequencyTuple
from cdd2q.engine import CouplingSet, SimulationConfig, propagate
from cdd2q.experiments import INITIAL_STATES
from cdd2q.gates import GateKind, GateSpec, gate_target, hs_protected_cnotbar, hs_protected_cz
from cdd2q.observables import concurrence
from cdd2q.tensor import distance_up_to_global_phase

cz = GateSpec(GateKind.CZ, tau=0.5, cycles=1)
cnot = GateSpec(GateKind.CNOTBAR, tau=0.5, cycles=1)
ft = FrequencyTuple(1, 2, 4, 8, tc=0.5)
dt_ = DephasingTuple(2, 1, tc=0.5)

cases = [
    ("cz", cz, lambda t: hs_protected_cz(t, ft, cz), INITIAL_STATES["plus-plus"]),
    ("cnotbar", cnot, lambda t: hs_protected_cnotbar(t, dt_, cnot), INITIAL_STATES["cnotbar-input"]),
]

for name, spec, h, psi0 in cases:
    for step in (1e-2, 1e-3, 1e-4):
        config = SimulationConfig(hamiltonian=h, couplings=CouplingSet(()),
                                  rho0=np.diag([1.0, 0, 0, 0]), t_end=spec.tau,
                                  dt=2 * step, substeps=2)
        u = propagate(config)[-1]
        d = distance_up_to_global_phase(u, gate_target(spec))
        print(f"{name:8s} step {step:.0e}  distance to target {d:.2e}")
    psi = u @ psi0
    print(f"{name:8s} concurrence of the output state {concurrence(np.outer(psi, psi.conj())):.10f}\n")
