"""Universal continuous dynamical decoupling of two qubits.

Control fields and decoupling checks (:mod:`cdd2q.control`), protected
CNOT-bar / CZ gates (:mod:`cdd2q.gates`), Ohmic baths (:mod:`cdd2q.bath`), a
non-Markovian master-equation integrator (:mod:`cdd2q.engine`),
entanglement diagnostics (:mod:`cdd2q.observables`) and the figure scenarios
(:mod:`cdd2q.experiments`).
"""
from .bath import OhmicBath, build_correlation_table, correlation, spectral_density
from .control import (DephasingTuple, FrequencyTuple, average_hamiltonian, decoupling_residual,
                      hc_local_same_fields, hc_state_protection, uc_dephasing,
                      uc_local_same_fields, uc_state_protection, validate_tuple)
from .engine import Coupling, CouplingSet, SimulationConfig, TimeSeries, evolve
from .experiments import CouplingKind, build_coupling_set, list_scenarios, run_scenario
from .gates import GateKind, GateSpec, h0_bare, hs_protected_cnotbar, hs_protected_cz, u0_rotating
from .observables import concurrence, fidelity_to_pure
from .tensor import (distance_up_to_global_phase, matrix_exponential, pauli_axis_exponential,
                     pauli_two_qubit)

__version__ = "0.1.0"
