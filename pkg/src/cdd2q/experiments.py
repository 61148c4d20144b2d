"""Scenario registry for the entanglement-protection and protected-gate runs, plus CSV output.

Every scenario is a family of matched variants (e.g. ``nocontrol`` /
``control-weak`` / ``control-strong``, or ``bare`` / ``protected``) that share
the bath, coupling operators, initial state and time grid, so curve
differences isolate the control fields.

Parameters are a flat mapping with the keys in :data:`KNOWN_KEYS`; values may
come from defaults, a key-value config file and explicit overrides, in
increasing priority.
"""
import enum
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bath import OhmicBath
from .control import (DephasingTuple, FrequencyTuple, InvalidTupleError, decoupling_residual,
                      hc_state_protection, uc_state_protection, validate_tuple)
from .engine import (Coupling, CouplingSet, SimulationConfig, constant_hamiltonian, evolve, propagate,
                     zero_hamiltonian)
from .gates import GateKind, GateSpec, gate_target, h0_bare, hs_protected_cnotbar, hs_protected_cz
from .tensor import distance_up_to_global_phase, pauli_two_qubit

__all__ = [
    "CouplingKind", "build_coupling_set", "Scenario", "SCENARIOS", "KNOWN_KEYS", "UsageError",
    "list_scenarios", "resolve_params", "build_config", "run_scenario", "format_csv",
    "load_config_file", "parse_assignments", "INITIAL_STATES", "residual_table", "check_gate",
]

KNOWN_KEYS = ("scenario", "variant", "G", "omega_c", "kT", "tc", "tuple", "n1", "n2", "tau",
              "dt", "substeps", "micro", "t_end", "initial", "out")

_S2 = 1 / np.sqrt(2)
INITIAL_STATES = {
    "psi-plus": np.array([0, 1, 1, 0]) * _S2,          # (|01> + |10>)/sqrt2
    "phi-plus": np.array([1, 0, 0, 1]) * _S2,
    "plus-plus": np.full(4, 0.5),                      # |+>|+>
    "cnotbar-input": np.kron([1, 0], [_S2, -_S2]),     # |0>(|0> - |1>)/sqrt2
}


class UsageError(ValueError):
    """Unknown scenario, variant or parameter key, or an unparsable value."""


class CouplingKind(enum.Enum):
    DIFFERENT_BATHS_FULL = "different-baths-full"
    COMMON_BATH_FULL = "common-bath-full"
    DIFFERENT_BATHS_DEPHASING = "different-baths-dephasing"
    COMMON_BATH_DEPHASING = "common-bath-dephasing"


def _pauli_pairs(dephasing):
    axes = (0, 3) if dephasing else (0, 1, 2, 3)
    return [(k, l) for k in axes for l in axes if (k, l) != (0, 0)]


def build_coupling_set(kind, bath):
    """System coupling operators F_j = sigma_k sigma_l / 2, one bath each or summed onto one bath."""
    kind = CouplingKind(kind)
    dephasing = kind in (CouplingKind.DIFFERENT_BATHS_DEPHASING, CouplingKind.COMMON_BATH_DEPHASING)
    ops = [0.5 * pauli_two_qubit(k, l) for k, l in _pauli_pairs(dephasing)]
    if kind in (CouplingKind.COMMON_BATH_FULL, CouplingKind.COMMON_BATH_DEPHASING):
        ops = [sum(ops)]
    return CouplingSet(tuple(Coupling(F, bath) for F in ops))


@dataclass(frozen=True)
class Scenario:
    name: str
    description: str
    family: str
    coupling: CouplingKind
    variants: tuple
    defaults: dict


_STATE_DEFAULTS = {"G": 0.05, "omega_c": 2 * np.pi, "kT": 2.0, "tc": 0.5, "t_end": 4.0,
                   "substeps": 2, "micro": 4, "initial": "psi-plus"}
_CNOT_DEFAULTS = {"G": 0.03, "omega_c": 2 * np.pi, "kT": 2.0, "tc": 0.5, "tau": 0.5,
                  "n1": 2, "n2": 1, "t_end": 2.0, "substeps": 2, "micro": 4,
                  "initial": "cnotbar-input"}
_CZ_DEFAULTS = {"G": 0.02, "omega_c": np.pi, "kT": 2.0, "tc": 0.5, "tau": 0.5,
                "tuple": (1, 2, 4, 8), "t_end": 2.0, "substeps": 2, "micro": 4,
                "initial": "plus-plus"}
_STATE_VARIANTS = ("nocontrol", "control-weak", "control-strong")
_GATE_VARIANTS = ("bare", "protected")


def _registry():
    out = {}

    def add(name, description, family, coupling, variants, defaults):
        out[name] = Scenario(name, description, family, coupling, variants, dict(defaults))

    add("fig1-state-diffbaths",
        "Fig. 1: Bell-state protection, 15 independent baths, G=0.05, wc=2pi, tc=0.5; "
        "weak tuple (1,2,4,8), strong tuple (2,4,8,16)",
        "state", CouplingKind.DIFFERENT_BATHS_FULL, _STATE_VARIANTS, _STATE_DEFAULTS)
    add("fig2-state-commonbath",
        "Fig. 2: Bell-state protection, one common bath, parameters as Fig. 1",
        "state", CouplingKind.COMMON_BATH_FULL, _STATE_VARIANTS, _STATE_DEFAULTS)
    add("fig3-cnotbar-diffbaths",
        "Fig. 3: CNOT-bar gate under pure dephasing, 3 independent baths, n1=2, n2=1, tau=0.5, G=0.03",
        "cnotbar", CouplingKind.DIFFERENT_BATHS_DEPHASING, _GATE_VARIANTS, _CNOT_DEFAULTS)
    add("fig4-cnotbar-commonbath",
        "Fig. 4: CNOT-bar gate under pure dephasing, common bath, parameters as Fig. 3",
        "cnotbar", CouplingKind.COMMON_BATH_DEPHASING, _GATE_VARIANTS, _CNOT_DEFAULTS)
    add("fig5-cz-diffbaths",
        "Fig. 5: CZ gate, 15 independent baths, tau=0.5, G=0.02, wc=pi, tuple (1,2,4,8)",
        "cz", CouplingKind.DIFFERENT_BATHS_FULL, _GATE_VARIANTS, _CZ_DEFAULTS)
    add("fig6-cz-commonbath",
        "Fig. 6: CZ gate, common bath, parameters as Fig. 5",
        "cz", CouplingKind.COMMON_BATH_FULL, _GATE_VARIANTS, _CZ_DEFAULTS)
    add("sanity-free",
        "Sanity: no Hamiltonian, no bath; the state must stay fixed",
        "state", CouplingKind.DIFFERENT_BATHS_FULL, ("nocontrol",),
        dict(_STATE_DEFAULTS, G=0.0, t_end=1.0))
    add("sanity-cz-closed",
        "Sanity: closed-system protected CZ (G=0); concurrence 1 at tau",
        "cz", CouplingKind.DIFFERENT_BATHS_FULL, _GATE_VARIANTS, dict(_CZ_DEFAULTS, G=0.0, t_end=0.5))
    add("sanity-cnotbar-closed",
        "Sanity: closed-system protected CNOT-bar (G=0); concurrence 1 at tau",
        "cnotbar", CouplingKind.DIFFERENT_BATHS_DEPHASING, _GATE_VARIANTS,
        dict(_CNOT_DEFAULTS, G=0.0, t_end=0.5))
    return out


SCENARIOS = _registry()


def list_scenarios(machine=False):
    """Registry listing: one name per line if ``machine``, else name, variants and provenance."""
    if machine:
        return "\n".join(SCENARIOS)
    lines = []
    for s in SCENARIOS.values():
        lines.append(f"{s.name}  [{', '.join(s.variants)}]\n    {s.description}")
    return "\n".join(lines)


def _parse_tuple(value):
    if isinstance(value, str):
        try:
            value = tuple(int(v) for v in value.replace(" ", "").split(","))
        except ValueError:
            raise UsageError(f"tuple must be four comma-separated integers, got {value!r}") from None
    value = tuple(int(v) for v in value)
    if len(value) != 4:
        raise UsageError(f"tuple needs four integers, got {value!r}")
    return value


_PARSERS = {
    "G": float, "omega_c": float, "kT": float, "tc": float, "tau": float, "dt": float,
    "t_end": float, "n1": int, "n2": int, "substeps": int, "micro": int, "tuple": _parse_tuple,
    "variant": str, "scenario": str, "initial": str, "out": str,
}


def parse_assignments(items):
    """Turn ``["KEY=VALUE", ...]`` into a dict, rejecting unknown keys."""
    out = {}
    for item in items:
        if "=" not in item:
            raise UsageError(f"expected KEY=VALUE, got {item!r}")
        key, value = (s.strip() for s in item.split("=", 1))
        out[key] = value
    return out


def load_config_file(path):
    """Read a flat ``key = value`` file; blank lines and ``#`` comments are ignored."""
    lines = []
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append(line)
    return parse_assignments(lines)


def resolve_params(name, overrides=None):
    """Merge scenario defaults with ``overrides`` and fill derived defaults (variant, tuple, dt)."""
    if name not in SCENARIOS:
        raise UsageError(f"unknown scenario {name!r}; registered:\n{list_scenarios(machine=True)}")
    scenario = SCENARIOS[name]
    params = dict(scenario.defaults)
    params["scenario"] = name
    params["variant"] = scenario.variants[-1]
    for key, value in dict(overrides or {}).items():
        if key not in KNOWN_KEYS:
            raise UsageError(f"unknown key {key!r}; known keys: {', '.join(KNOWN_KEYS)}")
        if key == "scenario" and value != name:
            raise UsageError(f"override scenario={value!r} conflicts with {name!r}")
        try:
            params[key] = _PARSERS[key](value) if isinstance(value, str) else value
        except (TypeError, ValueError) as exc:
            raise UsageError(f"bad value for {key}: {value!r} ({exc})") from None
    if params["variant"] not in scenario.variants:
        raise UsageError(f"scenario {name!r} has variants {scenario.variants}, "
                         f"not {params['variant']!r}")
    if params["initial"] not in INITIAL_STATES:
        raise UsageError(f"unknown initial state {params['initial']!r}; "
                         f"choose from {', '.join(INITIAL_STATES)}")
    if scenario.family == "state" and "tuple" not in params:
        params["tuple"] = (2, 4, 8, 16) if params["variant"] == "control-strong" else (1, 2, 4, 8)
    if "tuple" in params:
        params["tuple"] = _parse_tuple(params["tuple"])
    params.setdefault("dt", params["tc"] / 250)
    cycles = params["tc"] / params["dt"]
    if abs(cycles - round(cycles)) > 1e-9 * cycles:
        raise UsageError(f"dt = {params['dt']} must divide tc = {params['tc']}")
    return params


def _gate_spec(params, kind):
    ratio = params["tau"] / params["tc"]
    cycles = int(round(ratio))
    if cycles < 1 or abs(ratio - cycles) > 1e-12 * ratio:
        raise UsageError(f"tau = {params['tau']} must be a whole number of cycles tc = {params['tc']}")
    return GateSpec(kind, params["tau"], cycles)


def _hamiltonian(scenario, params):
    """System Hamiltonian callable and the ideal target state (or None)."""
    variant = params["variant"]
    psi0 = INITIAL_STATES[params["initial"]]
    if scenario.family == "state":
        if variant == "nocontrol":
            return zero_hamiltonian, None
        ft = FrequencyTuple(*params["tuple"], tc=params["tc"])
        try:
            hc_state_protection(0.0, ft)
        except InvalidTupleError as exc:
            raise UsageError(str(exc)) from None
        return (lambda t: hc_state_protection(t, ft)), None
    kind = GateKind.CZ if scenario.family == "cz" else GateKind.CNOTBAR
    spec = _gate_spec(params, kind)
    target = gate_target(spec) @ psi0
    if variant == "bare":
        return constant_hamiltonian(h0_bare(spec)), target
    if kind is GateKind.CZ:
        ft = FrequencyTuple(*params["tuple"], tc=params["tc"])
        try:
            hs_protected_cz(0.0, ft, spec)
        except InvalidTupleError as exc:
            raise UsageError(str(exc)) from None
        return (lambda t: hs_protected_cz(t, ft, spec)), target
    try:
        dt_ = DephasingTuple(params["n1"], params["n2"], params["tc"])
    except InvalidTupleError as exc:
        raise UsageError(str(exc)) from None
    return (lambda t: hs_protected_cnotbar(t, dt_, spec)), target


def build_config(name, overrides=None):
    """Resolved parameters and the :class:`SimulationConfig` they describe."""
    params = resolve_params(name, overrides)
    scenario = SCENARIOS[name]
    bath = OhmicBath(params["G"], params["omega_c"], params["kT"])
    couplings = build_coupling_set(scenario.coupling, bath) if bath.G > 0 else CouplingSet(())
    hamiltonian, target = _hamiltonian(scenario, params)
    psi0 = INITIAL_STATES[params["initial"]]
    config = SimulationConfig(
        hamiltonian=hamiltonian, couplings=couplings, rho0=np.outer(psi0, psi0.conj()),
        t_end=params["t_end"], dt=params["dt"], substeps=params["substeps"],
        micro=params["micro"], target=target, label=f"{name}:{params['variant']}")
    return params, config


def _fmt(x):
    return "" if x is None else f"{x:.12g}"


def format_csv(series, params, description=""):
    """CSV text: ``#`` header with the resolved parameters, then one row per output time."""
    buf = io.StringIO()
    if description:
        buf.write(f"# {description}\n")
    for key in KNOWN_KEYS:
        if key in params:
            value = params[key]
            if isinstance(value, tuple):
                value = ",".join(str(v) for v in value)
            elif isinstance(value, float):
                value = _fmt(value)
            buf.write(f"# {key} = {value}\n")
    buf.write(f"# min_eigenvalue = {_fmt(series.min_eigenvalue)}\n")
    buf.write("t,concurrence,purity,trace_re,herm_residual,fidelity\n")
    for t, state, rec in zip(series.times, series.states, series.records):
        row = (rec.t, rec.concurrence, rec.purity, float(np.trace(state).real),
               rec.herm_residual, rec.fidelity)
        buf.write(",".join(_fmt(v) for v in row) + "\n")
    return buf.getvalue()


def run_scenario(name, overrides=None, out=None):
    """Run one scenario variant; write CSV to ``out`` (or the ``out`` key) when given.

    Returns ``(series, params)``.
    """
    params, config = build_config(name, overrides)
    series = evolve(config)
    path = out or params.get("out")
    if path:
        params["out"] = str(path)
        Path(path).write_text(format_csv(series, params, SCENARIOS[name].description))
    return series, params


def residual_table(harmonics, tc=0.5, npoints=4096):
    """Decoupling residual of all 15 sigma_k sigma_l under the universal control for ``harmonics``."""
    ft = FrequencyTuple(*harmonics, tc=tc)
    control = (lambda t: uc_state_protection(t, ft, strict=False))
    return {(k, l): decoupling_residual(pauli_two_qubit(k, l), control, tc, npoints)
            for k in range(4) for l in range(4) if (k, l) != (0, 0)}, validate_tuple(ft)


def check_gate(gate, dt=1e-4, tau=0.5, tc=0.5):
    """Closed-system, propagator-step ``dt`` distance (up to global phase) between the propagated protected gate and its target."""
    kind = GateKind(gate)
    spec = GateSpec(kind, tau, int(round(tau / tc)))
    if kind is GateKind.CZ:
        ft = FrequencyTuple(1, 2, 4, 8, tc)
        h = (lambda t: hs_protected_cz(t, ft, spec))
    else:
        dt_ = DephasingTuple(2, 1, tc)
        h = (lambda t: hs_protected_cnotbar(t, dt_, spec))
    n = int(round(tau / dt))
    if abs(n * dt - tau) > 1e-12:
        raise UsageError(f"dt = {dt} must divide tau = {tau}")
    # propagator step dt: one RK4 step spans two fine steps
    config = SimulationConfig(hamiltonian=h, couplings=CouplingSet(()), rho0=np.diag([1, 0, 0, 0]),
                              t_end=tau, dt=2 * dt, substeps=2)
    u = propagate(config)[-1]
    return distance_up_to_global_phase(u, gate_target(spec))
