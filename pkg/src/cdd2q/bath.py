"""Ohmic bath: spectral density, thermal correlation function and its tabulation.

The correlation function of a bath coupled through B = sum_k (g_k a_k + h.c.)
in a thermal state is

    C(tau) = int_0^inf dW J(W) [coth(W / 2kT) cos(W tau) - i sin(W tau)],

with J(W) = G W exp(-W / wc).  C(-tau) = conj(C(tau)).
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

__all__ = [
    "OhmicBath", "QuadratureError", "spectral_density", "correlation",
    "correlation_derivative", "imag_correlation_exact", "CorrelationTable",
    "build_correlation_table",
]

OMEGA_MAX_FACTOR = 40.0
_NODES_PER_PANEL = 20
_MIN_PANELS = 20
_SIMPSON_INTERVALS = 200_000
_TAIL_TOL = 1e-14


class QuadratureError(RuntimeError):
    """Frequency integral cannot be trusted at the requested settings."""


@dataclass(frozen=True)
class OhmicBath:
    G: float = 0.05
    omega_c: float = 2 * np.pi
    kT: float = 2.0

    def __post_init__(self):
        for name in ("G", "omega_c", "kT"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite")
            object.__setattr__(self, name, value)
        if self.G < 0:
            raise ValueError("G must be non-negative")
        if self.omega_c <= 0 or self.kT <= 0:
            raise ValueError("omega_c and kT must be positive")

    @property
    def key(self):
        return (self.G, self.omega_c, self.kT)


def spectral_density(bath, omega):
    omega = np.asarray(omega, dtype=float)
    if np.any(omega < 0):
        raise ValueError("spectral density is defined for omega >= 0")
    out = bath.G * omega * np.exp(-omega / bath.omega_c)
    return out if out.ndim else float(out)


def _x_coth_x(x):
    # x coth(x), using the series below x ~ 1e-6 so W -> 0 is finite
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < 0.5e-6
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 + x * x / 3.0, safe / np.tanh(safe))


def _symmetric_density(bath, omega):
    """J(W) coth(W / 2kT), finite at W = 0 where it tends to 2 G kT."""
    x = omega / (2 * bath.kT)
    return bath.G * 2 * bath.kT * np.exp(-omega / bath.omega_c) * _x_coth_x(x)


def _tail_bound(bath, omega_max):
    # bound on int_{W_max}^inf J(W) coth(W/2kT) dW
    wc = bath.omega_c
    coth = 1.0 / np.tanh(omega_max / (2 * bath.kT))
    return bath.G * np.exp(-omega_max / wc) * (omega_max * wc + wc * wc) * coth


@lru_cache(maxsize=32)
def _gauss_nodes(omega_max, panels):
    x, w = np.polynomial.legendre.leggauss(_NODES_PER_PANEL)
    edges = np.linspace(0.0, omega_max, panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _frequency_rule(bath, tau_max, method, omega_max_factor):
    omega_max = omega_max_factor * bath.omega_c
    tail = _tail_bound(bath, omega_max)
    # size of the integral itself: int J = G wc^2, and J coth -> 2 G kT at W = 0
    scale = max(bath.G * bath.omega_c * max(2 * bath.kT, bath.omega_c), np.finfo(float).tiny)
    if bath.G > 0 and tail > _TAIL_TOL * scale:
        raise QuadratureError(
            f"integrand tail {tail:.3e} beyond W_max = {omega_max:.4g} exceeds tolerance; "
            "increase omega_max_factor")
    if method == "gauss":
        # panels narrow enough that each holds at most half an oscillation of cos(W tau_max)
        panels = max(_MIN_PANELS, int(np.ceil(omega_max * tau_max / np.pi)))
        return _gauss_nodes(omega_max, panels)
    if method == "simpson":
        n = max(_SIMPSON_INTERVALS, 2 * int(np.ceil(4 * omega_max * tau_max)))
        n += n % 2
        nodes = np.linspace(0.0, omega_max, n + 1)
        w = np.ones(n + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return nodes, w * (omega_max / n) / 3.0
    raise ValueError(f"unknown quadrature method {method!r}")


def _transform(bath, tau, method, omega_max_factor, derivative=False, chunk=256):
    tau = np.asarray(tau, dtype=float)
    flat = np.abs(tau.ravel())
    tau_max = float(flat.max(initial=0.0))
    nodes, weights = _frequency_rule(bath, tau_max, method, omega_max_factor)
    sym = weights * _symmetric_density(bath, nodes)
    anti = weights * bath.G * nodes * np.exp(-nodes / bath.omega_c)
    if derivative:
        sym, anti = sym * nodes, anti * nodes
    out = np.empty(flat.shape, dtype=complex)
    for start in range(0, flat.size, chunk):
        phase = np.outer(nodes, flat[start:start + chunk])
        c, s = np.cos(phase), np.sin(phase)
        if derivative:
            out[start:start + chunk] = -(sym @ s) - 1j * (anti @ c)
        else:
            out[start:start + chunk] = sym @ c - 1j * (anti @ s)
    # C(-tau) = conj C(tau); C'(-tau) = -conj C'(tau)
    neg = tau.ravel() < 0
    out[neg] = -np.conj(out[neg]) if derivative else np.conj(out[neg])
    return out.reshape(tau.shape)


def correlation(bath, tau, method="gauss", omega_max_factor=OMEGA_MAX_FACTOR):
    """Thermal bath correlation function C(tau) (scalar or array of lags).

    ``method`` selects composite Gauss-Legendre ("gauss", default) or
    composite Simpson ("simpson") for the frequency integral.
    """
    out = _transform(bath, tau, method, omega_max_factor)
    return complex(out) if out.ndim == 0 else out


def correlation_derivative(bath, tau, method="gauss", omega_max_factor=OMEGA_MAX_FACTOR):
    """dC/dtau, by the same frequency quadrature as :func:`correlation`."""
    out = _transform(bath, tau, method, omega_max_factor, derivative=True)
    return complex(out) if out.ndim == 0 else out


def imag_correlation_exact(bath, tau):
    """Closed form of Im C(tau) = -2 G tau wc^3 / (1 + wc^2 tau^2)^2."""
    tau = np.asarray(tau, dtype=float)
    wc = bath.omega_c
    return -2 * bath.G * tau * wc ** 3 / (1 + (wc * tau) ** 2) ** 2


@dataclass(frozen=True, eq=False)
class CorrelationTable:
    """C(tau) and dC/dtau on the uniform grid [0, tau_max]; cubic Hermite lookups."""

    tau_max: float
    step: float
    values: np.ndarray
    slopes: np.ndarray

    def __post_init__(self):
        self.values.flags.writeable = False
        self.slopes.flags.writeable = False

    @property
    def grid(self):
        return self.step * np.arange(len(self.values))

    def at_index(self, k):
        """Exact grid values C(k * step) for integer (array) k >= 0."""
        return self.values[k]

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        a = np.abs(tau)
        if np.any(a > self.tau_max * (1 + 1e-12)):
            raise ValueError("lag outside the tabulated range")
        u = a / self.step
        k = np.minimum(np.floor(u).astype(int), len(self.values) - 2)
        x = u - k
        h00 = (1 + 2 * x) * (1 - x) ** 2
        h10 = x * (1 - x) ** 2
        h01 = x * x * (3 - 2 * x)
        h11 = x * x * (x - 1)
        out = (h00 * self.values[k] + h10 * self.step * self.slopes[k]
               + h01 * self.values[k + 1] + h11 * self.step * self.slopes[k + 1])
        out = np.where(tau < 0, np.conj(out), out)
        return complex(out) if out.ndim == 0 else out


def build_correlation_table(bath, tau_max, step, method="gauss"):
    step, tau_max = float(step), float(tau_max)
    if not step > 0 or not tau_max >= step:
        raise ValueError("need step > 0 and tau_max >= step")
    n = int(np.ceil(tau_max / step - 1e-9))
    grid = step * np.arange(n + 1)
    values = _transform(bath, grid, method, OMEGA_MAX_FACTOR)
    values[0] = values[0].real
    slopes = _transform(bath, grid, method, OMEGA_MAX_FACTOR, derivative=True)
    return CorrelationTable(tau_max=float(grid[-1]), step=step, values=values, slopes=slopes)
