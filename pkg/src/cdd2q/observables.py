"""Concurrence and density-matrix sanity diagnostics."""
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .tensor import SY, dagger

__all__ = ["ObservableRecord", "concurrence", "fidelity_to_pure", "purity",
           "hermiticity_residual", "observe", "ConcurrenceWarning"]

_YY = np.kron(SY, SY)
_ROUNDOFF = 1e-10


class ConcurrenceWarning(RuntimeWarning):
    """Spin-flip spectrum is negative beyond roundoff (state far from physical)."""


@dataclass(frozen=True)
class ObservableRecord:
    t: float
    concurrence: float
    purity: float
    trace_residual: float
    herm_residual: float
    fidelity: Optional[float] = None


def concurrence(rho):
    """Wootters concurrence max(l1 - l2 - l3 - l4, 0), clamped to [0, 1].

    The l_i are square roots of the eigenvalues of rho (YY) rho^* (YY) in
    descending order.  For positive semidefinite rho = X X^dagger they are the
    singular values of X^T (YY) X, which avoids square roots of roundoff-level
    eigenvalues.  Otherwise the spin-flip spectrum is used directly, with
    eigenvalues negative by roundoff clamped to 0.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 density matrix, got {rho.shape}")
    herm = 0.5 * (rho + dagger(rho))
    w, v = np.linalg.eigh(herm)
    scale = max(1.0, float(np.max(np.abs(w))))
    if w.min() >= -_ROUNDOFF * scale:
        x = v * np.sqrt(np.clip(w, 0.0, None))
        lam = np.linalg.svd(x.T @ _YY @ x, compute_uv=False)
    else:
        flipped = _YY @ rho.conj() @ _YY
        ev = np.linalg.eigvals(rho @ flipped).real
        if ev.min() < -_ROUNDOFF * scale:
            warnings.warn(f"spin-flip eigenvalue {ev.min():.3e} below roundoff", ConcurrenceWarning)
        lam = np.sort(np.sqrt(np.clip(ev, 0.0, None)))[::-1]
    c = lam[0] - lam[1] - lam[2] - lam[3]
    return float(min(max(c, 0.0), 1.0))


def fidelity_to_pure(rho, psi):
    psi = np.asarray(psi, dtype=complex).ravel()
    if abs(np.vdot(psi, psi).real - 1.0) > 1e-10:
        raise ValueError("psi must be normalized")
    return float(np.vdot(psi, rho @ psi).real)


def purity(rho):
    return float(np.real(np.trace(rho @ rho)))


def hermiticity_residual(rho):
    return float(np.max(np.abs(rho - dagger(rho))))


def observe(t, rho, target=None):
    """Full observable record for one state; ``target`` is an optional pure state."""
    return ObservableRecord(
        t=float(t),
        concurrence=concurrence(rho),
        purity=purity(rho),
        trace_residual=float(abs(np.trace(rho) - 1.0)),
        herm_residual=hermiticity_residual(rho),
        fidelity=None if target is None else fidelity_to_pure(rho, target),
    )
