"""Local tomography failure demonstrations.

Two 16x16 real two-party states are built from the same per-party
preparation ``rho = I/2 (x) |0><0|``: one composed with the Kronecker
product, one with the rescaled R-product.  Every pair of local symmetric
effects assigns them identical statistics, yet a global two-outcome POVM
separates them with certainty.  A one-parameter family of 4x4 states
additionally separates product-state independence from operational
independence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import embedding as emb
from .linalg import ShapeError, kron
from .networks import _sym_basis, check_independence

DEFAULT_TOL = 1e-9

_KET0 = np.array([[1.0, 0.0], [0.0, 0.0]])


def party_state() -> np.ndarray:
    """The per-party 4x4 real preparation: maximally mixed phase factor next
    to a pure data qubit; equals half the embedding of |0><0|."""
    return kron(np.eye(2) / 2, _KET0)


def build_witness_states():
    """(Kronecker-composed, R-composed) two-party states."""
    rho = party_state()
    psi_k = kron(rho, rho)
    psi_r = 2.0 * emb.r_product(rho, [2], rho, [2])
    return psi_k, psi_r


def global_witness_povm():
    """Two symmetric effects built from the antisymmetric phase generator on
    each party's phase factor; they sum to the identity."""
    jj = kron(emb.J2, np.eye(2), emb.J2, np.eye(2))
    e0 = 0.5 * np.eye(16) + 0.5 * jj
    e1 = 0.5 * np.eye(16) - 0.5 * jj
    return [e0, e1]


def complex_lift() -> np.ndarray:
    """The separable complex two-party state whose real image is the
    R-composed witness state: an even mixture of the two circular-phase
    product preparations."""
    plus_i = np.array([1.0, 1j]) / np.sqrt(2.0)
    minus_i = np.array([1.0, -1j]) / np.sqrt(2.0)
    zero = np.array([1.0, 0.0])
    out = np.zeros((16, 16), dtype=complex)
    for phase in (plus_i, minus_i):
        ket = np.kron(np.kron(phase, zero), np.kron(phase, zero))
        out += 0.5 * np.outer(ket, ket.conj())
    return out


@dataclass
class WitnessReport:
    local_max_deviation: float
    global_kron: tuple      # (p(E0), p(E1)) for the Kronecker-composed state
    global_r: tuple         # same for the R-composed state
    tol: float
    passed: bool

    def to_dict(self) -> dict:
        return {"local_max_deviation": self.local_max_deviation,
                "global_kron": list(self.global_kron),
                "global_r": list(self.global_r),
                "tol": self.tol,
                "passed": self.passed}


def run_witness(tol: float = DEFAULT_TOL) -> WitnessReport:
    psi_k, psi_r = build_witness_states()
    basis = _sym_basis(4)
    local_dev = 0.0
    for si in basis:
        for sj in basis:
            eff = kron(si, sj)
            dev = abs(np.trace(psi_k @ eff) - np.trace(psi_r @ eff))
            local_dev = max(local_dev, float(dev))
    e0, e1 = global_witness_povm()
    g_k = (float(np.trace(psi_k @ e0)), float(np.trace(psi_k @ e1)))
    g_r = (float(np.trace(psi_r @ e0)), float(np.trace(psi_r @ e1)))
    passed = (local_dev <= tol
              and abs(g_k[0] - 0.5) <= tol and abs(g_k[1] - 0.5) <= tol
              and abs(g_r[0]) <= tol and abs(g_r[1] - 1.0) <= tol)
    return WitnessReport(local_dev, g_k, g_r, tol, passed)


def caves_state(alpha: float):
    """4x4 real two-party state interpolating between the maximally mixed
    product state (alpha = 0) and a maximally phase-correlated one
    (alpha = 1); operationally independent for every alpha, a product state
    only at alpha = 0."""
    if not 0.0 <= alpha <= 1.0:
        raise ShapeError(f"alpha must lie in [0, 1], got {alpha}")
    state = 0.25 * (np.eye(4) - alpha * kron(emb.J2, emb.J2))
    verdict = check_independence(state, [2, 2], [[0], [1]], field="R")
    return state, verdict


def caves_decomposition(alpha: float) -> np.ndarray:
    """The two-term complex separable mixture whose real part reproduces the
    state: an even mixture of (1 +/- i sqrt(alpha) J)/2 product factors."""
    root = np.sqrt(alpha)
    out = np.zeros((4, 4), dtype=complex)
    for sign in (1.0, -1.0):
        f = (np.eye(2) + sign * 1j * root * emb.J2) / 2.0
        out += 0.5 * np.kron(f, f)
    return out
