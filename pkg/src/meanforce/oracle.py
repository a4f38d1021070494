"""Exact-diagonalization benchmark: two qubits plus the extracted reservoir
mode in a truncated oscillator basis.

The truncated Hamiltonian H = H_S + omega_rc a^+ a + g S_x (a + a^+) is real
symmetric in the product basis (two-qubit basis tensor oscillator number
basis), so the real Jacobi path is used.  The reduced two-qubit thermal state
is converged by raising the oscillator cutoff until the reported negativity
stops moving.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import jacobi_eigh_real
from .algebra import (
    GROUND_DEGENERACY_TOL,
    DensityMatrix,
    collective_sx,
    negativity,
    two_qubit_hamiltonian,
)


@dataclass(frozen=True)
class TruncatedDicke:
    """Qubits + single-mode Hamiltonian with oscillator levels 0..n_max."""

    omega_z: float
    epsilon: float
    g: float
    omega_rc: float
    n_max: int
    matrix: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def dicke_hamiltonian(omega_z: float, epsilon: float, g: float, omega_rc: float,
                      n_max: int) -> TruncatedDicke:
    """Build the truncated matrix; dimension 4*(n_max+1)."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    nf = n_max + 1
    h_s = two_qubit_hamiltonian(omega_z, epsilon).real
    sx = collective_sx().real
    number = np.diag(np.arange(nf, dtype=float))
    ladder = np.diag(np.sqrt(np.arange(1, nf)), 1)  # <n|a|n+1> = sqrt(n+1)
    position = ladder + ladder.T
    h = (np.kron(h_s, np.eye(nf))
         + omega_rc * np.kron(np.eye(4), number)
         + g * np.kron(sx, position))
    return TruncatedDicke(omega_z, epsilon, g, omega_rc, n_max, h)


def _reduced_state(td: TruncatedDicke, beta: float) -> DensityMatrix:
    w, v = jacobi_eigh_real(td.matrix)
    scale = float(np.max(np.abs(w))) or 1.0
    if math.isinf(beta):
        weights = (w <= w[0] + GROUND_DEGENERACY_TOL * scale).astype(float)
    else:
        weights = np.exp(-beta * (w - w[0]))
        weights[weights < 1e-300] = 0.0
    weights /= weights.sum()
    # Trace the oscillator factor without materializing the full density matrix:
    # rho_red = sum_k w_k Tr_osc |k><k|.
    nf = td.n_max + 1
    vk = v.reshape(4, nf, -1)
    red = np.einsum("ank,bnk,k->ab", vk, vk, weights)
    red = 0.5 * (red + red.T)
    return DensityMatrix(red.astype(complex), (2, 2))


class OracleConvergenceError(RuntimeError):
    """Raised when the oscillator cutoff hits the cap before converging."""


def reduced_thermal_state(td: TruncatedDicke, beta: float,
                          convergence_tol: float = 1e-8,
                          n_cap: int = 200) -> tuple[DensityMatrix, int]:
    """Reduced two-qubit thermal state, converged in the oscillator cutoff.

    Starting from ``td.n_max``, the cutoff grows in steps of 10 until the
    negativity of the reduced state changes by less than ``convergence_tol``;
    returns the converged state and the cutoff used.
    """
    n = td.n_max
    neg = negativity(_reduced_state(td, beta))
    history = [(n, neg)]
    while n + 10 <= n_cap:
        n += 10
        bigger = dicke_hamiltonian(td.omega_z, td.epsilon, td.g, td.omega_rc, n)
        nxt = _reduced_state(bigger, beta)
        neg_next = negativity(nxt)
        history.append((n, neg_next))
        if abs(neg_next - neg) < convergence_tol:
            return nxt, n
        neg = neg_next
    raise OracleConvergenceError(
        f"no convergence at cutoff cap {n_cap} (tol {convergence_tol}); "
        f"last iterates (n_max, negativity) = {history[-2:]}")
