"""Dense linear algebra on small multi-qubit Hilbert spaces.

Basis convention, shared by every module in this package: the two-qubit
product basis is ordered {|ee>, |eg>, |ge>, |gg>} with qubit 1 the left
tensor factor and sigma_z|e> = +|e>.  For N qubits the same rule applies
recursively (qubit 1 outermost).  Energies are in whatever unit the caller
uses consistently; inverse temperature ``beta`` may be ``math.inf`` for the
zero-temperature limit, and all thermal code branches on that value instead
of exponentiating it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np

from ._backend import jacobi_eigh_cplx, jacobi_eigh_real

BETA_INF = math.inf

#: Relative tolerance for accepting an operator as Hermitian.
HERMITICITY_TOL = 1e-10
#: Relative tolerance below the ground energy spread for degenerate-ground detection.
GROUND_DEGENERACY_TOL = 1e-10

_SIGMA = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}

_ID2 = np.eye(2, dtype=complex)


def kron_all(factors) -> np.ndarray:
    return reduce(np.kron, factors)


def pauli(qubit: int, axis: str, n_qubits: int = 2) -> np.ndarray:
    """Pauli operator on one qubit of an N-qubit register (1-based index)."""
    if axis not in _SIGMA:
        raise ValueError(f"unknown Pauli axis {axis!r}")
    if not 1 <= qubit <= n_qubits:
        raise ValueError(f"qubit index {qubit} outside 1..{n_qubits}")
    factors = [_SIGMA[axis] if k == qubit else _ID2 for k in range(1, n_qubits + 1)]
    return kron_all(factors)


def collective_sx(n_qubits: int = 2) -> np.ndarray:
    """Collective spin operator S_x = (1/2) sum_n sigma_x^(n)."""
    return 0.5 * sum(pauli(n, "x", n_qubits) for n in range(1, n_qubits + 1))


def flip_flop() -> np.ndarray:
    """(sigma_x sigma_x + sigma_y sigma_y)/2 = |eg><ge| + |ge><eg|."""
    return 0.5 * (pauli(1, "x") @ pauli(2, "x") + pauli(1, "y") @ pauli(2, "y"))


def double_flip() -> np.ndarray:
    """(sigma_x sigma_x - sigma_y sigma_y)/2 = |ee><gg| + |gg><ee|."""
    return 0.5 * (pauli(1, "x") @ pauli(2, "x") - pauli(1, "y") @ pauli(2, "y"))


def two_qubit_hamiltonian(omega_z: float, epsilon: float = 0.0) -> np.ndarray:
    """Bare Hamiltonian with level spacings omega_z*(1 +/- epsilon)."""
    return 0.5 * omega_z * ((1.0 + epsilon) * pauli(1, "z") + (1.0 - epsilon) * pauli(2, "z"))


def n_qubit_hamiltonian(omega_z: float, n_qubits: int) -> np.ndarray:
    """N identical qubits with level spacing omega_z."""
    return 0.5 * omega_z * sum(pauli(n, "z", n_qubits) for n in range(1, n_qubits + 1))


def is_hermitian(a: np.ndarray, tol: float = HERMITICITY_TOL) -> bool:
    scale = float(np.max(np.abs(a))) or 1.0
    return float(np.max(np.abs(a - a.conj().T))) <= tol * scale


def hermitian_eigensystem(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvectors of a Hermitian matrix.

    Raises ValueError for non-Hermitian input.  The input is symmetrized
    before the solve so roundoff asymmetry cannot leak into the output.
    """
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("expected a square matrix")
    if not is_hermitian(a):
        raise ValueError("matrix is not Hermitian within tolerance")
    h = 0.5 * (a + a.conj().T)
    if np.iscomplexobj(h) and float(np.max(np.abs(h.imag))) > 0.0:
        return jacobi_eigh_cplx(h)
    w, v = jacobi_eigh_real(h.real)
    return w, v.astype(complex) if np.iscomplexobj(a) else v


@dataclass(frozen=True)
class DensityMatrix:
    """Density matrix with tensor-factor bookkeeping.

    ``perturbative`` marks states built from a truncated expansion; they may
    carry small negative eigenvalues and are stored unmodified.  Exact states
    (Gibbs, reduced thermal) are checked to be positive semidefinite.
    """

    matrix: np.ndarray
    dims: tuple[int, ...] = (2, 2)
    perturbative: bool = False

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        object.__setattr__(self, "matrix", m)
        d = int(np.prod(self.dims))
        if m.shape != (d, d):
            raise ValueError(f"matrix shape {m.shape} inconsistent with dims {self.dims}")
        if abs(np.trace(m) - 1.0) > 1e-10:
            raise ValueError(f"trace {np.trace(m)} != 1")
        if not is_hermitian(m):
            raise ValueError("density matrix is not Hermitian within tolerance")
        if not self.perturbative:
            w, _ = hermitian_eigensystem(m)
            if w[0] < -1e-10:
                raise ValueError(f"exact state has negative eigenvalue {w[0]}")

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def _as_matrix(rho) -> np.ndarray:
    return rho.matrix if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def gibbs_state(h: np.ndarray, beta: float, dims: tuple[int, ...] | None = None) -> DensityMatrix:
    """Thermal state exp(-beta*H)/Z; beta=inf gives the ground-space projector.

    The ground energy is subtracted before exponentiation, so arbitrarily
    large finite beta cannot overflow.  A degenerate ground space at beta=inf
    yields the equal-weight mixture.
    """
    if beta < 0:
        raise ValueError("beta must be >= 0 (or inf)")
    w, v = hermitian_eigensystem(h)
    if dims is None:
        n = int(round(math.log2(h.shape[0])))
        dims = (2,) * n if 2**n == h.shape[0] else (h.shape[0],)
    scale = float(np.max(np.abs(w))) or 1.0
    if math.isinf(beta):
        ground = w <= w[0] + GROUND_DEGENERACY_TOL * scale
        weights = ground.astype(float)
    else:
        weights = np.exp(-beta * (w - w[0]))
        weights[weights < 1e-300] = 0.0
    weights /= weights.sum()
    rho = (v * weights) @ v.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return DensityMatrix(rho, dims)


def partial_transpose(rho, factor: int = 1, dims: tuple[int, ...] = (2, 2)) -> np.ndarray:
    """Partial transpose with respect to one tensor factor (1-based)."""
    m = _as_matrix(rho)
    if isinstance(rho, DensityMatrix):
        dims = rho.dims
    if len(dims) != 2:
        raise ValueError("partial_transpose expects a two-factor state")
    if factor not in (1, 2):
        raise ValueError("factor must be 1 or 2")
    d1, d2 = dims
    if m.shape != (d1 * d2, d1 * d2):
        raise ValueError("matrix shape inconsistent with dims")
    t = m.reshape(d1, d2, d1, d2)
    if factor == 1:
        t = t.transpose(2, 1, 0, 3)
    else:
        t = t.transpose(0, 3, 2, 1)
    return t.reshape(d1 * d2, d1 * d2)


def partial_trace(rho, keep, dims: tuple[int, ...] | None = None) -> DensityMatrix:
    """Trace out all factors not listed in ``keep`` (1-based indices)."""
    m = _as_matrix(rho)
    if isinstance(rho, DensityMatrix):
        dims = rho.dims
    if dims is None:
        raise ValueError("dims required for a bare array")
    keep = sorted(keep)
    nf = len(dims)
    if not keep or any(k < 1 or k > nf for k in keep) or len(set(keep)) != len(keep):
        raise ValueError(f"keep list {keep} inconsistent with {nf} factors")
    t = m.reshape(*dims, *dims)
    for k in range(nf, 0, -1):
        if k not in keep:
            t = np.trace(t, axis1=k - 1, axis2=k - 1 + t.ndim // 2)
    kept = tuple(dims[k - 1] for k in keep)
    d = int(np.prod(kept))
    out = t.reshape(d, d)
    out = 0.5 * (out + out.conj().T)
    perturbative = rho.perturbative if isinstance(rho, DensityMatrix) else True
    return DensityMatrix(out, kept, perturbative=perturbative)


def negativity(rho) -> float:
    """Entanglement negativity (trace norm of the partial transpose minus 1)/2."""
    pt = partial_transpose(rho)
    w, _ = hermitian_eigensystem(pt)
    return max(0.0, 0.5 * (float(np.sum(np.abs(w))) - 1.0))


def purity(rho) -> float:
    m = _as_matrix(rho)
    return float(np.real(np.trace(m @ m)))
