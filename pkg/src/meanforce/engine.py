"""Second-order perturbative construction of the mean-force Gibbs state.

Works for any finite-dimensional system Hamiltonian H and Hermitian coupling
operator X.  X is split into Bohr-frequency eigenoperators X_n satisfying
[H, X_n] = w_n X_n; the second-order correction then consists of a thermal
term (proportional to beta and the kernel value), a kernel-derivative term,
and a cross term over pairs of distinct Bohr frequencies.  Every correction
term is traceless by construction, so the output trace is exactly 1.

At beta = inf the Gibbs state degenerates to the ground projector and the
thermal term drops out; the validity measure then reduces to
(number of qubits) * coupling^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .algebra import DensityMatrix, gibbs_state, hermitian_eigensystem
from .spectral import ReservoirKernel

DEFAULT_GROUPING_TOL = 1e-9


@dataclass(frozen=True)
class EigenOperatorDecomposition:
    """Bohr-frequency jump operators of a coupling operator.

    Frequencies are sorted ascending and pairwise distinct at resolution
    ``grouping_tol * ||H||``; components closer than that are merged, which
    is what produces the correct degenerate limit when level spacings cross.
    """

    operators: tuple
    frequencies: tuple
    grouping_tol: float

    def __iter__(self):
        return iter(zip(self.frequencies, self.operators))


def eigenoperator_decompose(h_s: np.ndarray, x: np.ndarray,
                            grouping_tol: float = DEFAULT_GROUPING_TOL) -> EigenOperatorDecomposition:
    """Split X into eigenoperators of the commutator map [H, .]."""
    evals, vecs = hermitian_eigensystem(h_s)
    scale = float(np.max(np.abs(evals))) or 1.0
    tol = grouping_tol * scale
    x_eig = vecs.conj().T @ x @ vecs
    dim = len(evals)

    pair_freq = evals[:, None] - evals[None, :]
    order = np.argsort(pair_freq, axis=None, kind="stable")
    flat = pair_freq.reshape(-1)[order]

    # Cluster the sorted Bohr frequencies, chaining gaps below tolerance.
    groups: list[list[int]] = [[order[0]]]
    for idx, f in zip(order[1:], flat[1:]):
        if f - pair_freq.reshape(-1)[groups[-1][-1]] <= tol:
            groups[-1].append(idx)
        else:
            groups.append([idx])

    x_norm = float(np.linalg.norm(x)) or 1.0
    ops = []
    freqs = []
    for members in groups:
        mask = np.zeros(dim * dim, dtype=bool)
        mask[members] = True
        comp = np.where(mask.reshape(dim, dim), x_eig, 0.0)
        if np.linalg.norm(comp) <= 1e-14 * x_norm:
            continue
        ops.append(vecs @ comp @ vecs.conj().T)
        freqs.append(float(np.mean(pair_freq.reshape(-1)[members])))
    return EigenOperatorDecomposition(tuple(ops), tuple(freqs), grouping_tol)


@dataclass(frozen=True)
class MFGResult:
    """Perturbative mean-force state plus diagnostics.

    ``correction`` is the full second-order correction (already scaled by the
    squared coupling); ``term_breakdown`` holds the thermal, derivative and
    cross contributions separately.  ``reliable`` is False once the validity
    measure reaches 1.
    """

    rho: DensityMatrix
    rho_gibbs: np.ndarray
    correction: np.ndarray
    validity: float
    reliable: bool
    term_breakdown: dict
    frequencies: tuple


def _n_qubits(dim: int) -> int:
    n = int(round(math.log2(dim)))
    return n if 2**n == dim else 1


def validity_metric(h_s: np.ndarray, x: np.ndarray, lambda_sq: float, beta: float,
                    kernel: ReservoirKernel,
                    grouping_tol: float = DEFAULT_GROUPING_TOL) -> float:
    """Size of the second-order correction relative to the expansion's domain.

    Finite beta: lambda^2 * beta * |sum_n Tr[rho_G X_n X_n^+] D(w_n)|.
    beta = inf: (number of qubits) * lambda^2.
    """
    if math.isinf(beta):
        return _n_qubits(h_s.shape[0]) * lambda_sq
    rho_g = gibbs_state(h_s, beta).matrix
    dec = eigenoperator_decompose(h_s, x, grouping_tol)
    acc = 0.0
    for freq, op in dec:
        acc += float(np.real(np.trace(rho_g @ op @ op.conj().T))) * kernel.value(freq)
    return lambda_sq * beta * abs(acc)


def mfg_perturbative(h_s: np.ndarray, x: np.ndarray, lambda_sq: float, beta: float,
                     kernel: ReservoirKernel,
                     grouping_tol: float = DEFAULT_GROUPING_TOL) -> MFGResult:
    """Mean-force Gibbs state to second order in the system-reservoir coupling."""
    dims = (2,) * _n_qubits(h_s.shape[0]) if 2 ** _n_qubits(h_s.shape[0]) == h_s.shape[0] \
        else (h_s.shape[0],)
    rho_g = gibbs_state(h_s, beta, dims).matrix
    dec = eigenoperator_decompose(h_s, x, grouping_tol)
    n_ops = len(dec.operators)
    dim = h_s.shape[0]

    kv = [kernel.value(f) for f in dec.frequencies]
    kd = [kernel.derivative(f) for f in dec.frequencies]

    thermal = np.zeros((dim, dim), dtype=complex)
    deriv = np.zeros((dim, dim), dtype=complex)
    cross = np.zeros((dim, dim), dtype=complex)
    occupation = 0.0  # sum_n Tr[rho_G X_n X_n^+] D(w_n)

    for n in range(n_ops):
        xn = dec.operators[n]
        xnd = xn.conj().T
        prod = rho_g @ (xn @ xnd)
        tr = np.trace(prod)
        occupation += float(np.real(tr)) * kv[n]
        if not math.isinf(beta):
            thermal += beta * kv[n] * (prod - tr * rho_g)
        deriv += kd[n] * (xnd @ rho_g @ xn - rho_g @ xn @ xnd)

    for m in range(n_ops):
        xm = dec.operators[m]
        xmd = xm.conj().T
        for n in range(n_ops):
            if m == n:
                continue
            xn = dec.operators[n]
            y = xn.conj().T @ rho_g
            if np.linalg.norm(y) * np.linalg.norm(xm) < 1e-300:
                continue
            term = (xm @ y - y @ xm) - (xmd @ (rho_g @ xn) - (rho_g @ xn) @ xmd)
            cross += term * (kv[n] / (dec.frequencies[m] - dec.frequencies[n]))

    unit = thermal + deriv + cross
    correction = lambda_sq * unit
    rho = rho_g + correction
    if math.isinf(beta):
        validity = _n_qubits(dim) * lambda_sq
    else:
        validity = lambda_sq * beta * abs(occupation)
    return MFGResult(
        rho=DensityMatrix(rho, dims, perturbative=True),
        rho_gibbs=rho_g,
        correction=correction,
        validity=validity,
        reliable=validity < 1.0,
        term_breakdown={
            "thermal": lambda_sq * thermal,
            "derivative": lambda_sq * deriv,
            "cross": lambda_sq * cross,
        },
        frequencies=dec.frequencies,
    )
