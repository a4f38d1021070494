"""Truncated-oscillator exact diagonalization."""

import numpy as np
import pytest

from meanforce._backend import jacobi_eigh_real
from meanforce.algebra import BETA_INF, gibbs_state, hermitian_eigensystem, negativity, \
    purity, two_qubit_hamiltonian
from meanforce.narrow import EffectiveSystem, zero_width_state
from meanforce.oracle import OracleConvergenceError, dicke_hamiltonian, reduced_thermal_state


def test_matrix_is_real_symmetric_with_expected_dimension():
    td = dicke_hamiltonian(0.02, 0.0, 0.2, 1.0, 40)
    assert td.matrix.shape == (164, 164)
    assert td.matrix.dtype == np.float64
    assert np.max(np.abs(td.matrix - td.matrix.T)) == 0.0
    with pytest.raises(ValueError):
        dicke_hamiltonian(0.02, 0.0, 0.2, 1.0, 0)


def test_decoupled_spectrum_is_block_sum():
    td = dicke_hamiltonian(0.02, 0.1, 0.0, 1.0, 6)
    w, _ = jacobi_eigh_real(td.matrix)
    qubit_levels, _ = hermitian_eigensystem(two_qubit_hamiltonian(0.02, 0.1))
    expected = sorted(float(e) + n for e in qubit_levels for n in range(7))
    assert np.allclose(sorted(w), expected, atol=1e-12)


def test_decoupled_reduced_state_is_bare_gibbs():
    td = dicke_hamiltonian(0.02, 0.0, 0.0, 1.0, 16)
    rho, n_used = reduced_thermal_state(td, 5.0)
    ref = gibbs_state(two_qubit_hamiltonian(0.02), 5.0)
    assert np.max(np.abs(rho.matrix - ref.matrix)) <= 1e-14
    assert n_used >= 26


def test_displaced_oscillator_ground_energy():
    # With vanishing level spacing the maximal collective-spin sectors are
    # displaced oscillators with exact ground energy -g^2/omega.
    g = 0.3
    td = dicke_hamiltonian(1e-12, 0.0, g, 1.0, 60)
    w, _ = jacobi_eigh_real(td.matrix)
    assert abs(w[0] + g * g) <= 1e-10


def test_reduced_state_is_physical():
    td = dicke_hamiltonian(0.02, 0.0, 0.3, 1.0, 20)
    rho, _ = reduced_thermal_state(td, 1.0 / 0.006)
    m = rho.matrix
    assert abs(np.trace(m) - 1.0) <= 1e-12
    assert np.max(np.abs(m - m.conj().T)) <= 1e-10
    w, _ = hermitian_eigensystem(m)
    assert w[0] >= -1e-12


def test_cutoff_convergence_is_monotone():
    diffs = []
    prev = None
    for n_max in (4, 8, 12, 16, 20):
        td = dicke_hamiltonian(0.02, 0.0, 0.45, 1.0, n_max)
        w, v = jacobi_eigh_real(td.matrix)
        nf = n_max + 1
        vk = v.reshape(4, nf, -1)
        weights = np.zeros(len(w))
        weights[0] = 1.0
        red = np.einsum("ank,bnk,k->ab", vk, vk, weights)
        from meanforce.algebra import DensityMatrix

        neg = negativity(DensityMatrix(red.astype(complex)))
        if prev is not None:
            diffs.append(abs(neg - prev))
        prev = neg
    assert all(b < a for a, b in zip(diffs, diffs[1:]))


def test_convergence_cap_reports_last_iterates():
    td = dicke_hamiltonian(0.02, 0.0, 0.3, 1.0, 10)
    with pytest.raises(OracleConvergenceError, match="last iterates"):
        reduced_thermal_state(td, BETA_INF, convergence_tol=0.0, n_cap=30)


def test_near_degenerate_doublet_purity_approaches_half():
    # Strong dressing at small spacing: warming the near-degenerate doublet
    # drives the pair purity toward 1/2.
    td = dicke_hamiltonian(0.02, 0.0, 0.45, 1.0, 20)
    rho_cold, _ = reduced_thermal_state(td, BETA_INF)
    rho_warm, _ = reduced_thermal_state(td, 1.0 / 0.013)
    assert purity(rho_cold) > 0.6
    assert abs(purity(rho_warm) - 0.5) <= 0.06


def test_agreement_with_zero_width_state_degrades_with_spacing():
    # The single-mode projection holds for spacings far below the mode
    # frequency and degrades measurably as they become comparable.
    diffs = {}
    for wz in (0.02, 0.2):
        td = dicke_hamiltonian(wz, 0.0, 0.2, 1.0, 20)
        rho, _ = reduced_thermal_state(td, BETA_INF)
        es = EffectiveSystem(wz, 0.0, 0.2, 1.0, BETA_INF)
        diffs[wz] = abs(negativity(rho) - negativity(zero_width_state(es)))
    assert diffs[0.2] > diffs[0.02]
    assert diffs[0.02] <= 0.01
