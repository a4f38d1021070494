"""Closed-form weak-coupling states against the generic engine and scalar oracles."""

import math
import warnings

import numpy as np
import pytest

from meanforce.algebra import (
    BETA_INF,
    DensityMatrix,
    gibbs_state,
    n_qubit_hamiltonian,
    negativity,
    partial_trace,
    purity,
    two_qubit_hamiltonian,
)
from meanforce.spectral import ReservoirKernel, density_for_fixed_g
from meanforce.weak import (
    WeakCouplingContext,
    dressing_strength,
    dressing_strength_derivative,
    dressing_strength_pv,
    fermi_population,
    negativity_small_gap,
    small_gap_state,
    vanishing_temperature_small_gap,
    weak_state,
    weak_state_engine,
    weak_state_n,
)

WZ = 0.02
BETA = 50.0 / WZ


@pytest.fixture
def kernel(density):
    return ReservoirKernel(density, BETA, "quadrature")


def ctx_for(kernel, lam_sq=0.002, eps=0.0, beta=BETA):
    return WeakCouplingContext(WZ, eps, lam_sq, beta, kernel)


def test_zero_coupling_gives_gibbs(kernel):
    ctx = ctx_for(kernel, lam_sq=0.0)
    assert dressing_strength(ctx) == 0.0
    state = weak_state(ctx)
    assert np.allclose(state.matrix, gibbs_state(two_qubit_hamiltonian(WZ), BETA).matrix,
                       atol=1e-15)
    assert negativity(state) == 0.0


def test_dressing_strength_dual_forms_agree(kernel):
    ctx = ctx_for(kernel)
    a = dressing_strength(ctx)
    b = dressing_strength_pv(ctx)
    assert abs(a - b) <= 1e-8 * abs(b)


def test_dressing_strength_dual_forms_agree_at_zero_temperature(density):
    k = ReservoirKernel(density, BETA_INF, "residue")
    ctx = ctx_for(k, beta=BETA_INF)
    a = dressing_strength(ctx)
    b = dressing_strength_pv(ctx)
    assert abs(a - b) <= 1e-8 * abs(b)


def test_dressing_strength_reorganization_limit(density):
    # Cold qubits far below the density peak: theta -> Q/4 within 1%.
    beta = 1.0 / WZ  # k_B T = omega_z
    k = ReservoirKernel(density, beta, "quadrature")
    lam_sq = 0.01
    ctx = ctx_for(k, lam_sq=lam_sq, beta=beta)
    q_reorg = lam_sq * WZ
    assert abs(dressing_strength(ctx) - q_reorg / 4.0) <= 0.01 * q_reorg / 4.0
    # and its level-spacing slope is negligible on the same scale
    assert abs(dressing_strength_derivative(ctx)) <= 0.05 * q_reorg / 4.0 / WZ


def test_dressing_derivative_matches_finite_difference(kernel):
    ctx = ctx_for(kernel)
    step = 1e-5 * WZ
    up = WeakCouplingContext(WZ + step, 0.0, ctx.lambda_sq, ctx.beta, kernel)
    dn = WeakCouplingContext(WZ - step, 0.0, ctx.lambda_sq, ctx.beta, kernel)
    fd = (dressing_strength(up) - dressing_strength(dn)) / (2.0 * step)
    assert abs(dressing_strength_derivative(ctx) - fd) <= 1e-5 * abs(fd)


def test_closed_form_equals_engine_symmetric(kernel):
    ctx = ctx_for(kernel)
    closed = weak_state(ctx)
    eng = weak_state_engine(ctx)
    assert np.max(np.abs(closed.matrix - eng.rho.matrix)) <= 1e-10


def test_closed_form_equals_engine_split(kernel):
    ctx = ctx_for(kernel, eps=0.1)
    closed = weak_state(ctx)
    eng = weak_state_engine(ctx)
    assert np.max(np.abs(closed.matrix - eng.rho.matrix)) <= 1e-10


def test_closed_form_handles_full_asymmetry(kernel):
    ctx = ctx_for(kernel, eps=1.0)
    closed = weak_state(ctx)
    eng = weak_state_engine(ctx)
    assert np.max(np.abs(closed.matrix - eng.rho.matrix)) <= 1e-10


def test_branch_continuity_at_the_switch(kernel):
    ctx = ctx_for(kernel, eps=1e-6)
    sym = weak_state(ctx, branch="symmetric")
    gen = weak_state(ctx, branch="general")
    assert np.max(np.abs(sym.matrix - gen.matrix)) <= 1e-5


def test_branch_overlap_band(kernel):
    for eps in (1e-5, 1e-4, 1e-3):
        ctx = ctx_for(kernel, eps=eps)
        sym = weak_state(ctx, branch="symmetric")
        gen = weak_state(ctx, branch="general")
        assert np.max(np.abs(sym.matrix - gen.matrix)) <= 1e-6


def test_swap_invariance_of_symmetric_state(kernel):
    ctx = ctx_for(kernel)
    m = weak_state(ctx).matrix
    swap = np.zeros((4, 4))
    swap[0, 0] = swap[3, 3] = swap[1, 2] = swap[2, 1] = 1.0
    assert np.max(np.abs(swap @ m @ swap - m)) <= 1e-14


def test_validity_warning(kernel):
    with pytest.warns(UserWarning):
        weak_state(ctx_for(kernel, lam_sq=1.0))


def test_n_qubit_reduces_to_pair_state(kernel):
    pair = weak_state(ctx_for(kernel)).matrix
    bigger = weak_state_n(2, WZ, 0.002, BETA, kernel).matrix
    assert np.max(np.abs(pair - bigger)) <= 1e-14


def test_n_qubit_zero_coupling(kernel):
    state = weak_state_n(3, WZ, 0.0, BETA, kernel)
    assert np.allclose(state.matrix, gibbs_state(n_qubit_hamiltonian(WZ, 3), BETA).matrix,
                       atol=1e-15)


def test_three_qubit_trace_reduces_to_pair(kernel):
    triple = weak_state_n(3, WZ, 0.002, BETA, kernel)
    reduced = partial_trace(triple, keep=[1, 2])
    pair = weak_state(ctx_for(kernel))
    assert np.max(np.abs(reduced.matrix - pair.matrix)) <= 1e-12


def test_n_qubit_matches_engine(kernel):
    from meanforce.algebra import collective_sx
    from meanforce.engine import mfg_perturbative

    res = mfg_perturbative(n_qubit_hamiltonian(WZ, 3), collective_sx(3), 0.002, BETA, kernel)
    closed = weak_state_n(3, WZ, 0.002, BETA, kernel)
    assert np.max(np.abs(res.rho.matrix - closed.matrix)) <= 1e-10


def test_n_qubit_guard():
    with pytest.raises(ValueError):
        weak_state_n(13, WZ, 0.0, BETA, None)
    with pytest.raises(ValueError):
        weak_state_n(1, WZ, 0.0, BETA, None)


def test_small_gap_state_purity_orthogonality():
    # The coherence dressing is trace-orthogonal to the product state, so the
    # purity shift is quartic in the coupling.
    lam_sq = 0.02
    q_reorg = lam_sq * WZ
    rho_g = gibbs_state(two_qubit_hamiltonian(WZ), BETA)
    state = small_gap_state(WZ, q_reorg, BETA)
    assert abs(purity(state) - purity(rho_g)) <= 10.0 * lam_sq**2


def test_single_particle_term_breaks_purity_preservation(density):
    # At appreciable width the level-spacing dressing overlaps the product
    # state: Tr[rho_G (sz rho_th + rho_th sz)] != 0 at finite temperature.
    from meanforce.weak import _qubit_thermal, _SZ

    d, lam = density_for_fixed_g(0.02, 1.0, 0.4, WZ)
    beta = 1.0 / 0.004
    rho_q = _qubit_thermal(WZ, beta)
    rho_g = np.kron(rho_q, rho_q)
    single = np.kron(_SZ, rho_q) + np.kron(rho_q, _SZ)
    overlap = float(np.real(np.trace(rho_g @ single)))
    assert abs(overlap) > 1e-3
    k = ReservoirKernel(d, beta, "quadrature")
    ctx = WeakCouplingContext(WZ, 0.0, lam * lam, beta, k)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        state = weak_state(ctx)
    shift = purity(state) - purity(DensityMatrix(rho_g))
    assert abs(shift) > 1e-7


def test_negativity_small_gap_zero_temperature_limit():
    q_reorg = 0.004
    assert negativity_small_gap(q_reorg, WZ, BETA_INF) == q_reorg / (4.0 * WZ)


def test_negativity_small_gap_threshold_matches_full_root(density):
    # The coupling below which the closed form vanishes agrees with the full
    # state's entanglement threshold.
    beta = 1.0 / 0.004
    t = 1.0 - 2.0 * fermi_population(WZ, beta)
    pe = fermi_population(WZ, beta)
    q_c = 4.0 * WZ * pe * (1.0 - pe) / t
    assert negativity_small_gap(q_c * 0.999, WZ, beta) == 0.0
    assert negativity_small_gap(q_c * 1.001, WZ, beta) > 0.0
    # full-state threshold at the same temperature, scanning the coupling
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        lo, hi = 0.5 * q_c, 2.0 * q_c
        for _ in range(30):
            mid = 0.5 * (lo + hi)
            d, lam = density_for_fixed_g(math.sqrt(mid), 1.0, 1e-3, WZ)
            k = ReservoirKernel(d, beta, "quadrature")
            n = negativity(weak_state(WeakCouplingContext(WZ, 0.0, lam * lam, beta, k)))
            if n > 1e-10:
                hi = mid
            else:
                lo = mid
    assert abs(0.5 * (lo + hi) - q_c) <= 0.05 * q_c


def test_vanishing_temperature_closed_form():
    q_reorg = 0.004
    t_n = vanishing_temperature_small_gap(q_reorg, WZ)
    assert negativity_small_gap(q_reorg, WZ, 1.0 / (t_n * 0.999)) > 0.0
    assert negativity_small_gap(q_reorg, WZ, 1.0 / (t_n * 1.001)) == 0.0
    with pytest.raises(ValueError):
        vanishing_temperature_small_gap(0.0, WZ)


def test_fermi_population_limits():
    assert fermi_population(0.02, BETA_INF) == 0.0
    assert fermi_population(-0.02, BETA_INF) == 1.0
    assert fermi_population(0.0, BETA_INF) == 0.5
    for nu in (-3.0, -0.1, 0.0, 0.4):
        p = fermi_population(nu, 7.0)
        assert abs(p + fermi_population(-nu, 7.0) - 1.0) <= 1e-15
        assert abs(p - 1.0 / (1.0 + math.exp(7.0 * nu))) <= 1e-15
