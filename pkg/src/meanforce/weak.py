"""Closed-form weak-coupling mean-force states for qubits in a common bath.

The corrections to the bare Gibbs state are governed by the scalar dressing
strength

    theta(w) = (lambda^2/4) * [p(w) D(w) + p(-w) D(-w)],

with p the Fermi occupation at inverse temperature beta and D the reservoir
kernel.  For two qubits the correction splits into single-qubit dressing
terms and two coherence channels: the flip-flop exchange |eg><ge| + h.c. and
the double flip |ee><gg| + h.c.  Everything here is linear in lambda^2; the
same construction for arbitrary level spacings comes out of
``engine.mfg_perturbative`` and the two are required to agree to 1e-10.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import engine
from .algebra import (
    DensityMatrix,
    collective_sx,
    double_flip,
    flip_flop,
    kron_all,
    two_qubit_hamiltonian,
)
from .quadrature import principal_value_semiinf
from .spectral import ReservoirKernel
from ._backend import coth_half

#: |epsilon| below which the symmetric closed form is used.
EPSILON_BRANCH_SWITCH = 1e-4

_SZ = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
_I2 = np.eye(2, dtype=complex)


def fermi_population(nu: float, beta: float) -> float:
    """Occupation 1/(1 + exp(beta*nu)) of a level at signed energy nu."""
    if math.isinf(beta):
        return 0.0 if nu > 0 else (1.0 if nu < 0 else 0.5)
    x = beta * nu
    if x > 0:
        e = math.exp(-x)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(x))


def _qubit_thermal(omega: float, beta: float) -> np.ndarray:
    """Single-qubit thermal state diag(p_excited, p_ground)."""
    pe = fermi_population(omega, beta)
    return np.array([[pe, 0.0], [0.0, 1.0 - pe]], dtype=complex)


@dataclass(frozen=True)
class WeakCouplingContext:
    """Physical inputs of the weak-coupling expansion."""

    omega_z: float
    epsilon: float
    lambda_sq: float
    beta: float
    kernel: ReservoirKernel

    def __post_init__(self):
        if self.omega_z <= 0:
            raise ValueError("omega_z must be positive")
        if self.lambda_sq < 0:
            raise ValueError("lambda_sq must be >= 0")


def _theta_at(ctx: WeakCouplingContext, spacing: float) -> float:
    pe = fermi_population(spacing, ctx.beta)
    return 0.25 * ctx.lambda_sq * (
        pe * ctx.kernel.value(spacing) + (1.0 - pe) * ctx.kernel.value(-spacing))


def _theta_slope_at(ctx: WeakCouplingContext, spacing: float) -> float:
    """d theta / d spacing via the kernel derivative plus Fermi-factor slopes."""
    k = ctx.kernel
    pe = fermi_population(spacing, ctx.beta)
    pg = 1.0 - pe
    if math.isinf(ctx.beta):
        pslope = 0.0
    else:
        pslope = -ctx.beta * pe * pg  # d p(nu)/d nu at nu = +/- spacing
    return 0.25 * ctx.lambda_sq * (
        pslope * (k.value(spacing) - k.value(-spacing))
        + pe * k.derivative(spacing) - pg * k.derivative(-spacing))


def dressing_strength(ctx: WeakCouplingContext) -> float:
    """The dressing scalar at the mean level spacing."""
    return _theta_at(ctx, ctx.omega_z)


def dressing_strength_pv(ctx: WeakCouplingContext) -> float:
    """Dressing scalar as a single principal-value integral over the density.

    Mathematically identical to :func:`dressing_strength`; evaluated through
    an independent quadrature route for cross-checking.
    """
    d = ctx.kernel.density
    beta = ctx.beta
    wz = ctx.omega_z
    pe = fermi_population(wz, beta)
    asym = 2.0 * pe - 1.0  # p_excited - p_ground
    if d.single_mode:
        c = 1.0 if math.isinf(beta) else float(coth_half(np.array([d.omega0]), beta)[0])
        val = d.omega_z * d.omega0 * (d.omega0 + asym * wz * c) / (d.omega0**2 - wz * wz)
        return 0.25 * ctx.lambda_sq * val

    if math.isinf(beta):
        def h(w):
            return d.value(w) * (w - wz) / (w + wz)
    else:
        def h(w):
            return d.value(w) * (w + asym * wz * coth_half(w, beta)) / (w + wz)

    val = principal_value_semiinf(h, wz, d.tail_start, 1e-12 * d.omega_z, 1e-9)
    return 0.25 * ctx.lambda_sq * val


def dressing_strength_derivative(ctx: WeakCouplingContext) -> float:
    """d theta / d omega_z at fixed spectral density."""
    return _theta_slope_at(ctx, ctx.omega_z)


def weak_state(ctx: WeakCouplingContext, branch: str = "auto",
               validity_threshold: float = 0.1) -> DensityMatrix:
    """Two-qubit weak-coupling mean-force state.

    ``branch`` selects the symmetric or the general level-spacing form
    ("auto" switches at |epsilon| = 1e-4).  At beta = inf the state is built
    through the perturbative engine, which handles the ground-projector limit
    exactly.
    """
    validity = engine.validity_metric(
        two_qubit_hamiltonian(ctx.omega_z, ctx.epsilon), collective_sx(),
        ctx.lambda_sq, ctx.beta, ctx.kernel)
    if validity >= validity_threshold:
        warnings.warn(f"weak-coupling validity measure {validity:.3g} >= {validity_threshold}",
                      stacklevel=2)
    if math.isinf(ctx.beta):
        return weak_state_engine(ctx).rho
    if branch == "auto":
        branch = "symmetric" if abs(ctx.epsilon) < EPSILON_BRANCH_SWITCH else "general"
    if branch == "symmetric":
        return _weak_state_symmetric(ctx)
    if branch == "general":
        return _weak_state_general(ctx)
    raise ValueError(f"unknown branch {branch!r}")


def _weak_state_symmetric(ctx: WeakCouplingContext) -> DensityMatrix:
    wz, beta = ctx.omega_z, ctx.beta
    pe = fermi_population(wz, beta)
    pg = 1.0 - pe
    th = dressing_strength(ctx)
    dth = dressing_strength_derivative(ctx)
    tanhf = pg - pe

    rho_q = _qubit_thermal(wz, beta)
    rho_g = np.kron(rho_q, rho_q)
    single = np.kron(_SZ, rho_q) + np.kron(rho_q, _SZ)
    coef_flip = 2.0 * beta * th * pe * pg - tanhf * dth
    coef_double = tanhf * th / wz
    rho = rho_g - dth * single + coef_flip * flip_flop() + coef_double * double_flip()
    return DensityMatrix(rho, (2, 2), perturbative=True)


def _weak_state_general(ctx: WeakCouplingContext) -> DensityMatrix:
    wz, beta, eps = ctx.omega_z, ctx.beta, ctx.epsilon
    w1 = wz * (1.0 + eps)
    w2 = wz * (1.0 - eps)
    th1 = _theta_at(ctx, w1)
    th2 = _theta_at(ctx, w2)
    dth1 = _theta_slope_at(ctx, w1)
    dth2 = _theta_slope_at(ctx, w2)
    t1 = 1.0 - 2.0 * fermi_population(w1, beta)  # tanh(beta*w1/2)
    t2 = 1.0 - 2.0 * fermi_population(w2, beta)

    rho1 = _qubit_thermal(w1, beta)
    rho2 = _qubit_thermal(w2, beta)
    rho_g = np.kron(rho1, rho2)
    coef_flip = -(t2 * th1 - t1 * th2) / (2.0 * wz * eps)
    coef_double = (t2 * th1 + t1 * th2) / (2.0 * wz)
    rho = (rho_g
           - dth1 * np.kron(_SZ, rho2)
           - dth2 * np.kron(rho1, _SZ)
           + coef_flip * flip_flop()
           + coef_double * double_flip())
    return DensityMatrix(rho, (2, 2), perturbative=True)


def weak_state_engine(ctx: WeakCouplingContext) -> engine.MFGResult:
    """Same state through the generic perturbative engine."""
    h_s = two_qubit_hamiltonian(ctx.omega_z, ctx.epsilon)
    return engine.mfg_perturbative(h_s, collective_sx(), ctx.lambda_sq, ctx.beta, ctx.kernel)


def weak_state_n(n_qubits: int, omega_z: float, lambda_sq: float, beta: float,
                 kernel: ReservoirKernel) -> DensityMatrix:
    """Weak-coupling mean-force state of N qubits with identical level spacings."""
    if n_qubits < 2:
        raise ValueError("need at least two qubits")
    if n_qubits > 12:
        raise ValueError("refusing to build states beyond 12 qubits")
    ctx = WeakCouplingContext(omega_z, 0.0, lambda_sq, beta, kernel)
    pe = fermi_population(omega_z, beta)
    pg = 1.0 - pe
    th = dressing_strength(ctx)
    dth = dressing_strength_derivative(ctx)
    tanhf = pg - pe
    coef_flip = (0.0 if math.isinf(beta) else 2.0 * beta * th * pe * pg) - tanhf * dth
    coef_double = tanhf * th / omega_z

    rho_q = _qubit_thermal(omega_z, beta)
    rho = kron_all([rho_q] * n_qubits).astype(complex)

    for n in range(n_qubits):
        factors = [rho_q] * n_qubits
        factors[n] = _SZ
        rho = rho - dth * kron_all(factors)

    # coef_flip*(sx sx + sy sy)/2 + coef_double*(sx sx - sy sy)/2 on each pair,
    # with every spectator qubit carrying its thermal factor.
    sx = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
    sy = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
    for m in range(n_qubits - 1):
        for n in range(m + 1, n_qubits):
            fx = [rho_q] * n_qubits
            fy = [rho_q] * n_qubits
            fx[m] = fx[n] = sx
            fy[m] = fy[n] = sy
            rho = rho + 0.5 * (coef_flip + coef_double) * kron_all(fx) \
                      + 0.5 * (coef_flip - coef_double) * kron_all(fy)
    return DensityMatrix(rho, (2,) * n_qubits, perturbative=True)


def small_gap_state(omega_z: float, q_reorg: float, beta: float) -> DensityMatrix:
    """Weak-coupling state in the regime where the qubit spacing is far below
    the density peak: only the coherence channels survive, with weights set by
    the reorganization energy ``q_reorg``."""
    pe = fermi_population(omega_z, beta)
    pg = 1.0 - pe
    rho_q = _qubit_thermal(omega_z, beta)
    amp = 0.25 * q_reorg / omega_z
    coef_flip = 0.0 if math.isinf(beta) else amp * 2.0 * beta * omega_z * pe * pg
    coef_double = amp * (pg - pe)
    rho = np.kron(rho_q, rho_q) + coef_double * double_flip() + coef_flip * flip_flop()
    return DensityMatrix(rho, (2, 2), perturbative=True)


def negativity_small_gap(q_reorg: float, omega_z: float, beta: float) -> float:
    """Closed-form negativity of :func:`small_gap_state`."""
    pe = fermi_population(omega_z, beta)
    pg = 1.0 - pe
    return max(0.0, 0.25 * q_reorg / omega_z * (pg - pe) - pg * pe)


def vanishing_temperature_small_gap(q_reorg: float, omega_z: float) -> float:
    """Temperature at which the closed-form negativity first reaches zero."""
    if q_reorg <= 0:
        raise ValueError("entanglement is absent at zero coupling")
    return omega_z / math.asinh(2.0 * omega_z / q_reorg)
