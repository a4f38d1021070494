"""Reaction-coordinate / polaron treatment of a narrow reservoir spectral density.

The reservoir is split into one extracted bosonic mode at frequency
``omega_rc`` coupled to the qubits with strength ``g`` plus a residual bath.
Projecting the polaron-transformed problem onto the extracted mode's vacuum
leaves a renormalized qubit Hamiltonian

    H_eff = exp(-g^2/(2 omega_rc^2)) H_S - (g^2/omega_rc) S_x^2

and a completely positive, unital, trace-preserving channel (the
vacuum-projected polaron conjugation) that maps polaron-frame states back to
the lab frame.  Residual-bath corrections enter through the generic
perturbative engine at the effective coupling lambda_eff^2 which grows with
the squared width of the original density.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import engine
from .algebra import (
    BETA_INF,
    DensityMatrix,
    collective_sx,
    gibbs_state,
    two_qubit_hamiltonian,
)
from .spectral import ReservoirKernel, SpectralDensity, density_for_fixed_g, rc_density, rc_params

_BASIS_DIM = 4


@dataclass(frozen=True)
class EffectiveSystem:
    """Two qubits dressed by one extracted reservoir mode."""

    omega_z: float
    epsilon: float
    g: float
    omega_rc: float
    beta: float

    def __post_init__(self):
        if self.omega_z <= 0 or self.omega_rc <= 0 or self.g < 0 or self.beta < 0:
            raise ValueError("require omega_z, omega_rc > 0, g >= 0, beta >= 0")

    @property
    def tilde_omega_z(self) -> float:
        """Level spacing renormalized by the vacuum projection."""
        return math.exp(-self.g**2 / (2.0 * self.omega_rc**2)) * self.omega_z

    @property
    def tilde_g(self) -> float:
        """Half the induced collective-spin interaction energy, g^2/(2 omega_rc)."""
        return self.g**2 / (2.0 * self.omega_rc)

    @property
    def alpha(self) -> float:
        """Ratio of the induced interaction to the renormalized spacing."""
        return self.tilde_g / self.tilde_omega_z


def effective_hamiltonian(es: EffectiveSystem) -> np.ndarray:
    h_s = two_qubit_hamiltonian(es.omega_z, es.epsilon)
    sx = collective_sx()
    shrink = math.exp(-es.g**2 / (2.0 * es.omega_rc**2))
    return shrink * h_s - (es.g**2 / es.omega_rc) * (sx @ sx)


def polaron_channel(op: np.ndarray, g: float, omega_rc: float) -> np.ndarray:
    """Vacuum-projected polaron conjugation of a two-qubit operator.

    Trace-preserving, unital and positivity-preserving; reduces to the
    identity map at g = 0.  Uses the two-qubit identity S_x^3 = S_x to resum
    the displacement series in closed form.
    """
    sx = collective_sx()
    sx2 = sx @ sx
    x = g * g / (omega_rc * omega_rc)
    e1 = math.exp(-0.5 * x)
    e2 = math.exp(-2.0 * x)
    out = np.asarray(op, dtype=complex).copy()
    out += 0.5 * (3.0 + e2 - 4.0 * e1) * (sx2 @ op @ sx2)
    out += 0.5 * (1.0 - e2) * (sx @ op @ sx)
    out -= (1.0 - e1) * (sx2 @ op + op @ sx2)
    return out


def zero_width_state(es: EffectiveSystem) -> DensityMatrix:
    """Mean-force state when the qubits couple to the extracted mode alone.

    Rests on the vacuum projection, which needs the mode frequency to be the
    largest scale: quantitatively reliable for g below about the mode
    frequency and level spacings below about a tenth of it.
    """
    rho_eff = gibbs_state(effective_hamiltonian(es), es.beta)
    rho = polaron_channel(rho_eff.matrix, es.g, es.omega_rc)
    return DensityMatrix(0.5 * (rho + rho.conj().T), (2, 2))


def energy_gap(es: EffectiveSystem) -> float:
    """Exact gap between the ground and first excited state of H_eff (|epsilon| <= 1)."""
    gt, wt = es.tilde_g, es.tilde_omega_z
    return math.hypot(gt, wt) - math.hypot(gt, es.epsilon * wt)


def gap_asymptotic(es: EffectiveSystem) -> float:
    """Large-alpha closed form of the gap; exact ratio tends to 1 as alpha grows."""
    x = es.g**2 / es.omega_rc**2
    return (1.0 - es.epsilon**2) * es.omega_z**2 / (es.omega_rc * x * math.exp(x))


def direct_gibbs_state(es: EffectiveSystem) -> DensityMatrix:
    """Thermal state of qubits with the same interaction applied directly,
    i.e. without renormalization or dressing by the extracted mode."""
    sx = collective_sx()
    h = two_qubit_hamiltonian(es.omega_z, es.epsilon) - (es.g**2 / es.omega_rc) * (sx @ sx)
    return gibbs_state(h, es.beta)


@dataclass(frozen=True)
class NarrowResult:
    """Narrow-density mean-force state split into its zero-width part and the
    residual-bath correction ``rho = rho_zero_width + lambda_eff_sq * delta_rho``."""

    rho: DensityMatrix
    rho_zero_width: DensityMatrix
    delta_rho: np.ndarray
    lambda_eff_sq: float
    validity: float
    reliable: bool
    coefficients: dict | None


def _symmetric_eigensystem(es: EffectiveSystem):
    """Analytic eigensystem of H_eff at epsilon = 0.

    Returns energies (e1..e4), eigenvectors as columns (|1>, |2>, |3>, |4>),
    and the collective-spin weights (a_plus, a_minus) with
    S_x|1> = a_plus|3> + a_minus|4>.
    """
    gt, wt = es.tilde_g, es.tilde_omega_z
    s = math.hypot(gt, wt)
    mu_p = gt / (s + wt)
    mu_m = -(s + wt) / gt
    r2 = 1.0 / math.sqrt(2.0)
    v1 = np.array([0.0, r2, r2, 0.0])
    v2 = np.array([0.0, r2, -r2, 0.0])
    v3 = np.array([mu_p, 0.0, 0.0, 1.0]) / math.sqrt(1.0 + mu_p**2)
    v4 = np.array([mu_m, 0.0, 0.0, 1.0]) / math.sqrt(1.0 + mu_m**2)
    energies = np.array([-2.0 * gt, 0.0, -gt - s, -gt + s])
    v_bell = np.array([r2, 0.0, 0.0, r2])  # S_x |1>
    a_plus = float(v3 @ v_bell)
    a_minus = float(v4 @ v_bell)
    return energies, (v1, v2, v3, v4), (a_plus, a_minus)


def narrow_state_analytic_symmetric(es: EffectiveSystem, kernel: ReservoirKernel,
                                    lambda_eff_sq: float) -> tuple[DensityMatrix, dict]:
    """Closed-form narrow-density state at epsilon = 0.

    Independent of the engine route; used as a cross-check of the numerical
    pipeline.  Returns the state and the correction coefficients.
    """
    if es.epsilon != 0.0:
        raise ValueError("closed form requires epsilon = 0")
    energies, vecs, (ap, am) = _symmetric_eigensystem(es)
    e1, _, e3, e4 = energies
    w1 = e1 - e3
    w2 = e1 - e4
    beta = es.beta
    if math.isinf(beta):
        p = np.array([0.0, 0.0, 1.0, 0.0])
    else:
        w = np.exp(-beta * (energies - energies.min()))
        p = w / w.sum()
    p1, p2, p3, p4 = p

    dv = {w: kernel.value(w) for w in (w1, -w1, w2, -w2)}
    dd = {w: kernel.derivative(w) for w in (w1, -w1, w2, -w2)}
    le2 = lambda_eff_sq
    slope_1 = p1 * dd[w1] - p3 * dd[-w1]
    slope_2 = p1 * dd[w2] - p4 * dd[-w2]
    if math.isinf(beta):
        c1 = le2 * (-(ap**2) * slope_1 - am**2 * slope_2)
        c3 = le2 * (ap**2 * slope_1)
        c4 = le2 * (am**2 * slope_2)
    else:
        c1 = le2 * (beta * (ap**2 * p1 * dv[w1] + am**2 * p1 * dv[w2])
                    - ap**2 * slope_1 - am**2 * slope_2)
        c3 = le2 * (beta * ap**2 * p3 * dv[-w1] + ap**2 * slope_1)
        c4 = le2 * (beta * am**2 * p4 * dv[-w2] + am**2 * slope_2)
    c34 = le2 * ap * am * (p1 * dv[w1] + p3 * dv[-w1] - p1 * dv[w2] - p4 * dv[-w2]) / (w1 - w2)

    shrink = 1.0 - c1 - c3 - c4
    pt1 = shrink * p1 + c1
    pt2 = shrink * p2
    pt3 = shrink * p3 + c3
    pt4 = shrink * p4 + c4

    x = es.g**2 / es.omega_rc**2
    e_half = math.exp(-0.5 * x)
    chi_p = 0.5 * (1.0 + math.exp(-2.0 * x))
    chi_m = 0.5 * (1.0 - math.exp(-2.0 * x))

    r2 = 1.0 / math.sqrt(2.0)
    v_bell = np.array([r2, 0.0, 0.0, r2])
    v_tilde = np.array([r2, 0.0, 0.0, -r2])
    v1 = vecs[0]
    v2 = vecs[1]

    mixed = ap**2 * pt3 + am**2 * pt4 + 2.0 * ap * am * c34
    rho = (
        (pt1 * chi_p + mixed * chi_m) * np.outer(v1, v1)
        + (mixed * chi_p + pt1 * chi_m) * np.outer(v_bell, v_bell)
        + pt2 * np.outer(v2, v2)
        + (am**2 * pt3 + ap**2 * pt4 - 2.0 * ap * am * c34) * np.outer(v_tilde, v_tilde)
        + e_half * (ap * am * (pt3 - pt4) - (ap**2 - am**2) * c34)
        * (np.outer(v_bell, v_tilde) + np.outer(v_tilde, v_bell))
    ).astype(complex)
    coeffs = {"c1": c1, "c2": 0.0, "c3": c3, "c4": c4, "c34": c34,
              "ptilde": (pt1, pt2, pt3, pt4), "a_plus": ap, "a_minus": am}
    return DensityMatrix(rho, (2, 2), perturbative=True), coeffs


def _build_kernel(density: SpectralDensity, beta: float, method: str) -> ReservoirKernel:
    if method == "residue" or (method == "auto" and math.isinf(beta)):
        try:
            return ReservoirKernel(density, BETA_INF, "residue")
        except ValueError:
            return ReservoirKernel(density, beta, "quadrature")
    return ReservoirKernel(density, beta, "quadrature")


def narrow_state(es: EffectiveSystem, density: SpectralDensity, lam: float,
                 kernel_method: str = "auto",
                 cross_check_tol: float = 1e-9) -> NarrowResult:
    """Mean-force state for a narrow peaked density of width ``density.gamma``.

    The residual-bath correction is computed with the perturbative engine on
    H_eff in the polaron frame and then mapped through the polaron channel.
    At epsilon = 0 the independent closed form is evaluated as well and the
    two must agree to ``cross_check_tol`` in max norm.
    """
    pars = rc_params(density, lam)
    if abs(pars.g - es.g) > 1e-9 * max(es.g, 1e-300) or \
            abs(pars.omega_rc - es.omega_rc) > 1e-9 * es.omega_rc:
        raise ValueError("density/coupling inconsistent with the effective system's (g, omega_rc)")

    zero_width = zero_width_state(es)
    if pars.lambda_eff_sq == 0.0:
        return NarrowResult(zero_width, zero_width, np.zeros((4, 4), dtype=complex),
                            0.0, 0.0, True, None)

    kernel = _build_kernel(rc_density(density), es.beta, kernel_method)
    h_eff = effective_hamiltonian(es)
    run = engine.mfg_perturbative(h_eff, collective_sx(), pars.lambda_eff_sq, es.beta, kernel)
    delta_polaron = run.correction / pars.lambda_eff_sq
    delta_rho = polaron_channel(delta_polaron, es.g, es.omega_rc)
    rho = DensityMatrix(zero_width.matrix + pars.lambda_eff_sq * delta_rho, (2, 2),
                        perturbative=True)

    coeffs = None
    if es.epsilon == 0.0:
        analytic, coeffs = narrow_state_analytic_symmetric(es, kernel, pars.lambda_eff_sq)
        gap = float(np.max(np.abs(analytic.matrix - rho.matrix)))
        if gap > cross_check_tol:
            raise RuntimeError(
                f"engine and closed-form narrow states disagree by {gap:.3e}")
    return NarrowResult(rho, zero_width, delta_rho, pars.lambda_eff_sq,
                        run.validity, run.reliable, coeffs)


def narrow_state_fixed_g(es: EffectiveSystem, gamma: float,
                         kernel_method: str = "auto") -> NarrowResult:
    """Narrow-density state with (g, omega_rc) held fixed while the width varies."""
    if gamma == 0.0:
        zw = zero_width_state(es)
        return NarrowResult(zw, zw, np.zeros((4, 4), dtype=complex), 0.0, 0.0, True, None)
    density, lam = density_for_fixed_g(es.g, es.omega_rc, gamma, es.omega_z)
    return narrow_state(es, density, lam, kernel_method)
