"""Reservoir spectral densities, reaction-coordinate mapping, and the thermal
reservoir kernel.

Two spectral-density families are supported: the peaked density (kind
``"peaked"``) whose low-frequency weight integral fixes the normalization
scale ``omega_z``, and the residual-bath density (kind ``"rc"``) seen by the
reaction coordinate after the single-mode extraction.  The reservoir kernel

    D_beta(w) = PV int_0^inf J(x) [x + w*coth(beta*x/2)] / (x^2 - w^2) dx

and its frequency derivative are evaluated either by adaptive principal-value
quadrature (any beta) or by a residue closed form (beta = inf); the two
routes are independent and are cross-checked in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import quadrature
from ._backend import coth_half, j_peaked, j_rc

BETA_INF = math.inf


@dataclass(frozen=True)
class SpectralDensity:
    """Parameters of one spectral-density family.

    ``gamma = 0`` is accepted for the peaked family as the single-mode limit:
    the density has no pointwise value there, but the reservoir kernel takes
    an exact closed form (all weight at ``omega0``).
    """

    kind: str  # "peaked" or "rc"
    omega0: float
    gamma: float
    omega_z: float

    def __post_init__(self):
        if self.kind not in ("peaked", "rc"):
            raise ValueError(f"unknown spectral-density kind {self.kind!r}")
        if self.omega0 <= 0 or self.gamma < 0 or self.omega_z <= 0:
            raise ValueError("require omega0 > 0, gamma >= 0, omega_z > 0")

    @property
    def single_mode(self) -> bool:
        return self.gamma == 0.0

    def value(self, omega):
        """J(omega) for omega >= 0."""
        w = np.asarray(omega, dtype=float)
        if np.any(w < 0):
            raise ValueError("spectral density defined for omega >= 0")
        if self.single_mode:
            if self.kind == "rc":
                return np.zeros_like(w)
            raise ValueError("single-mode limit has no pointwise density")
        f = j_peaked if self.kind == "peaked" else j_rc
        return f(w, self.omega0, self.gamma, self.omega_z)

    def moment(self, power: int, abs_tol: float | None = None, rel_tol: float = 1e-10) -> float:
        """int_0^inf omega^power J(omega) d(omega) by adaptive quadrature."""
        if self.single_mode:
            raise ValueError("use the closed-form moments in the single-mode limit")
        if abs_tol is None:
            abs_tol = 1e-13 * self.omega_z * self.omega0 ** (power + 1)
        f = lambda w: self.value(w) * w**power
        return quadrature.adaptive_semiinf(f, 0.0, self.tail_start, abs_tol, rel_tol)

    @property
    def tail_start(self) -> float:
        return self.omega0 + 50.0 * self.gamma


@dataclass(frozen=True)
class RCParams:
    """Reaction-coordinate mapping constants derived from a peaked density."""

    omega_rc: float       # extracted-mode frequency
    g: float              # qubit/reaction-coordinate coupling
    lambda_rc_sq: float   # reaction-coordinate/residual-bath coupling
    lambda_eff_sq: float  # effective qubit/residual-bath coupling
    q_reorg: float        # reorganization energy


def rc_params(density: SpectralDensity, lam: float) -> RCParams:
    """Map a peaked spectral density at coupling ``lam`` onto one extracted mode."""
    if density.kind != "peaked":
        raise ValueError("reaction-coordinate mapping starts from the peaked density")
    w0, gam, wz = density.omega0, density.gamma, density.omega_z
    omega_rc = math.sqrt(5.0 * gam * gam + w0 * w0)
    g = lam * math.sqrt(wz * (omega_rc**2 - 4.0 * gam * gam) / omega_rc)
    lambda_rc_sq = 2.0 * math.pi * gam * gam / (wz * omega_rc)
    lambda_eff_sq = 8.0 * math.pi * g * g * gam * gam / (wz * omega_rc**3)
    return RCParams(omega_rc, g, lambda_rc_sq, lambda_eff_sq, lam * lam * wz)


def density_for_fixed_g(g: float, omega_rc: float, gamma: float,
                        omega_z: float) -> tuple[SpectralDensity, float]:
    """Peaked density and coupling that realize a given (g, omega_rc) at width gamma.

    Holding the extracted-mode frequency fixed requires
    gamma < omega_rc/sqrt(5); the peak position and the coupling strength are
    then determined.
    """
    if gamma * gamma * 5.0 >= omega_rc * omega_rc:
        raise ValueError("fixed omega_rc requires gamma < omega_rc/sqrt(5)")
    omega0 = math.sqrt(omega_rc**2 - 5.0 * gamma * gamma)
    lam = g * math.sqrt(omega_rc / (omega_z * (omega_rc**2 - 4.0 * gamma * gamma)))
    return SpectralDensity("peaked", omega0, gamma, omega_z), lam


def rc_density(density: SpectralDensity) -> SpectralDensity:
    """Residual-bath density belonging to a peaked density."""
    if density.kind != "peaked":
        raise ValueError("expected the peaked density")
    return SpectralDensity("rc", density.omega0, density.gamma, density.omega_z)


def hilbert_transform(density: SpectralDensity, omega: float,
                      abs_tol: float | None = None, rel_tol: float = 1e-9) -> float:
    """PV int_{-inf}^{inf} J(x)/(x - omega) dx using the odd extension of J."""
    if abs_tol is None:
        abs_tol = 1e-12 * density.omega_z
    h = lambda x: 2.0 * x * density.value(x) / (x + omega)
    return quadrature.principal_value_semiinf(h, omega, density.tail_start, abs_tol, rel_tol)


def j_rc_from_hilbert(density: SpectralDensity, omega: float) -> float:
    """Residual-bath density reconstructed from the peaked one.

    Uses the exact mapping relation in which the combination
    lambda_rc^2 * J_rc is fixed by J alone; dividing out lambda_rc^2 gives a
    value directly comparable to the closed form of the rc family.
    """
    pars = rc_params(density, 1.0)
    g_sq_over_lam_sq = density.omega_z * (pars.omega_rc**2 - 4.0 * density.gamma**2) / pars.omega_rc
    jv = float(density.value(omega))
    hv = hilbert_transform(density, omega)
    combo = g_sq_over_lam_sq * 2.0 * math.pi * jv / (hv * hv + math.pi**2 * jv * jv)
    return combo / pars.lambda_rc_sq


def _residue_pole_data(density: SpectralDensity):
    """Upper-half-plane pole(s) of J(z) and the residue prefactors."""
    w0, gam, wz = density.omega0, density.gamma, density.omega_z
    if density.kind == "peaked":
        # Double poles at +/- omega0 + i*gamma.
        z = complex(w0, gam)
        kappa = wz * (w0 * w0 + gam * gam) * gam / (math.pi * w0 * w0)
        # (z+^2 + z-^2)/(z+^2 - z-^2) for the pair of upper poles.
        ratio = complex(0.0, -(w0 * w0 - gam * gam) / (2.0 * gam * w0))
        return z, kappa, ratio
    if 7.0 * gam * gam >= w0 * w0:
        raise ValueError(
            "residue form of the rc kernel needs 7*gamma^2 < omega0^2; use the quadrature method")
    u_plus = complex(w0 * w0 - 7.0 * gam * gam,
                     4.0 * gam * math.sqrt(w0 * w0 - 3.0 * gam * gam))
    z = np.sqrt(complex(u_plus))  # principal branch: Re > 0, Im > 0
    pref = 4.0 * wz * gam / math.pi
    zsq_diff = u_plus - u_plus.conjugate()  # z+^2 - z-^2
    return z, pref, zsq_diff


def _imaginary_axis_density(density: SpectralDensity):
    """i*J(i*y) on the positive imaginary axis: real, positive, ~y^-5 tail.

    At zero temperature the Bose occupation factor's poles condense into a
    branch cut along the imaginary axis; its weight is i*J(iy), which both
    density families keep real and positive wherever the residue closed form
    applies.
    """
    w0, gam, wz = density.omega0, density.gamma, density.omega_z
    if density.kind == "peaked":
        pref = 32.0 * wz * (w0 * w0 + gam * gam) * gam**3 / math.pi

        def t(y):
            q = (w0 * w0 + gam * gam - y * y) ** 2 + 4.0 * y * y * w0 * w0
            return pref * y**3 / (q * q)

        return t
    u_plus = complex(w0 * w0 - 7.0 * gam * gam,
                     4.0 * gam * math.sqrt(w0 * w0 - 3.0 * gam * gam))
    pref = 8.0 * wz * gam / math.pi

    def t(y):
        return pref * y**3 / np.abs(y * y + u_plus) ** 2

    return t


@dataclass
class ReservoirKernel:
    """Evaluator for the thermal reservoir kernel and its frequency derivative.

    method:
      - "quadrature": principal-value quadrature at the kernel's beta
        (finite or inf);
      - "residue": contour evaluation, beta = inf only: closed-form pole
        residues plus the branch-cut integral along the imaginary axis into
        which the Bose factor's poles condense at zero temperature;
      - "auto": residue when beta = inf, quadrature otherwise.

    The single-mode limit (peaked density with gamma = 0) is exact at any
    beta and bypasses both routes.  Values are memoized per frequency.
    """

    density: SpectralDensity
    beta: float
    method: str = "auto"
    abs_tol: float = 0.0
    rel_tol: float = 1e-9
    _vcache: dict = field(default_factory=dict, repr=False)
    _dcache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be >= 0 (or inf)")
        if self.method not in ("auto", "quadrature", "residue"):
            raise ValueError(f"unknown kernel method {self.method!r}")
        if self.method == "residue" and not math.isinf(self.beta):
            raise ValueError("the residue closed form applies only at beta = inf")
        if self.method == "residue":
            _residue_pole_data(self.density)  # validate pole structure now
        if self.abs_tol == 0.0:
            self.abs_tol = 1e-12 * self.density.omega_z

    def _route(self) -> str:
        if self.density.single_mode:
            return "single-mode"
        if self.method == "auto":
            return "residue" if math.isinf(self.beta) else "quadrature"
        return self.method

    # -- kernel value ------------------------------------------------------

    def value(self, omega: float) -> float:
        """D_beta at frequency ``omega`` (may be negative or zero)."""
        w = float(omega)
        if w not in self._vcache:
            self._vcache[w] = self._value(w)
        return self._vcache[w]

    def _value(self, wn: float) -> float:
        route = self._route()
        if route == "single-mode":
            return self._single_mode_value(wn)
        if route == "residue":
            return self._residue_value(wn)
        return self._quad_value(wn)

    def _single_mode_value(self, wn: float) -> float:
        d = self.density
        if d.kind == "rc":
            return 0.0
        if abs(abs(wn) - d.omega0) < 1e-12 * d.omega0:
            raise ValueError("kernel frequency coincides with the single mode")
        c = 1.0 if math.isinf(self.beta) else float(coth_half(np.array([d.omega0]), self.beta)[0])
        return d.omega_z * d.omega0 * (d.omega0 + wn * c) / (d.omega0**2 - wn * wn)

    def _residue_value(self, wn: float) -> float:
        d = self.density
        if d.kind == "peaked":
            z, kappa, ratio = _residue_pole_data(d)
            r_plus = kappa * (z / (2.0 * (z - wn) ** 2) + ratio / (z - wn))
        else:
            z, pref, zsq_diff = _residue_pole_data(d)
            r_plus = pref * z * z / (zsq_diff * (z - wn))
        return float(-2.0 * math.pi * r_plus.imag) + self._branch_cut_value(wn)

    def _branch_cut_value(self, wn: float) -> float:
        """Imaginary-axis contribution, odd in the frequency argument."""
        if wn == 0.0:
            return 0.0
        t = _imaginary_axis_density(self.density)
        val = quadrature.adaptive_semiinf(
            lambda y: t(y) / (y * y + wn * wn),
            0.0, self.density.tail_start, self.abs_tol, self.rel_tol)
        return -wn * val

    def _branch_cut_derivative(self, wn: float) -> float:
        t = _imaginary_axis_density(self.density)
        return -quadrature.adaptive_semiinf(
            lambda y: t(y) * (y * y - wn * wn) / (y * y + wn * wn) ** 2,
            0.0, self.density.tail_start, self.abs_tol, self.rel_tol)

    def _quad_value(self, wn: float) -> float:
        d = self.density
        j = d.value
        inf_beta = math.isinf(self.beta)
        if wn == 0.0:
            f = (lambda w: j(w) / w)
            return quadrature.adaptive_semiinf(f, 0.0, d.tail_start, self.abs_tol, self.rel_tol)
        if inf_beta and wn < 0.0:
            f = (lambda w: j(w) / (w - wn))
            return quadrature.adaptive_semiinf(f, 0.0, d.tail_start, self.abs_tol, self.rel_tol)
        p = abs(wn)
        if inf_beta:
            h = j  # numerator (w + wn) cancels one denominator factor
        else:
            beta = self.beta

            def h(w):
                return j(w) * (w + wn * coth_half(w, beta)) / (w + p)

        return quadrature.principal_value_semiinf(h, p, d.tail_start, self.abs_tol, self.rel_tol)

    # -- kernel derivative ---------------------------------------------------

    def derivative(self, omega: float) -> float:
        """dD_beta/dw at frequency ``omega``."""
        w = float(omega)
        if w not in self._dcache:
            self._dcache[w] = self._derivative(w)
        return self._dcache[w]

    def _derivative(self, wn: float) -> float:
        route = self._route()
        if route == "single-mode":
            return self._single_mode_derivative(wn)
        if route == "residue":
            return self._residue_derivative(wn)
        return self._quad_derivative(wn)

    def _single_mode_derivative(self, wn: float) -> float:
        d = self.density
        if d.kind == "rc":
            return 0.0
        if abs(abs(wn) - d.omega0) < 1e-12 * d.omega0:
            raise ValueError("kernel frequency coincides with the single mode")
        c = 1.0 if math.isinf(self.beta) else float(coth_half(np.array([d.omega0]), self.beta)[0])
        den = d.omega0**2 - wn * wn
        num = c * den + 2.0 * wn * (d.omega0 + wn * c)
        return d.omega_z * d.omega0 * num / (den * den)

    def _residue_derivative(self, wn: float) -> float:
        d = self.density
        if d.kind == "peaked":
            z, kappa, ratio = _residue_pole_data(d)
            dr = kappa * (z / (z - wn) ** 3 + ratio / (z - wn) ** 2)
        else:
            z, pref, zsq_diff = _residue_pole_data(d)
            dr = pref * z * z / (zsq_diff * (z - wn) ** 2)
        return float(-2.0 * math.pi * dr.imag) + self._branch_cut_derivative(wn)

    def _quad_derivative(self, wn: float) -> float:
        d = self.density
        j = d.value
        inf_beta = math.isinf(self.beta)
        beta = self.beta
        if wn == 0.0:
            if inf_beta:
                f = (lambda w: j(w) / (w * w))
            else:
                f = (lambda w: j(w) * coth_half(w, beta) / (w * w))
            return quadrature.adaptive_semiinf(f, 0.0, d.tail_start, self.abs_tol, self.rel_tol)
        if inf_beta and wn < 0.0:
            f = (lambda w: j(w) / (w - wn) ** 2)
            return quadrature.adaptive_semiinf(f, 0.0, d.tail_start, self.abs_tol, self.rel_tol)
        p = abs(wn)
        if inf_beta:
            g = j
        else:

            def g(w):
                c = coth_half(w, beta)
                return j(w) * (c * (w - p) * (w + p) + 2.0 * wn * (w + wn * c)) / (w + p) ** 2

        return quadrature.finite_part_semiinf(g, p, d.tail_start, self.abs_tol, self.rel_tol)
