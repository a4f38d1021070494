"""Pure-NumPy compute kernels.

Fallback implementations of the compiled extension ``_kernels_cy`` with the
same call signatures; ``meanforce._backend`` picks one of the two at import
time.  The hot paths are the cyclic Jacobi eigensolvers (used for every
thermal state, negativity and truncated-oscillator diagonalization) and the
spectral-density evaluators (called on every quadrature node).
"""

from __future__ import annotations

import numpy as np

# Sweep loop stops once the off-diagonal Frobenius norm drops below
# _OFF_TOL * ||A||_F.
_OFF_TOL = 1e-13
_MAX_SWEEPS = 60


def _jacobi(a: np.ndarray, v: np.ndarray) -> None:
    """Cyclic Jacobi diagonalization, in place; works for real or complex a."""
    n = a.shape[0]
    norm = float(np.linalg.norm(a))
    if norm == 0.0:
        return
    # Rotations on elements this small cannot move the off-diagonal norm.
    skip = 1e-18 * norm
    for _ in range(_MAX_SWEEPS):
        # Off-diagonal norm summed directly: the difference-of-squares form
        # ||A||^2 - ||diag||^2 bottoms out at sqrt(eps)*||A|| and never meets
        # the threshold.
        hollow = a.copy()
        np.fill_diagonal(hollow, 0.0)
        off = float(np.linalg.norm(hollow))
        if off <= _OFF_TOL * norm:
            return
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r <= skip:
                    continue
                w = apq / r
                tau = (a[p, p].real - a[q, q].real) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (tau - np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # A <- U+ A U with U the (p,q) plane rotation carrying phase w.
                cp = a[:, p].copy()
                cq = a[:, q].copy()
                a[:, p] = c * cp + s * np.conj(w) * cq
                a[:, q] = -s * w * cp + c * cq
                rp = a[p, :].copy()
                rq = a[q, :].copy()
                a[p, :] = c * rp + s * w * rq
                a[q, :] = -s * np.conj(w) * rp + c * rq
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp + s * np.conj(w) * vq
                v[:, q] = -s * w * vp + c * vq
    raise RuntimeError("Jacobi eigensolver did not converge in %d sweeps" % _MAX_SWEEPS)


def jacobi_eigh_real(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a real symmetric matrix, eigenvalues ascending."""
    a = np.array(a, dtype=np.float64, copy=True)
    v = np.eye(a.shape[0], dtype=np.float64)
    _jacobi(a, v)
    w = np.diagonal(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def jacobi_eigh_cplx(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a complex Hermitian matrix, eigenvalues ascending."""
    a = np.array(a, dtype=np.complex128, copy=True)
    v = np.eye(a.shape[0], dtype=np.complex128)
    _jacobi(a, v)
    w = np.diagonal(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def j_peaked(w, omega0: float, gamma: float, omega_z: float):
    """Peaked reservoir spectral density, ~w^3 at the origin, ~w^-5 tail."""
    w = np.asarray(w, dtype=np.float64)
    pref = 32.0 * omega_z * (omega0 * omega0 + gamma * gamma) * gamma**3 / np.pi
    d1 = (w - omega0) ** 2 + gamma * gamma
    d2 = (w + omega0) ** 2 + gamma * gamma
    return pref * w**3 / (d1 * d1 * d2 * d2)


def j_rc(w, omega0: float, gamma: float, omega_z: float):
    """Residual-bath spectral density seen by the reaction coordinate."""
    w = np.asarray(w, dtype=np.float64)
    w2 = w * w
    den = gamma**4 + 2.0 * gamma * gamma * (7.0 * w2 + omega0 * omega0) + (w2 - omega0 * omega0) ** 2
    return (8.0 * omega_z * gamma / np.pi) * w * w2 / den


def coth_half(w, beta: float):
    """coth(beta*w/2), series-stabilized for |beta*w| < 1e-4."""
    w = np.asarray(w, dtype=np.float64)
    x = 0.5 * beta * w
    out = np.empty_like(x)
    small = np.abs(beta * w) < 1e-4
    xs = x[small]
    out[small] = 1.0 / xs + xs / 3.0 - xs**3 / 45.0
    out[~small] = 1.0 / np.tanh(x[~small])
    return out
