# cython: boundscheck=False, wraparound=False, cdivision=True
# cython: language_level=3
"""Compiled compute kernels: cyclic Jacobi eigensolvers and spectral-density
evaluation.  Mirrors the pure-NumPy module ``_kernels_py``."""

import numpy as np

cimport cython
from libc.math cimport fabs, sqrt, tanh, M_PI

DEF OFF_TOL = 1e-13
DEF MAX_SWEEPS = 60


@cython.cdivision(True)
cdef int _jacobi_real(double[:, ::1] a, double[:, ::1] v) nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, i, sweep
    cdef double norm = 0.0, off, skip, apq, r, w, tau, t, c, s
    cdef double xp, xq
    for p in range(n):
        for q in range(n):
            norm += a[p, q] * a[p, q]
    norm = sqrt(norm)
    if norm == 0.0:
        return 0
    skip = 1e-18 * norm
    for sweep in range(MAX_SWEEPS):
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off += a[p, q] * a[p, q]
        if sqrt(off) <= OFF_TOL * norm:
            return 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = fabs(apq)
                if r <= skip:
                    continue
                w = apq / r
                tau = (a[p, p] - a[q, q]) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (tau - sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for i in range(n):
                    xp = a[i, p]
                    xq = a[i, q]
                    a[i, p] = c * xp + s * w * xq
                    a[i, q] = -s * w * xp + c * xq
                for i in range(n):
                    xp = a[p, i]
                    xq = a[q, i]
                    a[p, i] = c * xp + s * w * xq
                    a[q, i] = -s * w * xp + c * xq
                for i in range(n):
                    xp = v[i, p]
                    xq = v[i, q]
                    v[i, p] = c * xp + s * w * xq
                    v[i, q] = -s * w * xp + c * xq
    return 1


@cython.cdivision(True)
cdef int _jacobi_cplx(double complex[:, ::1] a, double complex[:, ::1] v) nogil:
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, i, sweep
    cdef double norm = 0.0, off, skip, r, tau, t, c, s
    cdef double complex apq, w, wc, xp, xq
    for p in range(n):
        for q in range(n):
            norm += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
    norm = sqrt(norm)
    if norm == 0.0:
        return 0
    skip = 1e-18 * norm
    for sweep in range(MAX_SWEEPS):
        off = 0.0
        for p in range(n):
            for q in range(n):
                if p != q:
                    off += a[p, q].real * a[p, q].real + a[p, q].imag * a[p, q].imag
        if sqrt(off) <= OFF_TOL * norm:
            return 0
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = sqrt(apq.real * apq.real + apq.imag * apq.imag)
                if r <= skip:
                    continue
                w = apq / r
                wc = w.conjugate()
                tau = (a[p, p].real - a[q, q].real) / (2.0 * r)
                if tau >= 0.0:
                    t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                else:
                    t = 1.0 / (tau - sqrt(1.0 + tau * tau))
                c = 1.0 / sqrt(1.0 + t * t)
                s = t * c
                for i in range(n):
                    xp = a[i, p]
                    xq = a[i, q]
                    a[i, p] = c * xp + s * wc * xq
                    a[i, q] = -s * w * xp + c * xq
                for i in range(n):
                    xp = a[p, i]
                    xq = a[q, i]
                    a[p, i] = c * xp + s * w * xq
                    a[q, i] = -s * wc * xp + c * xq
                for i in range(n):
                    xp = v[i, p]
                    xq = v[i, q]
                    v[i, p] = c * xp + s * wc * xq
                    v[i, q] = -s * w * xp + c * xq
    return 1


def jacobi_eigh_real(a):
    """Eigendecomposition of a real symmetric matrix, eigenvalues ascending."""
    cdef double[:, ::1] am
    cdef double[:, ::1] vm
    a = np.array(a, dtype=np.float64, order="C", copy=True)
    v = np.eye(a.shape[0], dtype=np.float64)
    am = a
    vm = v
    cdef int bad
    with nogil:
        bad = _jacobi_real(am, vm)
    if bad:
        raise RuntimeError("Jacobi eigensolver did not converge in %d sweeps" % MAX_SWEEPS)
    w = np.diagonal(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def jacobi_eigh_cplx(a):
    """Eigendecomposition of a complex Hermitian matrix, eigenvalues ascending."""
    cdef double complex[:, ::1] am
    cdef double complex[:, ::1] vm
    a = np.array(a, dtype=np.complex128, order="C", copy=True)
    v = np.eye(a.shape[0], dtype=np.complex128)
    am = a
    vm = v
    cdef int bad
    with nogil:
        bad = _jacobi_cplx(am, vm)
    if bad:
        raise RuntimeError("Jacobi eigensolver did not converge in %d sweeps" % MAX_SWEEPS)
    w = np.diagonal(a).real.copy()
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def j_peaked(w, double omega0, double gamma, double omega_z):
    """Peaked reservoir spectral density, ~w^3 at the origin, ~w^-5 tail."""
    cdef double[::1] wv = np.ascontiguousarray(np.atleast_1d(np.asarray(w, dtype=np.float64)))
    out = np.empty(wv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef double pref = 32.0 * omega_z * (omega0 * omega0 + gamma * gamma) * gamma**3 / M_PI
    cdef double d1, d2, x
    cdef Py_ssize_t i
    with nogil:
        for i in range(wv.shape[0]):
            x = wv[i]
            d1 = (x - omega0) * (x - omega0) + gamma * gamma
            d2 = (x + omega0) * (x + omega0) + gamma * gamma
            ov[i] = pref * x * x * x / (d1 * d1 * d2 * d2)
    return out.reshape(np.shape(w))


def j_rc(w, double omega0, double gamma, double omega_z):
    """Residual-bath spectral density seen by the reaction coordinate."""
    cdef double[::1] wv = np.ascontiguousarray(np.atleast_1d(np.asarray(w, dtype=np.float64)))
    out = np.empty(wv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef double pref = 8.0 * omega_z * gamma / M_PI
    cdef double x, x2, den
    cdef Py_ssize_t i
    with nogil:
        for i in range(wv.shape[0]):
            x = wv[i]
            x2 = x * x
            den = gamma**4 + 2.0 * gamma * gamma * (7.0 * x2 + omega0 * omega0) \
                + (x2 - omega0 * omega0) * (x2 - omega0 * omega0)
            ov[i] = pref * x * x2 / den
    return out.reshape(np.shape(w))


def coth_half(w, double beta):
    """coth(beta*w/2), series-stabilized for |beta*w| < 1e-4."""
    cdef double[::1] wv = np.ascontiguousarray(np.atleast_1d(np.asarray(w, dtype=np.float64)))
    out = np.empty(wv.shape[0], dtype=np.float64)
    cdef double[::1] ov = out
    cdef double x
    cdef Py_ssize_t i
    with nogil:
        for i in range(wv.shape[0]):
            x = 0.5 * beta * wv[i]
            if fabs(beta * wv[i]) < 1e-4:
                ov[i] = 1.0 / x + x / 3.0 - x * x * x / 45.0
            else:
                ov[i] = 1.0 / tanh(x)
    return out.reshape(np.shape(w))
