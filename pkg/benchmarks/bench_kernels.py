"""Benchmark the compiled kernel backend against the pure-NumPy fallback.

Run from the repository root:

    python benchmarks/bench_kernels.py

Covers the two hot paths: the cyclic Jacobi eigensolvers (4x4 Hermitian
matrices dominate parameter sweeps; a few-hundred-dimensional real symmetric
matrix dominates the exact-diagonalization benchmark) and batched
spectral-density evaluation (the inner loop of the adaptive quadrature).
NumPy's LAPACK eigensolver is timed alongside as a reference point.
"""

from __future__ import annotations

import math
import time

import numpy as np

from meanforce import _kernels_py

try:
    from meanforce import _kernels_cy
except ImportError:
    _kernels_cy = None

from meanforce.spectral import ReservoirKernel, SpectralDensity


def _time(fn, repeats: int) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def _fmt(seconds: float) -> str:
    if seconds < 1e-3:
        return f"{seconds * 1e6:8.1f} us"
    if seconds < 1.0:
        return f"{seconds * 1e3:8.2f} ms"
    return f"{seconds:8.3f} s "


def row(label: str, pure_s: float, compiled_s, reference_s=None) -> None:
    comp = _fmt(compiled_s) if compiled_s is not None else "       --"
    ratio = f"{pure_s / compiled_s:6.1f}x" if compiled_s else "     --"
    ref = f"   (numpy.linalg.eigh: {_fmt(reference_s)})" if reference_s is not None else ""
    print(f"{label:38s} pure {_fmt(pure_s)}   compiled {comp}   speedup {ratio}{ref}")


def bench_eigh_small() -> None:
    rng = np.random.default_rng(7)
    mats = []
    for _ in range(200):
        b = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
        mats.append(b + b.conj().T)

    def run(impl):
        def inner():
            for m in mats:
                impl.jacobi_eigh_cplx(m)
        return inner

    pure = _time(run(_kernels_py), 3) / len(mats)
    compiled = _time(run(_kernels_cy), 3) / len(mats) if _kernels_cy else None
    ref = _time(lambda: [np.linalg.eigh(m) for m in mats], 3) / len(mats)
    row("4x4 Hermitian eigensolve", pure, compiled, ref)


def bench_eigh_large(n: int = 300) -> None:
    rng = np.random.default_rng(11)
    b = rng.normal(size=(n, n))
    a = b + b.T

    pure = _time(lambda: _kernels_py.jacobi_eigh_real(a), 1)
    compiled = _time(lambda: _kernels_cy.jacobi_eigh_real(a), 1) if _kernels_cy else None
    ref = _time(lambda: np.linalg.eigh(a), 1)
    row(f"{n}x{n} real symmetric eigensolve", pure, compiled, ref)


def bench_density_eval(n: int = 200_000) -> None:
    w = np.linspace(1e-6, 5.0, n)

    pure = _time(lambda: _kernels_py.j_peaked(w, 1.0, 0.2, 0.02), 5)
    compiled = _time(lambda: _kernels_cy.j_peaked(w, 1.0, 0.2, 0.02), 5) if _kernels_cy else None
    row(f"peaked density on {n//1000}k points", pure, compiled)


def bench_kernel_quadrature() -> None:
    density = SpectralDensity("peaked", 1.0, 0.2, 0.02)

    def run():
        kernel = ReservoirKernel(density, 100.0, "quadrature")
        kernel.value(0.02)
        kernel.value(-0.02)
        kernel.derivative(0.02)

    import meanforce.spectral as spectral
    import meanforce._backend as backend

    saved = (backend.j_peaked, backend.j_rc, backend.coth_half)

    def patched(impl):
        spectral.j_peaked = impl.j_peaked
        spectral.j_rc = impl.j_rc
        spectral.coth_half = impl.coth_half

    patched(_kernels_py)
    pure = _time(run, 3)
    if _kernels_cy:
        patched(_kernels_cy)
        compiled = _time(run, 3)
    else:
        compiled = None
    spectral.j_peaked, spectral.j_rc, spectral.coth_half = saved
    row("reservoir kernel (3 PV quadratures)", pure, compiled)


def main() -> None:
    from meanforce import backend_name

    print(f"active backend: {backend_name()}"
          + ("" if _kernels_cy else "  [compiled extension unavailable]"))
    bench_eigh_small()
    bench_eigh_large()
    bench_density_eval()
    bench_kernel_quadrature()


if __name__ == "__main__":
    main()
