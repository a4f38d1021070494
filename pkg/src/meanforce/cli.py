"""Command-line interface.

Subcommands::

    meanforce sweep          --config cfg.json [--out out.csv] [--threads N] [--tol X]
    meanforce gpeak          --config cfg.json [--tol X]
    meanforce tn             --config cfg.json [--tol X]
    meanforce phasemap       --config cfg.json [--out out.csv] [--threads N]
    meanforce dbeta          --config cfg.json [--out out.csv]
    meanforce compare-oracle --config cfg.json [--out out.csv] [--tol X]

Every subcommand reads a single JSON config; ``--out``/``--threads``/``--tol``
override the config.  ``--tol`` is context dependent: the validity threshold
for ``sweep``, the search tolerance for ``gpeak``/``tn``, the oscillator-cutoff
convergence tolerance for ``compare-oracle`` and the relative quadrature
tolerance for ``dbeta``.

Exit codes: 0 success, 1 configuration error, 2 numerical failure,
3 validity-threshold breach in strict mode.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .algebra import BETA_INF, negativity
from .narrow import EffectiveSystem, zero_width_state
from .oracle import dicke_hamiltonian, reduced_thermal_state
from .spectral import ReservoirKernel, SpectralDensity
from .sweep import (
    SweepConfig,
    SweepConfigError,
    _beta_of,
    _parse_grid,
    evaluate_point,
    find_g_peak,
    find_t_n,
    phase_map,
    run_sweep,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_VALIDITY = 3


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SweepConfigError(f"cannot read config {path}: {exc}") from exc


def _emit(lines, out_path):
    text = "\n".join(lines) + "\n"
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _negativity_of_method(method: str, omega_z: float, epsilon: float, kernel: str):
    """(g, temperature) -> negativity evaluator for the peak/threshold searches."""
    def evaluate(g: float, t: float) -> float:
        cfg = SweepConfig(method=method, omega_z=(omega_z,), epsilon=(epsilon,),
                          g=(g,), gamma=(0.0,), temperature=(t,), kernel=kernel)
        row = evaluate_point(cfg, (omega_z, epsilon, g, 0.0, t))
        if row["error"]:
            raise RuntimeError(row["error"])
        return row["negativity"]

    return evaluate


def _cmd_sweep(args) -> int:
    raw = _load_config(args.config)
    if args.tol is not None:
        raw["validity_threshold"] = args.tol
    if args.threads is not None:
        raw["threads"] = args.threads
    cfg = SweepConfig.from_dict(raw)
    result = run_sweep(cfg)
    out = args.out or cfg.out
    if out:
        result.write_csv(out)
    else:
        _emit(result.csv_lines(), None)
    if result.failed:
        print("sweep finished with per-row errors", file=sys.stderr)
        return EXIT_NUMERICAL
    if cfg.strict and result.validity_breached:
        print("validity threshold breached in strict mode", file=sys.stderr)
        return EXIT_VALIDITY
    return EXIT_OK


def _cmd_gpeak(args) -> int:
    raw = _load_config(args.config)
    method = raw.get("method", "zero-width")
    omega_z = float(raw.get("omega_z", 0.02))
    epsilon = float(raw.get("epsilon", 0.0))
    t = float(raw.get("temperature", 0.0))
    lo, hi = raw.get("bracket", [0.05, 0.6])
    coarse = int(raw.get("coarse_points", 17))
    tol = args.tol if args.tol is not None else float(raw.get("tol", 1e-4))
    ev = _negativity_of_method(method, omega_z, epsilon, raw.get("kernel", "auto"))
    res = find_g_peak(lambda g: ev(g, t), float(lo), float(hi), coarse, tol)
    print(f"g_peak = {res.g_peak:.17g}")
    print(f"negativity = {res.value:.17g}")
    print(f"unimodal = {res.unimodal}")
    if res.note:
        print(f"note: {res.note}")
    return EXIT_OK


def _cmd_tn(args) -> int:
    raw = _load_config(args.config)
    method = raw.get("method", "zero-width")
    omega_z = float(raw.get("omega_z", 0.02))
    epsilon = float(raw.get("epsilon", 0.0))
    g = float(raw.get("g", 0.2))
    lo, hi = raw.get("t_bracket", [1e-4, 0.05])
    tol = args.tol if args.tol is not None else float(raw.get("tol", 1e-5))
    ev = _negativity_of_method(method, omega_z, epsilon, raw.get("kernel", "auto"))
    t_n = find_t_n(lambda t: ev(g, t), float(lo), float(hi), tol)
    print(f"t_n = {t_n:.17g}")
    return EXIT_OK


def _cmd_phasemap(args) -> int:
    raw = _load_config(args.config)
    omega_z = float(raw.get("omega_z", 0.02))
    epsilon = float(raw.get("epsilon", 0.0))
    g_grid = _parse_grid(raw.get("g", {"start": 0.05, "stop": 0.5, "num": 20}), "g")
    t_grid = _parse_grid(raw.get("temperature", {"start": 0.0, "stop": 0.012, "num": 20}),
                         "temperature")
    step = float(raw.get("step_gamma", 0.01))
    threads = args.threads if args.threads is not None else int(raw.get("threads", 1))
    rows = phase_map(omega_z, epsilon, g_grid, t_grid, step,
                     raw.get("kernel", "auto"), threads)
    lines = [f"# meanforce phasemap v{__version__}", "g,temperature,slope,stable,error"]
    for r in rows:
        slope = "" if r["slope"] is None else f"{r['slope']:.17g}"
        lines.append(f"{r['g']:.17g},{r['temperature']:.17g},{slope},"
                     f"{'true' if r['stable'] else 'false'},{r['error']}")
    _emit(lines, args.out or raw.get("out"))
    if any(r["error"] for r in rows):
        return EXIT_NUMERICAL
    return EXIT_OK


def _cmd_dbeta(args) -> int:
    raw = _load_config(args.config)
    dens = raw.get("density", {})
    density = SpectralDensity(
        dens.get("kind", "peaked"), float(dens.get("omega0", 1.0)),
        float(dens.get("gamma", 0.2)), float(dens.get("omega_z", 0.02)))
    beta_raw = raw.get("beta", "inf")
    beta = BETA_INF if beta_raw in ("inf", None) else float(beta_raw)
    method = raw.get("method", "auto")
    kernel = ReservoirKernel(density, beta, method)
    if args.tol is not None:
        kernel.rel_tol = args.tol
    grid = _parse_grid(raw.get("omega", {"start": -0.1, "stop": 0.1, "num": 21}), "omega")
    lines = [f"# meanforce dbeta v{__version__}",
             f"# density: {density}", f"# beta: {beta_raw}, method: {method}",
             "omega,value,derivative"]
    for w in grid:
        lines.append(f"{w:.17g},{kernel.value(w):.17g},{kernel.derivative(w):.17g}")
    _emit(lines, args.out or raw.get("out"))
    return EXIT_OK


def _cmd_compare_oracle(args) -> int:
    raw = _load_config(args.config)
    omega_z = float(raw.get("omega_z", 0.02))
    epsilon = float(raw.get("epsilon", 0.0))
    g_grid = _parse_grid(raw.get("g", [0.1, 0.2, 0.3]), "g")
    t_grid = _parse_grid(raw.get("temperature", 0.0), "temperature")
    tol = args.tol if args.tol is not None else float(raw.get("convergence_tol", 1e-8))
    n_start = int(raw.get("n_start", 20))
    lines = [f"# meanforce compare-oracle v{__version__}",
             "g,temperature,negativity_zero_width,negativity_oracle,abs_diff,n_max"]
    worst = 0.0
    for g in g_grid:
        for t in t_grid:
            beta = _beta_of(t)
            es = EffectiveSystem(omega_z, epsilon, g, 1.0, beta)
            n_zw = negativity(zero_width_state(es))
            td = dicke_hamiltonian(omega_z, epsilon, g, 1.0, n_start)
            rho, n_used = reduced_thermal_state(td, beta, tol)
            n_ed = negativity(rho)
            worst = max(worst, abs(n_zw - n_ed))
            lines.append(f"{g:.17g},{t:.17g},{n_zw:.17g},{n_ed:.17g},"
                         f"{abs(n_zw - n_ed):.17g},{n_used}")
    lines.append(f"# worst absolute difference: {worst:.17g}")
    _emit(lines, args.out or raw.get("out"))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="meanforce",
        description="Mean-force Gibbs states and reservoir-mediated entanglement "
                    "of two qubits in a common bosonic bath.")
    parser.add_argument("--version", action="version", version=f"meanforce {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("sweep", _cmd_sweep), ("gpeak", _cmd_gpeak), ("tn", _cmd_tn),
                     ("phasemap", _cmd_phasemap), ("dbeta", _cmd_dbeta),
                     ("compare-oracle", _cmd_compare_oracle)):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON config")
        p.add_argument("--out", default=None, help="output CSV path (default: stdout)")
        p.add_argument("--threads", type=int, default=None)
        p.add_argument("--tol", type=float, default=None)
        p.set_defaults(fn=fn)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except SweepConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, RuntimeError, ArithmeticError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
