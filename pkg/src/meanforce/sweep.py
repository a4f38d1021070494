"""Configuration-driven parameter sweeps and derived diagnostics.

All physical inputs are dimensionless ratios with the extracted-mode
frequency as the unit of energy (and k_B = 1): ``omega_z``, ``g``, ``gamma``
and ``temperature`` are all divided by that frequency.  A sweep evaluates one
method on the cartesian product of its axis grids, in fixed lexicographic
axis order (omega_z, epsilon, g, gamma, temperature), so the emitted CSV is
byte-identical across runs and thread counts (the timestamp header line
aside).
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__, engine
from .algebra import BETA_INF, collective_sx, negativity, purity, two_qubit_hamiltonian
from .narrow import EffectiveSystem, direct_gibbs_state, narrow_state_fixed_g, zero_width_state
from .oracle import dicke_hamiltonian, reduced_thermal_state
from .spectral import ReservoirKernel, density_for_fixed_g
from .weak import WeakCouplingContext, negativity_small_gap, small_gap_state, weak_state, \
    weak_state_engine

GAMMA_CAP = 1.0 / math.sqrt(5.0) - 1e-6

METHODS = ("weak", "narrow", "zero-width", "oracle", "direct-gibbs", "closed-form")
_GAMMA_METHODS = ("weak", "narrow", "closed-form")

CSV_COLUMNS = ("omega_z", "epsilon", "g", "gamma", "temperature", "lambda_sq",
               "negativity", "purity", "validity", "validity_ok", "n_max", "method", "error")


class SweepConfigError(ValueError):
    """Invalid sweep configuration."""


def _parse_grid(value, name: str) -> tuple[float, ...]:
    if isinstance(value, dict):
        try:
            pts = np.linspace(float(value["start"]), float(value["stop"]), int(value["num"]))
        except KeyError as exc:
            raise SweepConfigError(f"{name}: linspace form needs start/stop/num") from exc
        value = [float(p) for p in pts]
    if isinstance(value, (int, float)):
        value = [float(value)]
    grid = tuple(float(v) for v in value)
    if not grid:
        raise SweepConfigError(f"{name}: grid is empty")
    if any(not math.isfinite(v) for v in grid):
        raise SweepConfigError(f"{name}: grid has non-finite entries")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise SweepConfigError(f"{name}: grid must be strictly increasing")
    return grid


@dataclass(frozen=True)
class SweepConfig:
    method: str
    omega_z: tuple = (0.02,)
    epsilon: tuple = (0.0,)
    g: tuple = (0.1,)
    gamma: tuple = (0.0,)
    temperature: tuple = (0.0,)
    kernel: str = "auto"
    validity_threshold: float = 0.1
    strict: bool = False
    threads: int = 1
    out: str | None = None
    convergence_tol: float = 1e-8
    n_start: int = 20

    @classmethod
    def from_dict(cls, raw: dict) -> "SweepConfig":
        if "method" not in raw:
            raise SweepConfigError("config needs a 'method' field")
        method = raw["method"]
        if method not in METHODS:
            raise SweepConfigError(f"unknown method {method!r}; choose from {METHODS}")
        kwargs = {"method": method}
        for axis in ("omega_z", "epsilon", "g", "gamma", "temperature"):
            if axis in raw:
                kwargs[axis] = _parse_grid(raw[axis], axis)
        for key in ("kernel", "validity_threshold", "strict", "threads", "out",
                    "convergence_tol", "n_start"):
            if key in raw:
                kwargs[key] = raw[key]
        cfg = cls(**kwargs)
        cfg.validate()
        return cfg

    @classmethod
    def from_json(cls, path: str) -> "SweepConfig":
        with open(path, "r", encoding="utf-8") as fh:
            try:
                raw = json.load(fh)
            except json.JSONDecodeError as exc:
                raise SweepConfigError(f"config is not valid JSON: {exc}") from exc
        return cls.from_dict(raw)

    def validate(self) -> None:
        if self.method not in METHODS:
            raise SweepConfigError(f"unknown method {self.method!r}")
        if self.kernel not in ("auto", "quadrature", "residue"):
            raise SweepConfigError(f"unknown kernel method {self.kernel!r}")
        if any(v < 0 for v in self.temperature):
            raise SweepConfigError("temperatures must be >= 0")
        if any(v <= 0 for v in self.omega_z):
            raise SweepConfigError("omega_z must be positive")
        if any(abs(v) > 1 for v in self.epsilon):
            raise SweepConfigError("epsilon must lie in [-1, 1]")
        if any(v < 0 for v in self.g):
            raise SweepConfigError("g must be >= 0")
        if self.method in _GAMMA_METHODS:
            if any(v < 0 or v > GAMMA_CAP for v in self.gamma):
                raise SweepConfigError(
                    f"gamma grid must lie in [0, {GAMMA_CAP:.7f}] at fixed extracted-mode frequency")
        elif any(v != 0.0 for v in self.gamma):
            raise SweepConfigError(f"method {self.method!r} requires gamma = 0")
        if self.threads < 1:
            raise SweepConfigError("threads must be >= 1")
        if self.n_start < 1:
            raise SweepConfigError("n_start must be >= 1")

    def points(self):
        for wz in self.omega_z:
            for eps in self.epsilon:
                for g in self.g:
                    for gam in self.gamma:
                        for t in self.temperature:
                            yield (wz, eps, g, gam, t)

    def canonical_json(self) -> str:
        d = {
            "method": self.method, "omega_z": list(self.omega_z),
            "epsilon": list(self.epsilon), "g": list(self.g), "gamma": list(self.gamma),
            "temperature": list(self.temperature), "kernel": self.kernel,
            "validity_threshold": self.validity_threshold, "strict": self.strict,
            "convergence_tol": self.convergence_tol, "n_start": self.n_start,
        }
        return json.dumps(d, sort_keys=True)


def _beta_of(temperature: float) -> float:
    return BETA_INF if temperature == 0.0 else 1.0 / temperature


def _weak_kernel(density, beta: float, kernel_method: str) -> ReservoirKernel:
    if kernel_method == "residue":
        try:
            return ReservoirKernel(density, BETA_INF, "residue")
        except ValueError:
            return ReservoirKernel(density, beta, "quadrature")
    if kernel_method == "auto" and math.isinf(beta):
        return ReservoirKernel(density, BETA_INF, "auto")
    return ReservoirKernel(density, beta, "quadrature")


def evaluate_point(cfg: SweepConfig, point) -> dict:
    """One sweep row: negativity, purity and validity for a single grid point."""
    wz, eps, g, gam, t = point
    beta = _beta_of(t)
    row = {"omega_z": wz, "epsilon": eps, "g": g, "gamma": gam, "temperature": t,
           "lambda_sq": None, "negativity": None, "purity": None, "validity": 0.0,
           "validity_ok": True, "n_max": None, "method": cfg.method, "error": ""}
    try:
        if cfg.method == "zero-width":
            es = EffectiveSystem(wz, eps, g, 1.0, beta)
            state = zero_width_state(es)
        elif cfg.method == "direct-gibbs":
            es = EffectiveSystem(wz, eps, g, 1.0, beta)
            state = direct_gibbs_state(es)
        elif cfg.method == "narrow":
            es = EffectiveSystem(wz, eps, g, 1.0, beta)
            res = narrow_state_fixed_g(es, gam, kernel_method=cfg.kernel)
            state = res.rho
            row["validity"] = res.validity
            row["lambda_sq"] = res.lambda_eff_sq
        elif cfg.method == "weak":
            density, lam = density_for_fixed_g(g, 1.0, gam, wz)
            row["lambda_sq"] = lam * lam
            kernel = _weak_kernel(density, beta, cfg.kernel)
            ctx = WeakCouplingContext(wz, eps, lam * lam, beta, kernel)
            row["validity"] = engine.validity_metric(
                two_qubit_hamiltonian(wz, eps), collective_sx(), lam * lam, beta, kernel)
            if math.isinf(beta):
                state = weak_state_engine(ctx).rho
            else:
                # validity is recorded in the row instead of warned about;
                # catch_warnings is not thread-safe under the worker pool
                state = weak_state(ctx, validity_threshold=math.inf)
        elif cfg.method == "closed-form":
            q_reorg = g * g / (1.0 - 4.0 * gam * gam)
            row["lambda_sq"] = q_reorg / wz
            state = small_gap_state(wz, q_reorg, beta)
            row["negativity"] = negativity_small_gap(q_reorg, wz, beta)
            row["validity"] = 2.0 * q_reorg / wz if math.isinf(beta) else 0.5 * beta * q_reorg
            row["purity"] = purity(state)
            row["validity_ok"] = row["validity"] < cfg.validity_threshold
            return row
        elif cfg.method == "oracle":
            td = dicke_hamiltonian(wz, eps, g, 1.0, cfg.n_start)
            state, n_used = reduced_thermal_state(td, beta, cfg.convergence_tol)
            row["n_max"] = n_used
        else:  # pragma: no cover - validated earlier
            raise SweepConfigError(f"unknown method {cfg.method!r}")
        row["negativity"] = negativity(state)
        row["purity"] = purity(state)
        row["validity_ok"] = row["validity"] < cfg.validity_threshold
    except Exception as exc:  # recorded per-row, never silently dropped
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


@dataclass
class SweepResult:
    config: SweepConfig
    rows: list = field(default_factory=list)

    @property
    def failed(self) -> bool:
        return any(r["error"] for r in self.rows)

    @property
    def validity_breached(self) -> bool:
        return any(not r["validity_ok"] for r in self.rows)

    def csv_lines(self, timestamp: bool = True) -> list:
        lines = [f"# meanforce sweep v{__version__}",
                 f"# config: {self.config.canonical_json()}"]
        if timestamp:
            lines.append(f"# timestamp: {datetime.now(timezone.utc).isoformat()}")
        lines.append(",".join(CSV_COLUMNS))
        for row in self.rows:
            cells = []
            for col in CSV_COLUMNS:
                v = row[col]
                if v is None:
                    cells.append("")
                elif isinstance(v, bool):
                    cells.append("true" if v else "false")
                elif isinstance(v, float):
                    cells.append(f"{v:.17g}")
                else:
                    cells.append(str(v))
            lines.append(",".join(cells))
        return lines

    def write_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(self.csv_lines()) + "\n")


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Evaluate every grid point; row order is the cartesian index order
    regardless of how many worker threads execute the points."""
    cfg.validate()
    points = list(cfg.points())
    if cfg.threads > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            rows = list(pool.map(lambda p: evaluate_point(cfg, p), points))
    else:
        rows = [evaluate_point(cfg, p) for p in points]
    return SweepResult(cfg, rows)


# -- derived diagnostics ----------------------------------------------------


@dataclass(frozen=True)
class PeakSearchResult:
    g_peak: float
    value: float
    unimodal: bool
    note: str = ""


def find_g_peak(evaluate, lo: float, hi: float, coarse_points: int = 17,
                tol: float = 1e-4) -> PeakSearchResult:
    """Locate the coupling that maximizes ``evaluate`` on [lo, hi].

    A coarse scan verifies unimodality (rise then fall, up to ``tol_flat``
    noise); the maximum is then refined by golden-section search.  Ties are
    broken toward smaller coupling.  A non-unimodal scan returns the grid
    argmax, flagged.
    """
    grid = np.linspace(lo, hi, coarse_points)
    vals = np.array([evaluate(g) for g in grid])
    i_max = int(np.argmax(vals))  # first maximum: ties toward smaller g
    tol_flat = 1e-12 * max(1.0, float(np.max(np.abs(vals))))
    rising = all(vals[k + 1] >= vals[k] - tol_flat for k in range(i_max))
    falling = all(vals[k + 1] <= vals[k] + tol_flat for k in range(i_max, len(vals) - 1))
    if not (rising and falling):
        return PeakSearchResult(float(grid[i_max]), float(vals[i_max]), False,
                                "coarse scan not unimodal; returning grid argmax")
    a = float(grid[max(0, i_max - 1)])
    b = float(grid[min(len(grid) - 1, i_max + 1)])
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = evaluate(c), evaluate(d)
    while b - a > tol:
        if fc >= fd:  # keep the left interval on ties
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = evaluate(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = evaluate(d)
    g_best = 0.5 * (a + b)
    return PeakSearchResult(g_best, float(evaluate(g_best)), True)


def find_t_n(evaluate, t_lo: float, t_hi: float, tol: float = 1e-5,
             zero: float = 1e-10) -> float:
    """Smallest temperature at which ``evaluate`` (a negativity) reaches zero.

    Bisection on [t_lo, t_hi]; requires entanglement present at t_lo and
    absent at t_hi.
    """
    n_lo, n_hi = evaluate(t_lo), evaluate(t_hi)
    if n_lo <= zero:
        raise ValueError(f"no entanglement at the lower bracket ({n_lo} <= {zero})")
    if n_hi > zero:
        raise ValueError(f"entanglement persists at the upper bracket ({n_hi} > {zero})")
    while t_hi - t_lo > tol:
        mid = 0.5 * (t_lo + t_hi)
        if evaluate(mid) > zero:
            t_lo = mid
        else:
            t_hi = mid
    return t_hi


@dataclass(frozen=True)
class WidthSlopeResult:
    slope: float          # finite difference of negativity against squared width
    slope_half_step: float
    stable: bool          # within 5% under halving the step


def width_slope(es: EffectiveSystem, step_gamma: float = 0.01,
                kernel_method: str = "auto", check_stability: bool = True) -> WidthSlopeResult:
    """Finite-difference d(negativity)/d(gamma^2) at gamma = 0, g and the
    extracted-mode frequency held fixed.

    ``check_stability`` re-evaluates at half the squared-width step and flags
    results that move by more than 5%; disabling it skips that third state
    when only the sign is needed.
    """
    n0 = negativity(zero_width_state(es))

    def at(gam: float) -> float:
        return negativity(narrow_state_fixed_g(es, gam, kernel_method=kernel_method).rho)

    h = step_gamma * step_gamma
    slope = (at(step_gamma) - n0) / h
    if not check_stability:
        return WidthSlopeResult(slope, slope, True)
    slope_half = (at(step_gamma / math.sqrt(2.0)) - n0) / (0.5 * h)
    scale = max(abs(slope), abs(slope_half))
    stable = scale < 1e-9 or abs(slope - slope_half) <= 0.05 * scale
    return WidthSlopeResult(slope, slope_half, stable)


def phase_map(omega_z: float, epsilon: float, g_grid, t_grid, step_gamma: float = 0.01,
              kernel_method: str = "auto", threads: int = 1,
              check_stability: bool = True) -> list:
    """Sign map of the width slope over a (g, temperature) grid."""
    points = [(g, t) for g in g_grid for t in t_grid]

    def one(pt):
        g, t = pt
        es = EffectiveSystem(omega_z, epsilon, g, 1.0, _beta_of(t))
        try:
            res = width_slope(es, step_gamma, kernel_method, check_stability)
            return {"g": g, "temperature": t, "slope": res.slope,
                    "stable": res.stable, "error": ""}
        except Exception as exc:
            return {"g": g, "temperature": t, "slope": None, "stable": False,
                    "error": f"{type(exc).__name__}: {exc}"}

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, points))
    return [one(p) for p in points]
