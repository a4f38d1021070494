"""Sweep driver, derived searches and the command-line interface."""

import json
import math

import numpy as np
import pytest

from meanforce import cli
from meanforce.algebra import BETA_INF, negativity
from meanforce.narrow import EffectiveSystem, direct_gibbs_state, zero_width_state
from meanforce.sweep import (
    GAMMA_CAP,
    SweepConfig,
    SweepConfigError,
    find_g_peak,
    find_t_n,
    run_sweep,
    width_slope,
)


def n_zero_width(g, t):
    beta = BETA_INF if t == 0 else 1.0 / t
    return negativity(zero_width_state(EffectiveSystem(0.02, 0.0, g, 1.0, beta)))


# -- configuration ------------------------------------------------------------


def test_config_validation_errors():
    with pytest.raises(SweepConfigError):
        SweepConfig.from_dict({})
    with pytest.raises(SweepConfigError):
        SweepConfig.from_dict({"method": "bogus"})
    with pytest.raises(SweepConfigError):
        SweepConfig.from_dict({"method": "oracle", "gamma": 0.2})
    with pytest.raises(SweepConfigError):
        SweepConfig.from_dict({"method": "weak", "gamma": [0.0, GAMMA_CAP + 1e-3]})
    with pytest.raises(SweepConfigError):
        SweepConfig.from_dict({"method": "weak", "g": [0.2, 0.1]})
    with pytest.raises(SweepConfigError):
        SweepConfig.from_dict({"method": "weak", "g": []})
    with pytest.raises(SweepConfigError):
        SweepConfig.from_dict({"method": "weak", "temperature": [-0.1]})
    with pytest.raises(SweepConfigError):
        SweepConfig.from_dict({"method": "weak", "g": {"start": 0.1}})


def test_grid_parsing_linspace():
    cfg = SweepConfig.from_dict({"method": "zero-width",
                                 "g": {"start": 0.1, "stop": 0.3, "num": 5}})
    assert cfg.g == tuple(np.linspace(0.1, 0.3, 5))


def test_rows_are_lexicographically_ordered_and_thread_invariant():
    raw = {"method": "zero-width", "omega_z": 0.02, "g": [0.1, 0.2, 0.3],
           "temperature": [0.0, 0.006]}
    serial = run_sweep(SweepConfig.from_dict(raw))
    threaded = run_sweep(SweepConfig.from_dict({**raw, "threads": 4}))
    assert [tuple(r[k] for k in ("g", "temperature")) for r in serial.rows] == \
        [(0.1, 0.0), (0.1, 0.006), (0.2, 0.0), (0.2, 0.006), (0.3, 0.0), (0.3, 0.006)]
    a = "\n".join(line for line in serial.csv_lines() if not line.startswith("# timestamp"))
    b = "\n".join(line for line in threaded.csv_lines() if not line.startswith("# timestamp"))
    assert a == b


def test_sweep_deterministic_across_runs(tmp_path):
    raw = {"method": "narrow", "omega_z": 0.02, "g": [0.1, 0.3],
           "gamma": [0.0, 0.05], "temperature": [0.0, 0.006]}
    lines = []
    for _ in range(2):
        res = run_sweep(SweepConfig.from_dict(raw))
        lines.append([l for l in res.csv_lines() if not l.startswith("# timestamp")])
    assert lines[0] == lines[1]


def test_per_row_errors_are_recorded_not_dropped():
    # A level spacing right on the single-mode frequency poisons the kernel
    # for that row only.
    cfg = SweepConfig.from_dict({"method": "weak", "omega_z": [0.02, 1.0],
                                 "g": 0.02, "gamma": 0.0, "temperature": 0.0})
    res = run_sweep(cfg)
    assert len(res.rows) == 2
    ok, bad = res.rows
    assert ok["error"] == "" and ok["negativity"] is not None
    assert "single mode" in bad["error"] and bad["negativity"] is None
    assert res.failed


def test_validity_flagging():
    cfg = SweepConfig.from_dict({"method": "weak", "omega_z": 0.02, "g": 0.02,
                                 "gamma": [0.0, 0.44], "temperature": 0.004})
    res = run_sweep(cfg)
    flags = [r["validity_ok"] for r in res.rows]
    assert flags[0] is True and flags[1] is False
    assert all(r["error"] == "" for r in res.rows)
    assert res.validity_breached


def test_oracle_rows_carry_cutoff():
    cfg = SweepConfig.from_dict({"method": "oracle", "omega_z": 0.02, "g": 0.2,
                                 "temperature": 0.0})
    res = run_sweep(cfg)
    assert res.rows[0]["n_max"] >= 30
    assert res.rows[0]["negativity"] > 0.3


# -- derived searches ---------------------------------------------------------


def test_g_peak_zero_temperature_window():
    res = find_g_peak(lambda g: n_zero_width(g, 0.0), 0.05, 0.6)
    assert res.unimodal
    assert 0.25 <= res.g_peak <= 0.35


def test_g_peak_decreases_at_finite_temperature():
    cold = find_g_peak(lambda g: n_zero_width(g, 0.0), 0.05, 0.6)
    warm = find_g_peak(lambda g: n_zero_width(g, 0.006), 0.05, 0.6)
    assert warm.unimodal
    assert warm.g_peak < cold.g_peak


def test_g_peak_monotone_curve_reports_bracket_end():
    def n_direct(g):
        return negativity(direct_gibbs_state(EffectiveSystem(0.02, 0.0, g, 1.0, BETA_INF)))

    res = find_g_peak(n_direct, 0.05, 0.6)
    assert res.g_peak >= 0.6 - 0.04  # argmax at the bracket end


def test_g_peak_flags_nonunimodal():
    res = find_g_peak(lambda g: math.sin(40.0 * g), 0.0, 1.0)
    assert not res.unimodal
    assert "argmax" in res.note


def test_t_n_bisection_and_closed_form_agree():
    # Weak coupling, spacing far below the peak: the closed-form threshold
    # temperature tracks the full bisection to 2%.
    import warnings

    from meanforce.spectral import ReservoirKernel, density_for_fixed_g
    from meanforce.weak import WeakCouplingContext, vanishing_temperature_small_gap, weak_state

    g, wz, gam = 0.02, 0.02, 0.2
    density, lam = density_for_fixed_g(g, 1.0, gam, wz)

    def n_weak(t):
        kernel = ReservoirKernel(density, 1.0 / t, "quadrature")
        ctx = WeakCouplingContext(wz, 0.0, lam * lam, 1.0 / t, kernel)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            return negativity(weak_state(ctx))

    t_n = find_t_n(n_weak, 1e-3, 0.02, tol=1e-5)
    t_closed = vanishing_temperature_small_gap(lam * lam * wz, wz)
    assert abs(t_n - t_closed) <= 0.02 * t_closed


def test_t_n_requires_a_valid_bracket():
    with pytest.raises(ValueError):
        find_t_n(lambda t: 0.0, 1e-3, 0.02)  # zero coupling: nothing to lose
    with pytest.raises(ValueError):
        find_t_n(lambda t: 0.1, 1e-3, 0.02)  # never vanishes


def test_width_slope_signs_and_stability():
    below = width_slope(EffectiveSystem(0.02, 0.0, 0.15, 1.0, BETA_INF))
    above = width_slope(EffectiveSystem(0.02, 0.0, 0.45, 1.0, BETA_INF))
    assert below.slope > 0 and below.stable
    assert above.slope < 0 and above.stable


# -- command line -------------------------------------------------------------


def _write(tmp_path, name, payload):
    path = tmp_path / name
    path.write_text(json.dumps(payload))
    return str(path)


def test_cli_sweep_roundtrip(tmp_path, capsys):
    cfg = _write(tmp_path, "cfg.json", {
        "method": "zero-width", "omega_z": 0.02, "g": [0.1, 0.2],
        "temperature": [0.0], "out": str(tmp_path / "out.csv")})
    assert cli.main(["sweep", "--config", cfg]) == 0
    text = (tmp_path / "out.csv").read_text()
    assert text.splitlines()[3].startswith("omega_z,")
    assert len(text.splitlines()) == 6


def test_cli_exit_codes(tmp_path):
    bad = _write(tmp_path, "bad.json", {"method": "oracle", "gamma": 0.5})
    assert cli.main(["sweep", "--config", bad]) == 1
    notjson = tmp_path / "broken.json"
    notjson.write_text("{")
    assert cli.main(["sweep", "--config", str(notjson)]) == 1
    rowfail = _write(tmp_path, "rowfail.json", {
        "method": "weak", "omega_z": 1.0, "g": 0.02, "temperature": 0.0,
        "out": str(tmp_path / "rf.csv")})
    assert cli.main(["sweep", "--config", rowfail]) == 2
    strict = _write(tmp_path, "strict.json", {
        "method": "weak", "omega_z": 0.02, "g": 0.02, "gamma": 0.44,
        "temperature": 0.004, "strict": True, "out": str(tmp_path / "s.csv")})
    assert cli.main(["sweep", "--config", strict]) == 3


def test_cli_gpeak(tmp_path, capsys):
    cfg = _write(tmp_path, "gp.json", {"method": "zero-width", "omega_z": 0.02,
                                       "temperature": 0.0, "bracket": [0.05, 0.6]})
    assert cli.main(["gpeak", "--config", cfg]) == 0
    out = capsys.readouterr().out
    value = float(out.splitlines()[0].split("=")[1])
    assert 0.25 <= value <= 0.35


def test_cli_tn_error_path(tmp_path):
    cfg = _write(tmp_path, "tn.json", {"method": "zero-width", "omega_z": 0.02,
                                       "g": 0.0, "t_bracket": [1e-3, 0.02]})
    assert cli.main(["tn", "--config", cfg]) == 2  # zero coupling: no threshold


def test_cli_tn(tmp_path, capsys):
    cfg = _write(tmp_path, "tn2.json", {"method": "zero-width", "omega_z": 0.02,
                                        "g": 0.2, "t_bracket": [1e-3, 0.05]})
    assert cli.main(["tn", "--config", cfg]) == 0
    t_n = float(capsys.readouterr().out.split("=")[1])
    assert 0.005 < t_n < 0.05
    assert n_zero_width(0.2, t_n * 1.05) <= 1e-10
    assert n_zero_width(0.2, t_n * 0.95) > 1e-10


def test_cli_dbeta(tmp_path, capsys):
    cfg = _write(tmp_path, "db.json", {
        "density": {"kind": "peaked", "omega0": 1.0, "gamma": 0.2, "omega_z": 0.02},
        "beta": "inf", "method": "residue",
        "omega": {"start": -0.05, "stop": 0.05, "num": 5}})
    assert cli.main(["dbeta", "--config", cfg]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[3] == "omega,value,derivative"
    assert len(lines) == 9


def test_cli_compare_oracle(tmp_path, capsys):
    cfg = _write(tmp_path, "co.json", {"omega_z": 0.02, "g": [0.2],
                                       "temperature": 0.0})
    assert cli.main(["compare-oracle", "--config", cfg]) == 0
    out = capsys.readouterr().out
    worst = float(out.splitlines()[-1].split(":")[1])
    assert worst <= 0.01


def test_cli_phasemap(tmp_path):
    cfg = _write(tmp_path, "pm.json", {
        "omega_z": 0.02, "g": [0.15, 0.45], "temperature": [0.0],
        "out": str(tmp_path / "pm.csv")})
    assert cli.main(["phasemap", "--config", cfg, "--threads", "2"]) == 0
    lines = (tmp_path / "pm.csv").read_text().splitlines()
    assert lines[1] == "g,temperature,slope,stable,error"
    slopes = [float(l.split(",")[2]) for l in lines[2:]]
    assert slopes[0] > 0 > slopes[1]


def test_shipped_configs_are_valid():
    # Every sweep config in configs/ parses; non-sweep configs stay loadable.
    import pathlib

    root = pathlib.Path(__file__).resolve().parents[1] / "configs"
    sweepable = [p for p in sorted(root.glob("sweep_*.json"))]
    assert len(sweepable) >= 5
    for path in sweepable:
        cfg = SweepConfig.from_dict(json.loads(path.read_text()))
        assert len(list(cfg.points())) > 0
    for name in ("phasemap.json", "gpeak.json", "tn.json", "compare_oracle.json",
                 "dbeta_debug.json"):
        json.loads((root / name).read_text())


def test_shipped_width_scan_config_runs_single_row(tmp_path):
    import pathlib

    root = pathlib.Path(__file__).resolve().parents[1] / "configs"
    raw = json.loads((root / "sweep_weak_width_scan.json").read_text())
    raw["gamma"] = [0.2]
    raw["temperature"] = [0.002]
    raw["out"] = str(tmp_path / "row.csv")
    cfg = SweepConfig.from_dict(raw)
    res = run_sweep(cfg)
    assert not res.failed
    assert res.rows[0]["negativity"] > 0.004
