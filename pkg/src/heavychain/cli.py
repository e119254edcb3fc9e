"""Command-line front end: JSON configs in, reports and plot data out.

Every run reads one JSON configuration, executes a single subcommand, and
writes its artifacts into an output directory: a report.json with stable
key order plus CSV (or JSON) tables and two-column .dat files ready for
plotting.  All randomness is drawn from the config seed, so identical
configs produce byte-identical outputs.

Exit codes: 0 on success, 2 when the configured coefficients fail the
admissibility test, 1 for malformed configs (the message names the
offending key) or internal errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from heavychain import __version__
from heavychain.discretization import assemble_generator, sample_states
from heavychain.model import (
    ControllerGains,
    PhysicalFeedback,
    PhysicalParams,
    check_admissibility,
    derive_physical_thetas,
    rescale,
)
from heavychain.resolvent_bvp import (
    SMALL_TAU,
    TAU_CAP,
    continuous_resolvent_sweep,
    kernel_decay_study,
    random_smooth_data,
    solve_resolvent_bvp,
)
from heavychain.simulation import (
    decay_fit,
    energies,
    simulate,
    verify_energy_identity,
)
from heavychain.spectral import (
    huang_verdict,
    resolvent_norm_discrete,
    resolvent_sweep,
    spectrum,
)

SUBCOMMANDS = {
    "check": "admissibility report for the configured coefficients",
    "simulate": "time-domain run with energy ledger and decay fit",
    "spectrum": "eigenvalues of the generator matrix",
    "sweep": "resolvent norms along the imaginary axis, both solvers",
    "bvp": "single-frequency continuous resolvent solve",
    "kernel": "frequency-decay study of the variation-of-constants kernel",
}


class ConfigError(ValueError):
    """Malformed configuration; key is the dotted path of the bad field."""

    def __init__(self, key: str, reason: str):
        super().__init__(f"{key}: {reason}")
        self.key = key
        self.reason = reason


# ------------------------------------------------------------- config


@dataclass(frozen=True)
class Config:
    physical: PhysicalParams
    feedback: PhysicalFeedback
    gains: ControllerGains | None
    grid_n: int
    t_final: float
    dt: float | None
    tau_min: float
    tau_max: float
    sweep_points: int
    log_spacing: bool
    seed: int
    bvp_tau: float
    echo: dict

    def model(self):
        return rescale(self.physical, self.feedback)


def _section(raw: dict, name: str, allowed: tuple) -> dict:
    sec = raw.get(name, {})
    if not isinstance(sec, dict):
        raise ConfigError(name, "must be an object")
    for key in sec:
        if key not in allowed:
            raise ConfigError(f"{name}.{key}", "unknown key")
    return sec


def _number(sec: dict, name: str, path: str, *, default=None,
            positive: bool = False, integer: bool = False):
    if name not in sec:
        if default is ...:
            raise ConfigError(f"{path}.{name}", "missing required key")
        return default
    val = sec[name]
    if isinstance(val, bool) or not isinstance(val, (int, float)):
        raise ConfigError(f"{path}.{name}", "must be a number")
    if integer and int(val) != val:
        raise ConfigError(f"{path}.{name}", "must be an integer")
    if positive and not val > 0:
        raise ConfigError(f"{path}.{name}", "must be positive")
    return int(val) if integer else float(val)


def parse_config(raw: dict) -> Config:
    if not isinstance(raw, dict):
        raise ConfigError("config", "top level must be an object")
    allowed_top = ("physical", "gains", "thetas", "grid", "time", "sweep",
                   "seeds", "bvp")
    for key in raw:
        if key not in allowed_top:
            raise ConfigError(key, "unknown key")

    phys = _section(raw, "physical", ("rho", "L", "m_p", "m_c", "g"))
    vals = {}
    for name in ("rho", "L", "m_p", "m_c", "g"):
        vals[name] = _number(phys, name, "physical", default=..., positive=True)
    physical = PhysicalParams(rho=vals["rho"], L=vals["L"], m_p=vals["m_p"],
                              m_c=vals["m_c"], g=vals["g"])

    has_gains = "gains" in raw
    has_thetas = "thetas" in raw
    if has_gains == has_thetas:
        raise ConfigError("gains", "provide exactly one of gains or thetas")
    gains = None
    if has_gains:
        gsec = _section(raw, "gains", ("chi1", "chi2", "chi3"))
        gvals = {k: _number(gsec, k, "gains", default=..., positive=True)
                 for k in ("chi1", "chi2", "chi3")}
        gains = ControllerGains(**gvals)
        feedback = derive_physical_thetas(physical, gains)
    else:
        tsec = _section(raw, "thetas", ("theta1", "theta2", "theta3", "theta4"))
        tvals = {k: _number(tsec, k, "thetas", default=...)
                 for k in ("theta1", "theta2", "theta3", "theta4")}
        feedback = PhysicalFeedback(**tvals)

    grid = _section(raw, "grid", ("N",))
    grid_n = _number(grid, "N", "grid", default=100, positive=True, integer=True)
    if grid_n < 8:
        raise ConfigError("grid.N", "needs at least 8 cells")

    time_sec = _section(raw, "time", ("T", "dt"))
    t_final = _number(time_sec, "T", "time", default=400.0, positive=True)
    dt = _number(time_sec, "dt", "time", default=None, positive=True)

    sweep = _section(raw, "sweep", ("tau_min", "tau_max", "points", "log"))
    tau_min = _number(sweep, "tau_min", "sweep", default=0.1, positive=True)
    tau_max = _number(sweep, "tau_max", "sweep", default=1000.0, positive=True)
    if tau_max <= tau_min:
        raise ConfigError("sweep.tau_max", "must exceed sweep.tau_min")
    points = _number(sweep, "points", "sweep", default=200, positive=True,
                     integer=True)
    if points < 2:
        raise ConfigError("sweep.points", "needs at least 2 points")
    log_spacing = sweep.get("log", True)
    if not isinstance(log_spacing, bool):
        raise ConfigError("sweep.log", "must be a boolean")

    seed = raw.get("seeds", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
        raise ConfigError("seeds", "must be a non-negative integer")

    bvp = _section(raw, "bvp", ("tau",))
    bvp_tau = _number(bvp, "tau", "bvp", default=5.0)
    if abs(bvp_tau) > TAU_CAP:
        raise ConfigError("bvp.tau", f"|tau| must not exceed {TAU_CAP}")

    return Config(physical=physical, feedback=feedback, gains=gains,
                  grid_n=grid_n, t_final=t_final, dt=dt, tau_min=tau_min,
                  tau_max=tau_max, sweep_points=points,
                  log_spacing=log_spacing, seed=seed, bvp_tau=bvp_tau,
                  echo=raw)


def load_config(path) -> Config:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("config", f"cannot read {path}: {exc.strerror}")
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("config", f"invalid JSON: {exc}")
    return parse_config(raw)


# ------------------------------------------------------------ reporting


@dataclass
class RunReport:
    """Everything one run learned, JSON-ready; plot arrays ride along."""

    subcommand: str
    version: str
    config_echo: dict
    admissibility: dict
    verdicts: list
    spectrum: dict | None = None
    sweep: dict | None = None
    energy: dict | None = None
    bvp: dict | None = None
    kernel: dict | None = None
    artifacts: list = field(default_factory=list)
    plots: dict = field(default_factory=dict, repr=False)

    def to_dict(self) -> dict:
        out = {
            "subcommand": self.subcommand,
            "version": self.version,
            "config": self.config_echo,
            "admissibility": self.admissibility,
            "verdicts": self.verdicts,
            "artifacts": sorted(self.artifacts),
        }
        for name in ("spectrum", "sweep", "energy", "bvp", "kernel"):
            val = getattr(self, name)
            if val is not None:
                out[name] = val
        return out


def _jsonify(obj):
    if isinstance(obj, (np.floating, float)):
        val = float(obj)
        if not np.isfinite(val):
            return repr(val)
        return val
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return {"re": _jsonify(obj.real), "im": _jsonify(obj.imag)}
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    return obj


def write_report(report: RunReport, out_dir: Path) -> Path:
    path = out_dir / "report.json"
    payload = _jsonify(report.to_dict())
    path.write_text(
        json.dumps(payload, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
    )
    return path


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _write_table(out_dir: Path, stem: str, columns: list, rows, fmt: str) -> str:
    if fmt == "json":
        name = f"{stem}.json"
        payload = {"columns": columns,
                   "rows": [[_jsonify(v) for v in row] for row in rows]}
        (out_dir / name).write_text(
            json.dumps(payload, sort_keys=True, ensure_ascii=False) + "\n",
            encoding="utf-8",
        )
    else:
        name = f"{stem}.csv"
        lines = [",".join(columns)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        (out_dir / name).write_text("\n".join(lines) + "\n", encoding="utf-8")
    return name


def emit_plotdata(report: RunReport, out_dir: Path) -> list:
    """Write each stored plot as a two-column whitespace .dat file."""
    written = []
    for name in sorted(report.plots):
        arr = np.asarray(report.plots[name], dtype=float)
        fname = f"{name}.dat"
        lines = [f"{_fmt(a)} {_fmt(b)}" for a, b in arr]
        (out_dir / fname).write_text("\n".join(lines) + "\n", encoding="utf-8")
        written.append(fname)
    report.artifacts.extend(written)
    return written


def _admissibility_dict(rep, m) -> dict:
    return {
        "a": rep.a,
        "b": rep.b,
        "parabola_lhs": rep.parabola_lhs,
        "parabola_rhs": rep.parabola_rhs,
        "parabola_margin": rep.parabola_margin,
        "admissible": rep.admissible,
        "violations": list(rep.violations),
        "gamma": rep.gamma,
        "alpha1": rep.alpha1,
        "alpha2": rep.alpha2,
        "chi3_threshold": rep.chi3_threshold,
        "thetas_rescaled": list(m.thetas),
        "length_rescaled": m.length,
        "tension_endpoints": [m.tension0, m.tensionL],
    }


def _verdict(check: str, outcome: str, source: str) -> dict:
    return {"check": check, "outcome": outcome, "source": source}


# ----------------------------------------------------------- subcommands


def _run_check(cfg: Config, report: RunReport, out_dir: Path, fmt: str):
    pass  # the admissibility section and verdict are always populated


def _run_spectrum(cfg: Config, report: RunReport, out_dir: Path, fmt: str):
    sys_h = assemble_generator(cfg.model(), cfg.grid_n)
    rep = spectrum(sys_h)
    lam = np.sort_complex(rep.eigenvalues)
    report.spectrum = {
        "n": cfg.grid_n,
        "abscissa": rep.abscissa,
        "stable": rep.stable,
        "rightmost": [complex(v) for v in rep.rightmost],
        "count": int(len(lam)),
    }
    report.verdicts.append(_verdict(
        "spectral-abscissa-negative",
        "pass" if rep.stable else "fail",
        "heavychain.spectral.spectrum",
    ))
    rows = [(v.real, v.imag) for v in lam]
    report.artifacts.append(
        _write_table(out_dir, "eigenvalues", ["re", "im"], rows, fmt))
    report.plots["eigenvalues"] = np.array(rows) if rows else np.zeros((0, 2))


def _run_simulate(cfg: Config, report: RunReport, out_dir: Path, fmt: str):
    sys_h = assemble_generator(cfg.model(), cfg.grid_n)
    rng = np.random.default_rng(cfg.seed)
    z0 = rng.standard_normal(sys_h.grid.size)
    # an eighth of the CFL-like step keeps the time-stepping error from
    # polluting both the energy identity and the fitted decay rate
    dt = cfg.dt or sys_h.grid.dx / (8.0 * float(np.sqrt(sys_h.model.tension0)))
    steps = max(1, int(round(cfg.t_final / dt)))
    tr = simulate(z0, sys_h, cfg.t_final, dt=dt,
                  store_every=max(1, steps // 2000))
    et = energies(tr, cfg.physical, cfg.gains)
    # the identity check needs every step of a trace and a state smooth
    # enough for the spatial truncation constants to be moderate, so it
    # gets its own short densely-stored segment from a domain-compatible
    # draw; the rough state above stays in charge of the decay fit
    t_ident = min(cfg.t_final, max(2.0, 4.0 * dt))
    z0_ident = sample_states(sys_h, 1, seed=cfg.seed)[0].real
    tr_ident = simulate(z0_ident, sys_h, t_ident, dt=dt, store_every=1)
    ident = verify_energy_identity(energies(tr_ident, cfg.physical, cfg.gains))
    energy = {
        "identity": {
            "residual": ident.residual,
            "bound": ident.bound,
            "constant": ident.constant,
            "satisfied": ident.satisfied,
            "dt": ident.dt,
            "dx": ident.dx,
        },
        "initial_norm": float(et.norm_h[0]),
        "final_norm": float(et.norm_h[-1]),
        "steps_stored": int(len(tr.times)),
    }
    report.verdicts.append(_verdict(
        "energy-identity",
        "pass" if ident.satisfied else "fail",
        "heavychain.simulation.verify_energy_identity",
    ))
    try:
        fit = decay_fit(tr)
        energy["decay"] = {"omega": fit.omega, "prefactor": fit.prefactor,
                           "t_start": fit.t_start, "t_end": fit.t_end}
        report.verdicts.append(_verdict(
            "norm-decay-fit", f"omega={fit.omega:.6g}",
            "heavychain.simulation.decay_fit"))
    except ValueError as exc:
        energy["decay"] = {"skipped": str(exc)}
    report.energy = energy
    cols = ["t", "hbar", "vbar", "total", "dvdt_lhs", "dvdt_rhs", "norm_h"]
    report.artifacts.append(
        _write_table(out_dir, "energy", cols, et.rows(), fmt))
    keep = et.norm_h > 0.0
    report.plots["decay"] = np.column_stack([et.t[keep], et.norm_h[keep]])


def _run_sweep(cfg: Config, report: RunReport, out_dir: Path, fmt: str):
    m = cfg.model()
    sys_h = assemble_generator(m, cfg.grid_n)
    spec = spectrum(sys_h)
    if cfg.log_spacing:
        discrete = resolvent_sweep(sys_h, cfg.tau_min, cfg.tau_max,
                                   cfg.sweep_points)
    else:
        taus = np.linspace(cfg.tau_min, cfg.tau_max, cfg.sweep_points)
        discrete = [resolvent_norm_discrete(sys_h, t) for t in taus]
    rng = np.random.default_rng(cfg.seed)
    data = [random_smooth_data(rng, m.length) for _ in range(2)]
    lo = max(cfg.tau_min, SMALL_TAU)
    n_cont = min(25, cfg.sweep_points)
    if cfg.log_spacing:
        cont_taus = np.geomspace(lo, cfg.tau_max, n_cont)
    else:
        cont_taus = np.linspace(lo, cfg.tau_max, n_cont)
    continuous = continuous_resolvent_sweep(m, cont_taus, data)
    pooled = list(discrete) + list(continuous)
    verdict = huang_verdict(pooled, spec)
    report.sweep = {
        "n": cfg.grid_n,
        "abscissa": spec.abscissa,
        "verdict": verdict.verdict,
        "max_norm": verdict.max_norm,
        "tau_at_max": verdict.tau_at_max,
        "tail_slope": verdict.tail_slope,
        "reasons": list(verdict.reasons),
        "samples_discrete": len(discrete),
        "samples_continuous": len(continuous),
    }
    report.verdicts.append(_verdict(
        "resolvent-sweep-shape", verdict.verdict,
        "heavychain.spectral.huang_verdict"))
    rows = sorted(((s.tau, s.norm, s.source) for s in pooled),
                  key=lambda r: (r[0], r[2]))
    report.artifacts.append(
        _write_table(out_dir, "sweep", ["tau", "norm", "source"], rows, fmt))
    report.plots["sweep"] = np.array([(r[0], r[1]) for r in rows])


def _run_bvp(cfg: Config, report: RunReport, out_dir: Path, fmt: str):
    m = cfg.model()
    length = m.length
    f = lambda x: np.sin(np.pi * np.asarray(x, dtype=float) / length)
    fp = lambda x: (np.pi / length) * np.cos(np.pi * np.asarray(x, dtype=float) / length)
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    sol = solve_resolvent_bvp(f, zero, cfg.bvp_tau, m,
                              f_prime=fp, g_prime=zero)
    report.bvp = {
        "tau": sol.tau,
        "method": sol.method,
        "gain": sol.gain,
        "residual": sol.residual,
        "residual_lines": list(sol.residual_lines),
        "denominator_abs": abs(sol.denominator),
        "solution_norms": {"w_h2": sol.norms[0], "v_h1": sol.norms[1]},
        "data_norms": {"f_h2": sol.data_norms[0], "g_h1": sol.data_norms[1]},
        "datum": "f = sin(pi x / length), g = 0",
    }
    ok = sol.residual <= (1e-6 if sol.method == "pipeline" else 5e-6)
    report.verdicts.append(_verdict(
        "bvp-residual-small", "pass" if ok else "fail",
        "heavychain.resolvent_bvp.solve_resolvent_bvp"))
    srows = [(sol.tau, sol.gain, sol.residual,
              sol.c1.real, sol.c1.imag, sol.c2.real, sol.c2.imag,
              abs(sol.a0), abs(sol.a1))]
    report.artifacts.append(_write_table(
        out_dir, "bvp_summary",
        ["tau", "gain", "residual", "c1_re", "c1_im", "c2_re", "c2_im",
         "a0", "a1"], srows, fmt))
    rows = np.column_stack([sol.w.x, sol.w.y.real, sol.w.y.imag,
                            sol.v.y.real, sol.v.y.imag])
    report.artifacts.append(_write_table(
        out_dir, "bvp_solution", ["x", "w_re", "w_im", "v_re", "v_im"],
        rows, fmt))


def _run_kernel(cfg: Config, report: RunReport, out_dir: Path, fmt: str):
    m = cfg.model()
    lo = max(cfg.tau_min, 10.0)
    hi = cfg.tau_max
    if hi / lo < 99.0:
        raise ConfigError(
            "sweep.tau_max",
            "kernel study needs tau_max >= 99 * max(tau_min, 10)")
    taus = np.geomspace(lo, hi, min(cfg.sweep_points, 13))
    length = m.length
    f = lambda x: np.cos(np.pi * np.asarray(x, dtype=float) / length) + 0.5
    study = kernel_decay_study(taus, f, m.tension, length)
    report.kernel = {
        "slope_sup_kernel": study.slope_i0,
        "slope_sup_kernel_derivative": study.slope_i1,
        "tau_min": float(taus[0]),
        "tau_max": float(taus[-1]),
        "points": int(len(taus)),
    }
    in_band = abs(study.slope_i0 + 2.0) < 0.2 and abs(study.slope_i1 + 1.0) < 0.2
    report.verdicts.append(_verdict(
        "kernel-decay-slopes", "pass" if in_band else "fail",
        "heavychain.resolvent_bvp.kernel_decay_study"))
    rows = np.column_stack([study.taus, study.sup_i0, study.sup_i1])
    report.artifacts.append(_write_table(
        out_dir, "kernel", ["tau", "sup_i0", "sup_i1"], rows, fmt))
    report.plots["kernel_i0"] = np.column_stack([study.taus, study.sup_i0])
    report.plots["kernel_i1"] = np.column_stack([study.taus, study.sup_i1])


_RUNNERS = {
    "check": _run_check,
    "simulate": _run_simulate,
    "spectrum": _run_spectrum,
    "sweep": _run_sweep,
    "bvp": _run_bvp,
    "kernel": _run_kernel,
}


# ------------------------------------------------------------------ entry


def run(subcommand: str, config_path, out_dir, fmt: str = "csv") -> int:
    """Execute one subcommand; returns the process exit code."""
    if subcommand not in _RUNNERS:
        print(f"error: unknown subcommand {subcommand!r}", file=sys.stderr)
        return 1
    try:
        cfg = load_config(config_path)
        if subcommand == "simulate" and cfg.gains is None:
            raise ConfigError(
                "gains",
                "simulate needs chi gains: the physical energy ledger is "
                "defined through them, raw thetas are not enough")
    except ConfigError as exc:
        print(f"config error: {exc.key}: {exc.reason}", file=sys.stderr)
        return 1

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    m = cfg.model()
    adm = check_admissibility(m)
    report = RunReport(
        subcommand=subcommand,
        version=__version__,
        config_echo=cfg.echo,
        admissibility=_admissibility_dict(adm, m),
        verdicts=[_verdict("admissibility",
                           "pass" if adm.admissible else
                           "fail: " + "; ".join(adm.violations),
                           "heavychain.model.check_admissibility")],
    )
    if not adm.admissible:
        report.artifacts.append("report.json")
        write_report(report, out)
        for v in adm.violations:
            print(f"not admissible: {v}", file=sys.stderr)
        return 2

    try:
        _RUNNERS[subcommand](cfg, report, out, fmt)
    except ConfigError as exc:
        print(f"config error: {exc.key}: {exc.reason}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - boundary of the tool
        print(f"error: {exc}", file=sys.stderr)
        return 1
    emit_plotdata(report, out)
    report.artifacts.append("report.json")
    write_report(report, out)
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="heavychain",
        description="analysis runs for the boundary-controlled hanging "
                    "chain: admissibility, simulation, spectra, resolvents",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name, help_text in SUBCOMMANDS.items():
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--config", required=True, help="JSON configuration")
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--format", choices=("csv", "json"), default="csv",
                        help="table format (default csv)")
    args = parser.parse_args(argv)
    return run(args.subcommand, args.config, args.out, args.format)


if __name__ == "__main__":
    sys.exit(main())
