"""Command-line experiment runner.

    conewave <subcommand> [--config FILE] [--out DIR] [--seed N] [flags]

Every run writes `config-echo.json`, `summary.json` and one or more CSV
files into the output directory and prints the summary to stdout. Exit
codes: 0 success, 2 the estimate's pass flag is false, 1 runtime or
configuration error (the error class is named in the JSON).
"""
import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import specfun
from .calculus import propagate
from .config import COMMANDS, GEOMETRY, PARAMS, discretization_schema, validate_config
from .cross_section import (ConeGeometry, build_custom_spectrum, build_dipole_sphere,
                            build_flat_sphere, read_spectrum_file)
from .errors import ConewaveError, ConstraintViolation, DomainError
from .fields import BAND_TOL, RADIAL, ConeField, ConeGrid, project_modes, radial_profiles

EXIT_OK, EXIT_ERROR, EXIT_FAILED = 0, 1, 2
THREADS_ENV = "CONEWAVE_THREADS"


@dataclass
class RunResult:
    summary: dict
    tables: dict = field(default_factory=dict)  # file name -> rows (header first)
    passed: bool = True


# ---------------------------------------------------------------------------
# building blocks


def build_geometry(geo):
    kind = geo.get("cross_section", "flat-sphere")
    n = geo.get("n", 3)
    L = geo.get("lmax", 2)
    if kind == "flat-sphere":
        model = build_flat_sphere(n, L)
    elif kind == "dipole":
        if n != 3:
            raise DomainError("the dipole cross-section is defined for n = 3")
        model = build_dipole_sphere(3, geo.get("dipole_a", 0.5), L)
    elif kind == "custom":
        path = geo.get("spectrum_file", "")
        if not path:
            raise ConstraintViolation("custom cross-section needs spectrum_file")
        model = build_custom_spectrum(n, read_spectrum_file(path))
    else:
        raise ConstraintViolation(f"unknown cross-section {kind!r}")
    return ConeGeometry(model)


def build_grid(cfg, geometry):
    d = cfg.discretization
    R, N, cutoff = d["R_max"], d["N"], d["rho_cutoff"]
    grid = ConeGrid(geometry, R, N)
    if cutoff > 0 and grid.frequency_nodes[:, -1].min() < cutoff:
        need = int(np.ceil(cutoff * R / np.pi)) + 1
        raise ConstraintViolation(f"rho_cutoff = {cutoff} exceeds the grid band limit; "
                                  f"use N >= {need} at R_max = {R}")
    return grid


def worker_count(requested):
    cap = os.environ.get(THREADS_ENV)
    if cap:
        try:
            return max(1, min(int(requested), int(cap)))
        except ValueError:
            raise ConstraintViolation(f"{THREADS_ENV} must be an integer, got {cap!r}") from None
    return max(1, int(requested))


def _ensemble(grid, p, seed):
    from .estimates import random_ensemble
    return random_ensemble(grid, p["ensemble_size"], seed, (p["band_lo"], p["band_hi"]))


def _report_result(report, **extra):
    summary = report.summary()
    summary.update(change=report.change, ensemble_size=report.ensemble_size)
    summary.update({k: v for k, v in report.extra.items()})
    summary.update(extra)
    return RunResult(summary, {f"{report.estimate}.csv": report.rows()}, report.passed)


def _radial_field(grid, profile):
    """Field whose every evaluable point value is profile(r), or ground-mode data."""
    if grid.model.supports_evaluation:
        return project_modes(grid, lambda r, y: profile(r) + 0 * y[..., 0])
    coeffs = np.zeros((grid.num_modes, grid.N), complex)
    coeffs[0] = profile(grid.radial_nodes[0])
    return ConeField(grid, RADIAL, coeffs)


# ---------------------------------------------------------------------------
# subcommands


def run_modes(cfg, ctx):
    model = build_geometry(cfg.geometry).cross_section
    rows = [["nu", "lambda", "degeneracy"]]
    rows += [[nu, lam, d] for nu, lam, d in model.modes]
    return RunResult({"command": "modes", "modes": model.num_modes, "distinct": len(rows) - 1,
                      "nu0": model.nu0, "pass": True}, {"modes.csv": rows})


def run_specfun_table(cfg, ctx):
    p = cfg.params
    nus = np.linspace(p["nu_min"], p["nu_max"], p["nu_count"])
    xs = np.linspace(p["x_min"], p["x_max"], p["x_count"])
    rows = [["nu", "x", "J", "Y", "I", "K"]]
    for nu in nus:
        for x in xs:
            rows.append([float(nu), float(x), specfun.bessel_j(nu, x), specfun.bessel_y(nu, x),
                         specfun.bessel_i(nu, x), specfun.bessel_k(nu, x)])
    return RunResult({"command": "specfun-table", "rows": len(rows) - 1, "pass": True},
                     {"specfun-table.csv": rows})


def _initial_data(grid, p):
    w = p["width"]
    model = grid.model
    if p["preset"] == "gaussian":
        return _radial_field(grid, lambda r: np.exp(-r * r / (2 * w * w)))
    if p["preset"] == "bump":
        from .estimates.ensembles import smooth_bump
        return _radial_field(grid, lambda r: smooth_bump((r - 2 * w) / w))
    j = p["mode"]
    if j >= model.num_modes:
        raise DomainError(f"mode {j} out of range: the model keeps {model.num_modes} modes")
    coeffs = np.zeros((grid.num_modes, grid.N), complex)
    nu, h = model.nu[j], (grid.n - 2) / 2
    r = grid.radial_nodes[j]
    coeffs[j] = r ** (nu - h) * np.exp(-r * r / (2 * w * w))
    return ConeField(grid, RADIAL, coeffs)


def run_propagate(cfg, ctx):
    p = cfg.params
    geometry = build_geometry(cfg.geometry)
    grid = build_grid(cfg, geometry)
    u0 = _initial_data(grid, p)
    radii = grid.R_max / 2 * np.arange(1, p["radii"] + 1) / p["radii"]
    model = grid.model
    Phi = model.evaluate(model.quadrature()[0]) if model.supports_evaluation else None
    rows = [["t", "r", "y_index", "re_u", "im_u"]]
    norms, tails = [], []
    for t in p["times"]:
        u = propagate(u0, t, conjugate_time=p["conjugate_time"])
        norms.append(u.norm())
        tails.append(u.band_tail_fraction())
        A = radial_profiles(u, radii)
        vals = (A.T @ Phi.T) if Phi is not None else A.T  # (radii, y nodes or modes)
        for i, r in enumerate(radii):
            for q in range(vals.shape[1]):
                rows.append([float(t), float(r), q, float(vals[i, q].real), float(vals[i, q].imag)])
    drift = max(abs(x / norms[0] - 1) for x in norms) if norms and norms[0] else 0.0
    summary = {"command": "propagate", "preset": p["preset"], "times": list(p["times"]),
               "l2_norms": norms, "l2_drift": drift,
               "y_index": "quadrature node" if Phi is not None else "mode",
               **_band_report(tails), "pass": True}
    return RunResult(summary, {"propagate.csv": rows})


def run_dispersive(cfg, ctx):
    from .estimates import dispersive_decay_scan
    p, d = cfg.params, cfg.discretization
    geometry = build_geometry(cfg.geometry)
    times = np.geomspace(p["t_min"], p["t_max"], p["t_count"])
    fit = dispersive_decay_scan(geometry, times, p["width"], d["R_max"], d["N"], p["points"])
    rows = [["t", "sup", "sup_refined"]]
    rows += [[t, a, b] for t, a, b in zip(fit.times, fit.sup, fit.sup_refined)]
    nu0, n = fit.nu0, geometry.n
    passed = fit.refinement_change <= 0.05
    summary = {"estimate": "dispersive", "params": {"width": p["width"], "R_max": d["R_max"],
                                                    "N": d["N"], "n": n},
               "sup": max(fit.sup), "sup_doubled": max(fit.sup_refined), "pass": passed,
               "slope": fit.slope, "intercept": fit.intercept, "residual": fit.residual,
               "expected_slope": -min(nu0 + 1, n / 2), "nu0": nu0,
               "change": fit.refinement_change}
    return RunResult(summary, {"dispersive-scan.csv": rows}, passed)


def run_strichartz(cfg, ctx):
    from .estimates import strichartz_quotient
    p = cfg.params
    grid = build_grid(cfg, build_geometry(cfg.geometry))
    report = strichartz_quotient(grid, p["q"], p["r"], p["T"], _ensemble(grid, p, cfg.seed),
                                 workers=ctx["workers"])
    return _report_result(report)


def run_local_smoothing(cfg, ctx):
    from .estimates import local_smoothing_quotient
    p = cfg.params
    grid = build_grid(cfg, build_geometry(cfg.geometry))
    report = local_smoothing_quotient(grid, p["alpha"], p["s"], p["beta"], p["weight"], p["T"],
                                      _ensemble(grid, p, cfg.seed))
    return _report_result(report)


def run_g_check(cfg, ctx):
    from .estimates import g_function_sweep, within_witness
    from .estimates.gfunction import witness
    p = cfg.params
    n = cfg.geometry["n"]
    samples = g_function_sweep(p["nu"], p["R"], p["M"], n=n)
    rows = [["nu", "R", "M", "branch", "G", "bound", "ratio", "witness", "within"]]
    for s in samples:
        rows.append([s.nu, s.R, s.M, s.branch, s.value, s.bound, s.ratio, witness(s.branch),
                     int(within_witness(s))])
    passed = all(within_witness(s) for s in samples)
    worst = max((s.ratio / witness(s.branch) for s in samples), default=0.0)
    summary = {"estimate": "g-function", "params": {"samples": len(samples), "n": n},
               "sup": worst, "sup_doubled": worst, "pass": passed,
               "within": sum(within_witness(s) for s in samples)}
    return RunResult(summary, {"g-check.csv": rows}, passed)


def run_hardy(cfg, ctx):
    from .estimates import hardy_quotient
    p = cfg.params
    grid = build_grid(cfg, build_geometry(cfg.geometry))
    report = hardy_quotient(grid, p["s"], p["p"], _ensemble(grid, p, cfg.seed))
    return _report_result(report)


def run_resolvent(cfg, ctx):
    from .estimates import resolvent_sup_scan, sigma_grid
    p = cfg.params
    grid = build_grid(cfg, build_geometry(cfg.geometry))
    sigmas = sigma_grid(p["moduli"], np.pi * np.array(p["angles"]))
    report = resolvent_sup_scan(grid, sigmas)
    extra = {k: (v if not isinstance(v, complex) else [v.real, v.imag])
             for k, v in report.extra.items()}
    result = _report_result(report)
    result.summary.update(extra)
    return result


def run_sobolev(cfg, ctx):
    from .estimates import uniform_sobolev_probe
    from .estimates.report import stable
    p = cfg.params
    geometry = build_geometry(cfg.geometry)
    grid = build_grid(cfg, geometry)
    fine = ConeGrid(geometry, grid.R_max, 2 * grid.N)
    probes = []
    for g in (grid, fine):
        fields = [_radial_field(g, lambda r, w=w: np.exp(-r * r / (2 * w * w)))
                  for w in p["widths"]]
        probes.append(uniform_sobolev_probe(fields, p["sigmas"]))
    rows = [["sigma_re", "sigma_im", "width", "quotient", "quotient_doubled"]]
    for i, s in enumerate(probes[0].sigmas):
        for j, w in enumerate(p["widths"]):
            rows.append([s.real, s.imag, w, probes[0].quotients[i, j], probes[1].quotients[i, j]])
    sup, sup2 = probes[0].sup, probes[1].sup
    passed = stable(sup, sup2)
    change = sup2 / sup - 1 if sup else 0.0
    summary = {"estimate": "sobolev", "params": {"N": grid.N, "R_max": grid.R_max, "n": grid.n},
               "sup": sup, "sup_doubled": sup2, "pass": passed, "change": change}
    return RunResult(summary, {"sobolev.csv": rows}, passed)


def _nls_run(cfg, default_count=11):
    from .nls import h1_norm, nls_evolve
    p = cfg.params
    grid = build_grid(cfg, build_geometry(cfg.geometry))
    w = p["width"]
    u0 = _radial_field(grid, lambda r: np.exp(-r * r / (2 * w * w)))
    u0 = u0 * (p["h1_norm"] / h1_norm(u0))
    snaps = p["snapshots"] or list(np.linspace(0, p["T"], default_count))
    return nls_evolve(u0, p["T"], p["dt"], p["gamma"], snaps)


def _band_report(tails):
    """Band-limit gate: a field is resolved when its top 5% of frequencies
    carry under 1e-8 of the L^2 mass. Reported, never fatal."""
    worst = max(tails, default=0.0)
    return {"band_tail_fraction": worst, "resolved": bool(worst < BAND_TOL)}


def _scattering_rows(traj):
    from .nls import scattering_profile
    prof = scattering_profile(traj)
    rows = [["t", "v_h1", "increment"]]
    rows += [[r.t, r.v_h1, r.increment] for r in prof]
    return rows


def _tail_increment(traj):
    """||v(t_last) - v(t_mid)||_{H^1} with t_mid the snapshot nearest half the span."""
    from .nls import h1_norm
    if len(traj) < 2:
        return 0.0, 0.0
    t_end = traj[-1].t
    mid = min(traj[:-1], key=lambda s: abs(s.t - t_end / 2))
    v_end = propagate(traj[-1].field, -traj[-1].t)
    v_mid = propagate(mid.field, -mid.t)
    return mid.t, h1_norm(v_end - v_mid)


def run_nls(cfg, ctx):
    from .nls import _nls_grid, h1_norm
    traj = _nls_run(cfg)
    rows = [["t", "mass", "energy", "h1", "linf"]]
    for s in traj:
        c = s.conserved
        ph = _nls_grid(s.field)
        rows.append([s.t, c.mass, c.energy, h1_norm(s.field),
                     float(np.abs(ph.values(s.field)).max())])
    m0, e0 = rows[1][1], rows[1][2]
    mass_drift = max(abs(r[1] / m0 - 1) for r in rows[1:])
    energy_drift = max(abs(r[2] / e0 - 1) for r in rows[1:]) if e0 else 0.0
    passed = mass_drift <= 1e-10 and energy_drift <= 1e-6
    summary = {"command": "nls", "gamma": cfg.params["gamma"], "dt": cfg.params["dt"],
               "T": cfg.params["T"], "mass_drift": mass_drift, "energy_drift": energy_drift,
               **_band_report([s.field.band_tail_fraction() for s in traj]), "pass": passed}
    return RunResult(summary, {"trajectory.csv": rows, "scattering.csv": _scattering_rows(traj)},
                     passed)


SCATTER_TOL = 1e-4
SMALL_DATA = 0.1


def run_scatter(cfg, ctx):
    """Scattering profile; pass/fail only for small defocusing data."""
    p = cfg.params
    traj = _nls_run(cfg, default_count=6)
    rows = _scattering_rows(traj)
    t_mid, tail = _tail_increment(traj)
    increments = [r[2] for r in rows[2:]]
    judged = p["gamma"] > 0 and p["h1_norm"] <= SMALL_DATA
    passed = tail < SCATTER_TOL if judged else None
    summary = {"command": "scatter", "gamma": p["gamma"], "h1_norm": p["h1_norm"],
               "tail_from": t_mid, "tail_to": traj[-1].t, "tail_increment": tail,
               "max_increment": max(increments, default=0.0), "diagnostic_only": not judged,
               **_band_report([s.field.band_tail_fraction() for s in traj]), "pass": passed}
    return RunResult(summary, {"scattering.csv": rows}, passed)


RUNNERS = {
    "modes": run_modes,
    "specfun-table": run_specfun_table,
    "propagate": run_propagate,
    "dispersive-scan": run_dispersive,
    "strichartz": run_strichartz,
    "local-smoothing": run_local_smoothing,
    "g-check": run_g_check,
    "hardy": run_hardy,
    "resolvent": run_resolvent,
    "sobolev": run_sobolev,
    "nls": run_nls,
    "scatter": run_scatter,
}
assert set(RUNNERS) == set(COMMANDS)


# ---------------------------------------------------------------------------
# output


def _clean(value):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to None."""
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else None
    if isinstance(value, complex):
        return [value.real, value.imag]
    return value


def summary_json(summary):
    return json.dumps(_clean(summary), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _cell(v):
    if isinstance(v, (np.floating, float)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return v


def write_csv(path, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def run_experiment(cfg, out="stdout"):
    """Run one validated config, write its files, and return the exit code.

    The summary also goes to `out` (standard output by default, None for silence).
    """
    os.makedirs(cfg.output, exist_ok=True)
    with open(os.path.join(cfg.output, "config-echo.json"), "w", encoding="utf-8",
              newline="\n") as fh:
        fh.write(cfg.echo_json())
    try:
        ctx = {"workers": worker_count(cfg.workers)}
        result = RUNNERS[cfg.command](cfg, ctx)
        # passed is None for diagnostic-only runs, which always exit 0
        code = EXIT_FAILED if result.passed is False else EXIT_OK
        summary = dict(result.summary)
        summary.setdefault("command", cfg.command)
        summary["pass"] = None if result.passed is None else bool(result.passed)
        for name, rows in result.tables.items():
            write_csv(os.path.join(cfg.output, name), rows)
    except (ConewaveError, ValueError, ArithmeticError, RuntimeError, np.linalg.LinAlgError) as exc:
        code = EXIT_ERROR
        summary = {"command": cfg.command, "error": type(exc).__name__, "message": str(exc),
                   "pass": False}
    text = summary_json(summary)
    with open(os.path.join(cfg.output, "summary.json"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    if out == "stdout":
        out = sys.stdout
    if out is not None:
        out.write(text)
    return code


# ---------------------------------------------------------------------------
# argument parsing


def _flag(key):
    return "--" + key.replace("_", "-")


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors, which would read as a failed estimate
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser():
    parser = _Parser(prog="conewave", allow_abbrev=False,
                                     description="Dispersive estimates on metric cones.")
    sub = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        sp = sub.add_parser(command, allow_abbrev=False)
        sp.add_argument("--config", help="line-oriented config file")
        sp.add_argument("--out", dest="top__output", metavar="DIR", help="output directory")
        for key in ("seed", "workers"):
            sp.add_argument(_flag(key), dest=f"top__{key}", metavar=key.upper())
        for section, schema in (("geometry", GEOMETRY),
                                ("discretization", discretization_schema(command)),
                                (command, PARAMS[command])):
            group = sp.add_argument_group(section)
            for key, spec in schema.items():
                kw = {"dest": f"{section}__{key}", "metavar": "VALUE"}
                if spec.default is False:
                    kw.update(nargs="?", const="true")
                group.add_argument(_flag(key), **kw)
    return parser


def config_from_args(args):
    text = ""
    if args.config:
        with open(args.config, "rb") as fh:
            raw = fh.read()
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            from .errors import ParseError
            raise ParseError(f"{args.config}: not valid UTF-8 ({exc})") from None
    overrides = {}
    for dest, value in vars(args).items():
        if "__" not in dest or value is None:
            continue
        section, key = dest.split("__", 1)
        overrides[("" if section == "top" else section, key)] = value
    cfg_command = _file_command(text)
    if cfg_command is not None and cfg_command != args.command:
        raise ConstraintViolation(f"config file is for {cfg_command!r}, "
                                  f"not {args.command!r}")
    overrides[("", "command")] = args.command
    return validate_config(text, overrides)


def _file_command(text):
    from .config import parse_config_text
    entry = parse_config_text(text)[""].get("command")
    return entry[0] if entry else None


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
    except (ConewaveError, OSError) as exc:
        errors = getattr(exc, "errors", [exc])
        sys.stdout.write(summary_json({
            "command": args.command, "error": type(exc).__name__, "message": str(exc),
            "errors": [f"{type(e).__name__}: {e}" for e in errors], "pass": False}))
        return EXIT_ERROR
    return run_experiment(cfg)


if __name__ == "__main__":
    sys.exit(main())
