"""Command-line front end.

Subcommands: phases, spectrum, evolve, holonomy, floquet, trap,
fit-potential.  Every run is configured by a JSON file (--config) merged
over built-in defaults; --print-config echoes the fully resolved config and
exits, and that echo re-parses to an identical run.  Angles are accepted in
degrees and frequencies in Hz at this boundary and converted exactly once
(berrytrap.units).  All numeric output uses 12 significant digits and rows
are emitted in a fixed order, so a given config reproduces byte-identical
files.

Exit codes: 0 success, 2 config error, 3 solver non-convergence,
4 degeneracy misuse (single-band method applied to a degenerate band or
vice versa).
"""
import argparse
import copy
import csv
import json
import math
import os
import sys

import numpy as np

from . import __version__, units
from ._ioutil import atomic_writer
from .berry import (
    DegeneracyLiftedError,
    DegenerateBandError,
    LoopPath,
    circle_distance,
    closed_form_phases,
    energy_shift_spectrum,
    principal_angle,
    wilson_loop_phase,
    wz_holonomy,
)
from .dynamics import (
    adiabatic_evolve,
    adiabaticity_check,
    circular_set_distance,
    floquet_closed_form,
    floquet_quasienergies,
    quasienergy_prediction,
    snapshot_band,
    zeeman_crossover_study,
)
from .hamiltonian import QuadrupoleLoop, alpha_from_gradient
from .trap import (
    SolverConvergenceError,
    default_sample_point,
    default_trap,
    field_trace,
    fit_diagonal_potential,
    grid_to_csv,
    laplace_solve,
    load_trap,
    measure_diagonal_angle,
    trace_to_csv,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_DEGENERACY = 4

CSV_SCHEMA_VERSION = "0.1.0"


class ConfigError(ValueError):
    """Invalid run configuration; message lists the offending fields."""


class _StaticH:
    """Constant-Hamiltonian adapter for the zero-rotation evolve case."""

    def __init__(self, h):
        self.h = np.asarray(h, dtype=complex)

    def __call__(self, t):
        return self.h

    def batch(self, ts):
        return np.broadcast_to(self.h, (len(ts),) + self.h.shape)


DEFAULT_CONFIG = {
    "physics": {
        "j": 1.5,
        "alpha": 1.0,           # rad/s; exactly one of alpha or (moment_c, v0)
        "moment_c": None,
        "v0": None,             # V/m^2, with moment_c
        "gradient_mode": "single-component",
        "theta_grid_deg": [30.0, 45.0, 60.0, 90.0],
        "rotation_hz": None,    # exactly one of rotation_hz or period_s
        "period_s": 100.0,
        "epsilon_hz": 0.0,
        "zeeman_frame": "corotating",
        "convention": "conjugate",
        "track_m": 1.5,
        "epsilon_sweep_hz": None,
    },
    "numerics": {
        "loop_steps": 4000,
        "evolve_steps": 10000,
        "floquet_steps": 10000,
        "degeneracy_tol": 1e-9,
        "fidelity_floor": 0.9,
        "adiabaticity_threshold": 0.01,
        "solver_tol": 1e-8,
        "solver_max_iters": 100000,
        "floquet_column": False,
    },
    "trap": {
        "config_path": None,    # JSON geometry file; default geometry if null
        "grid_h": 0.0625e-3,
        "samples_per_period": 16,
        "sample_point": None,   # [x, y, z] m; default: 10% of rod radius on x
        "fit_degree": 4,
        "fit_half_span": 0.8e-3,
        "fit_samples": 61,
        "voltages": [500.0, 1000.0],
        "grid_csv_stride": 4,
        "export_grid": False,
    },
    "output": {
        "dir": None,            # None: tables to stdout, files to cwd
    },
}


def _merge(base, override, path=""):
    out = copy.deepcopy(base)
    for key, val in override.items():
        if key not in base:
            raise ConfigError(f"unknown config field {path + key!r}")
        if isinstance(base[key], dict) and isinstance(val, dict):
            out[key] = _merge(base[key], val, path + key + ".")
        else:
            out[key] = val
    return out


def load_config(path=None):
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    if path:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file is not valid JSON: {exc}")
        if not isinstance(user, dict):
            raise ConfigError("config root must be a JSON object")
        cfg = _merge(cfg, user)
    validate_config(cfg)
    return cfg


def validate_config(cfg):
    errors = []
    phys = cfg["physics"]
    num = cfg["numerics"]

    have_alpha = phys["alpha"] is not None
    have_cv = phys["moment_c"] is not None or phys["v0"] is not None
    if have_alpha and have_cv:
        errors.append("physics.alpha and physics.(moment_c, v0) are mutually exclusive")
    if not have_alpha and (phys["moment_c"] is None or phys["v0"] is None):
        errors.append("supply physics.alpha or both physics.moment_c and physics.v0")
    if (phys["rotation_hz"] is None) == (phys["period_s"] is None):
        errors.append("supply exactly one of physics.rotation_hz or physics.period_s")
    if phys["rotation_hz"] is not None and phys["rotation_hz"] < 0:
        errors.append("physics.rotation_hz must be non-negative")
    if phys["period_s"] is not None and phys["period_s"] <= 0:
        errors.append("physics.period_s must be positive")
    if phys["zeeman_frame"] not in ("lab", "corotating"):
        errors.append("physics.zeeman_frame must be 'lab' or 'corotating'")
    if phys["convention"] not in ("conjugate", "standard"):
        errors.append("physics.convention must be 'conjugate' or 'standard'")
    if phys["epsilon_hz"] < 0:
        errors.append("physics.epsilon_hz must be non-negative")
    thetas = phys["theta_grid_deg"]
    if not isinstance(thetas, list) or not thetas:
        errors.append("physics.theta_grid_deg must be a non-empty list of degrees")
    elif not all(-1e-9 <= t <= 180.0 + 1e-9 for t in thetas):
        errors.append("physics.theta_grid_deg entries must lie in [0, 180]")
    for field in ("loop_steps", "evolve_steps", "floquet_steps", "solver_max_iters"):
        if num[field] < 1:
            errors.append(f"numerics.{field} must be >= 1")
    for field in ("degeneracy_tol", "solver_tol", "adiabaticity_threshold"):
        if num[field] <= 0:
            errors.append(f"numerics.{field} must be positive")
    if not 0 <= num["fidelity_floor"] <= 1:
        errors.append("numerics.fidelity_floor must lie in [0, 1]")
    if cfg["trap"]["grid_h"] <= 0:
        errors.append("trap.grid_h must be positive")
    if cfg["trap"]["samples_per_period"] < 8:
        errors.append("trap.samples_per_period must be >= 8")
    if errors:
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(errors))


def resolve_alpha(phys):
    if phys["alpha"] is not None:
        return float(phys["alpha"])
    return alpha_from_gradient(phys["moment_c"], phys["v0"], phys["gradient_mode"])


def resolve_omega(phys):
    if phys["rotation_hz"] is not None:
        return units.hz_to_rad(phys["rotation_hz"])
    return 2.0 * math.pi / phys["period_s"]


def fmt(x):
    return f"{x:.12g}"


def _out_stream(cfg, name):
    out_dir = cfg["output"]["dir"]
    if out_dir is None:
        return None
    return os.path.join(out_dir, name)


def _write_rows(cfg, name, header_fields, rows, schema):
    """Emit a CSV table to <out>/<name> or stdout, with a schema comment."""
    path = _out_stream(cfg, name)
    lines = [f"# schema=berrytrap/{schema} version={CSV_SCHEMA_VERSION}"]
    if path is None:
        print(lines[0])
        writer = csv.writer(sys.stdout)
        writer.writerow(header_fields)
        writer.writerows(rows)
        return None
    with atomic_writer(path) as fh:
        fh.write(lines[0] + "\n")
        writer = csv.writer(fh)
        writer.writerow(header_fields)
        writer.writerows(rows)
    return path


def _write_json(cfg, name, payload):
    path = _out_stream(cfg, name)
    text = json.dumps(payload, indent=2, sort_keys=True)
    if path is None:
        print(text)
        return None
    with atomic_writer(path) as fh:
        fh.write(text + "\n")
    return path


def _numeric_phases(alpha, j, theta, epsilon, frame, n_steps, degeneracy_tol):
    """Per-state loop phases: Wilson loops when split, holonomy eigenphases
    when degenerate.  Returns {m: (phase, method)}."""
    loop = LoopPath.uniform(theta, n_steps)
    out = {}
    if epsilon > 0:
        fam = QuadrupoleLoop(alpha, j=j, epsilon=epsilon, zeeman_frame=frame)
        for m in (1.5, 0.5, -0.5, -1.5):
            band, _, _ = snapshot_band(fam, theta, m)
            out[m] = (wilson_loop_phase(fam, loop, band, degeneracy_tol), "wilson")
        return out
    fam = QuadrupoleLoop(alpha, j=j)
    print(f"# theta={math.degrees(theta):g} deg: doublets degenerate (epsilon=0); "
          "using subspace holonomy eigenphases", file=sys.stderr)
    cf = closed_form_phases(theta)
    for group, pair in (((0, 1), (1.5, -1.5)), ((2, 3), (0.5, -0.5))):
        hol = wz_holonomy(fam, loop, group, degeneracy_tol)
        targets = [principal_angle(cf(m)) for m in pair]
        # pair eigenphases with state labels by closed-form proximity
        d_direct = max(circle_distance(hol.eigenphases[0], targets[0]),
                       circle_distance(hol.eigenphases[1], targets[1]))
        d_swapped = max(circle_distance(hol.eigenphases[0], targets[1]),
                        circle_distance(hol.eigenphases[1], targets[0]))
        order = (0, 1) if d_direct <= d_swapped else (1, 0)
        for m, k in zip(pair, order):
            out[m] = (float(hol.eigenphases[k]), "holonomy")
    return out


def cmd_phases(cfg):
    phys, num = cfg["physics"], cfg["numerics"]
    alpha = resolve_alpha(phys)
    eps = units.hz_to_rad(phys["epsilon_hz"])
    rows = []
    for theta_deg in phys["theta_grid_deg"]:
        theta = units.deg_to_rad(theta_deg)
        cf = closed_form_phases(theta)
        numeric = _numeric_phases(alpha, phys["j"], theta, eps, phys["zeeman_frame"],
                                  num["loop_steps"], num["degeneracy_tol"])
        for m in (1.5, 0.5, -0.5, -1.5):
            phase, method = numeric[m]
            disc = abs(np.exp(1j * phase) - np.exp(1j * cf(m)))
            rows.append([fmt(theta_deg), fmt(m), fmt(cf(m)),
                         fmt(principal_angle(cf(m))), fmt(phase), method, fmt(disc)])
    _write_rows(cfg, "phases.csv",
                ["theta_deg", "m", "gamma_closed", "gamma_closed_mod2pi",
                 "gamma_numeric", "method", "discrepancy"],
                rows, "phases-v1")
    return EXIT_OK


def _require_rotation(omega, command):
    if omega <= 0:
        raise ConfigError(f"{command} needs a positive rotation rate "
                          "(physics.rotation_hz or physics.period_s)")


def cmd_spectrum(cfg):
    phys, num = cfg["physics"], cfg["numerics"]
    alpha = resolve_alpha(phys)
    omega = resolve_omega(phys)
    _require_rotation(omega, "spectrum")
    period = 2.0 * math.pi / omega
    rows = []
    for theta_deg in phys["theta_grid_deg"]:
        theta = units.deg_to_rad(theta_deg)
        energies = energy_shift_spectrum(alpha, theta, period,
                                         convention=phys["convention"])
        split_upper = abs(energies[1.5] - energies[-1.5])
        split_lower = abs(energies[0.5] - energies[-0.5])
        residual = ""
        if num["floquet_column"]:
            quasi = floquet_closed_form(alpha, theta, omega, j=phys["j"])
            pred = quasienergy_prediction(alpha, theta, omega, convention="standard")
            residual = fmt(circular_set_distance(quasi, pred, omega))
        for m in (1.5, 0.5, -0.5, -1.5):
            split = split_upper if abs(m) == 1.5 else split_lower
            rows.append([fmt(theta_deg), fmt(m), fmt(energies[m]),
                         fmt(units.rad_to_hz(energies[m])),
                         fmt(units.rad_to_hz(split)), residual])
    _write_rows(cfg, "spectrum.csv",
                ["theta_deg", "m", "energy_rad_s", "energy_hz",
                 "doublet_splitting_hz", "floquet_residual_rad_s"],
                rows, "spectrum-v1")
    return EXIT_OK


def cmd_evolve(cfg):
    phys, num = cfg["physics"], cfg["numerics"]
    alpha = resolve_alpha(phys)
    omega = resolve_omega(phys)
    theta = units.deg_to_rad(phys["theta_grid_deg"][0])
    eps = units.hz_to_rad(phys["epsilon_hz"])

    if omega == 0.0:
        # no rotation: the state just accumulates dynamical phase; evolve
        # the static snapshot over one second for the record
        fam = QuadrupoleLoop(alpha, j=phys["j"], epsilon=eps,
                             zeeman_frame=phys["zeeman_frame"])
        h0 = fam(theta, 0.0)
        _, psi0, _ = snapshot_band(fam, theta, phys["track_m"])
        res = adiabatic_evolve(_StaticH(h0), psi0, 1.0,
                               n_steps=num["evolve_steps"])
        _write_json(cfg, "evolve.json", {
            "total_phase": res.total_phase,
            "dynamical_phase": res.dynamical_phase,
            "geometric_phase": res.geometric_phase,
            "fidelity_to_initial_eigenstate": res.fidelity_to_initial_eigenstate,
            "adiabatic": res.adiabatic,
            "adiabaticity_ratio": 0.0,
            "adiabaticity_gap_rad_s": None,
            "n_steps": res.n_steps,
        })
        return EXIT_OK

    if phys["epsilon_sweep_hz"] is not None:
        rows = []
        sweep = [units.hz_to_rad(e) for e in phys["epsilon_sweep_hz"]]
        for row in zeeman_crossover_study(alpha, theta, omega, sweep, j=phys["j"],
                                          zeeman_frame=phys["zeeman_frame"]):
            rows.append([fmt(units.rad_to_hz(row.epsilon)), fmt(row.m),
                         fmt(row.geometric_phase), fmt(row.fidelity),
                         fmt(row.dist_to_split_formula),
                         fmt(row.dist_to_degenerate_formula)])
        _write_rows(cfg, "crossover.csv",
                    ["epsilon_hz", "m", "geometric_phase", "fidelity",
                     "dist_to_split_formula", "dist_to_degenerate_formula"],
                    rows, "crossover-v1")
        return EXIT_OK

    report = adiabaticity_check(alpha, theta, omega, epsilon=eps, j=phys["j"],
                                zeeman_frame=phys["zeeman_frame"],
                                threshold=num["adiabaticity_threshold"],
                                degeneracy_tol=num["degeneracy_tol"])
    if not report.passed:
        print(f"# warning: adiabaticity check failed "
              f"(ratio {report.ratio:.6g} >= threshold {report.threshold:g})",
              file=sys.stderr)

    fam = QuadrupoleLoop(alpha, j=phys["j"], epsilon=eps,
                         zeeman_frame=phys["zeeman_frame"])
    _, psi0, _ = snapshot_band(fam, theta, phys["track_m"])
    branch = closed_form_phases(theta)(phys["track_m"]) if eps > 0 else None
    want_trace = cfg["output"]["dir"] is not None
    res = adiabatic_evolve(fam.at(theta, omega), psi0, 2.0 * math.pi / omega,
                           n_steps=num["evolve_steps"],
                           fidelity_floor=num["fidelity_floor"],
                           geometric_branch=branch, return_trace=want_trace)
    record = {
        "total_phase": res.total_phase,
        "dynamical_phase": res.dynamical_phase,
        "geometric_phase": res.geometric_phase,
        "fidelity_to_initial_eigenstate": res.fidelity_to_initial_eigenstate,
        "adiabatic": res.adiabatic,
        "adiabaticity_ratio": report.ratio,
        "adiabaticity_gap_rad_s": report.gap,
        "n_steps": res.n_steps,
    }
    _write_json(cfg, "evolve.json", record)
    if want_trace:
        rows = [[fmt(t), fmt(f)] for t, f in zip(res.times, res.fidelity_trace)]
        _write_rows(cfg, "evolve_trace.csv", ["t", "fidelity"], rows, "evolve-trace-v1")
    return EXIT_OK


def cmd_holonomy(cfg):
    phys, num = cfg["physics"], cfg["numerics"]
    alpha = resolve_alpha(phys)
    fam = QuadrupoleLoop(alpha, j=phys["j"])
    rows = []
    for theta_deg in phys["theta_grid_deg"]:
        theta = units.deg_to_rad(theta_deg)
        loop = LoopPath.uniform(theta, num["loop_steps"])
        for name, group in (("upper", (0, 1)), ("lower", (2, 3))):
            hol = wz_holonomy(fam, loop, group, num["degeneracy_tol"])
            rows.append([fmt(theta_deg), name,
                         fmt(hol.eigenphases[0]), fmt(hol.eigenphases[1])])
    _write_rows(cfg, "holonomy.csv",
                ["theta_deg", "doublet", "eigenphase_1", "eigenphase_2"],
                rows, "holonomy-v1")
    return EXIT_OK


def cmd_floquet(cfg):
    phys, num = cfg["physics"], cfg["numerics"]
    alpha = resolve_alpha(phys)
    omega = resolve_omega(phys)
    _require_rotation(omega, "floquet")
    rows = []
    for theta_deg in phys["theta_grid_deg"]:
        theta = units.deg_to_rad(theta_deg)
        numeric = floquet_quasienergies(alpha, theta, omega,
                                        n_steps=num["floquet_steps"], j=phys["j"])
        closed = floquet_closed_form(alpha, theta, omega, j=phys["j"])
        pred = quasienergy_prediction(alpha, theta, omega, convention="standard")
        d_nc = circular_set_distance(numeric, closed, omega)
        d_cp = circular_set_distance(closed, pred, omega)
        for k in range(len(numeric)):
            rows.append([fmt(theta_deg), fmt(k), fmt(numeric[k]), fmt(closed[k]),
                         fmt(pred[k]), fmt(d_nc), fmt(d_cp)])
    _write_rows(cfg, "floquet.csv",
                ["theta_deg", "index", "quasienergy_numeric", "quasienergy_closed",
                 "quasienergy_eq_shift", "numeric_vs_closed", "closed_vs_shift"],
                rows, "floquet-v1")
    return EXIT_OK


def _load_model(cfg):
    path = cfg["trap"]["config_path"]
    return load_trap(path) if path else default_trap()


def cmd_trap(cfg):
    trap_cfg = cfg["trap"]
    model = _load_model(cfg)
    out_dir = cfg["output"]["dir"] or "."
    written = []
    try:
        point = (np.asarray(trap_cfg["sample_point"], dtype=float)
                 if trap_cfg["sample_point"] is not None
                 else default_sample_point(model))

        tr_a = field_trace(model, point, trap_cfg["samples_per_period"],
                           source="analytic")
        path = os.path.join(out_dir, "trace_analytic.csv")
        trace_to_csv(tr_a, path)
        written.append(path)

        tr_n = field_trace(model, point, trap_cfg["samples_per_period"],
                           source="numeric", h=trap_cfg["grid_h"],
                           tol=cfg["numerics"]["solver_tol"],
                           max_iters=cfg["numerics"]["solver_max_iters"])
        path = os.path.join(out_dir, "trace_numeric.csv")
        trace_to_csv(tr_n, path)
        written.append(path)

        grid = laplace_solve(model, 0.0, trap_cfg["grid_h"],
                             tol=cfg["numerics"]["solver_tol"],
                             max_iters=cfg["numerics"]["solver_max_iters"])
        fit = fit_diagonal_potential(grid, model.diagonal_direction(),
                                     trap_cfg["fit_half_span"],
                                     degree=trap_cfg["fit_degree"],
                                     n_samples=trap_cfg["fit_samples"])
        rows = [[fmt(s), fmt(v), fmt(r)]
                for s, v, r in zip(fit.s, fit.values, fit.residuals)]
        path = os.path.join(out_dir, "diagonal_potential.csv")
        with atomic_writer(path) as fh:
            fh.write(f"# schema=berrytrap/diagonal-v1 version={CSV_SCHEMA_VERSION}\n")
            writer = csv.writer(fh)
            writer.writerow(["s", "V", "residual"])
            writer.writerows(rows)
        written.append(path)

        if trap_cfg["export_grid"]:
            path = os.path.join(out_dir, "potential_grid.csv")
            grid_to_csv(grid, path, stride=trap_cfg["grid_csv_stride"])
            written.append(path)

        angle = measure_diagonal_angle(model, h=trap_cfg["grid_h"],
                                       tol=cfg["numerics"]["solver_tol"],
                                       max_iters=cfg["numerics"]["solver_max_iters"])
        summary = {
            "extracted_theta_deg": units.rad_to_deg(angle),
            "midline_theta_deg": units.rad_to_deg(model.diagonal_angle()),
            "fit_coefficients": [float(c) for c in fit.coefficients],
            "fit_r_squared": fit.r_squared,
            "solver_residual": grid.residual,
            "solver_iterations": grid.iterations,
            "analytic_trace_closure": tr_a.closure_error(),
            "numeric_trace_closure": tr_n.closure_error(),
        }
        path = os.path.join(out_dir, "trap_summary.json")
        with atomic_writer(path) as fh:
            fh.write(json.dumps(summary, indent=2, sort_keys=True) + "\n")
        written.append(path)
    except BaseException:
        for path in written:
            if os.path.exists(path):
                os.unlink(path)
        raise
    for path in written:
        print(path)
    return EXIT_OK


def cmd_fit_potential(cfg):
    trap_cfg = cfg["trap"]
    model = _load_model(cfg)
    out_dir = cfg["output"]["dir"] or "."
    reports = []
    written = []
    try:
        for volts in trap_cfg["voltages"]:
            scaled = default_trap(drive={"amplitude": volts}) \
                if trap_cfg["config_path"] is None else None
            if scaled is None:
                raise ConfigError("fit-potential voltage sweep requires the default "
                                  "geometry (trap.config_path must be null)")
            grid = laplace_solve(scaled, 0.0, trap_cfg["grid_h"],
                                 tol=cfg["numerics"]["solver_tol"],
                                 max_iters=cfg["numerics"]["solver_max_iters"])
            fit = fit_diagonal_potential(grid, scaled.diagonal_direction(),
                                         trap_cfg["fit_half_span"],
                                         degree=trap_cfg["fit_degree"],
                                         n_samples=trap_cfg["fit_samples"])
            reports.append((volts, fit))
            path = os.path.join(out_dir, f"diagonal_{volts:g}V.csv")
            with atomic_writer(path) as fh:
                fh.write(f"# schema=berrytrap/diagonal-v1 version={CSV_SCHEMA_VERSION}\n")
                writer = csv.writer(fh)
                writer.writerow(["s", "V", "residual"])
                writer.writerows([[fmt(s), fmt(v), fmt(r)] for s, v, r in
                                  zip(fit.s, fit.values, fit.residuals)])
            written.append(path)

        payload = {
            "fits": [{
                "voltage": volts,
                "coefficients": [float(c) for c in fit.coefficients],
                "coefficient_stddev": [float(x) for x in
                                       np.sqrt(np.diag(fit.covariance))],
                "r_squared": fit.r_squared,
            } for volts, fit in reports],
        }
        if len(reports) == 2:
            c2a = reports[0][1].coefficients[2]
            c2b = reports[1][1].coefficients[2]
            payload["quadratic_coefficient_ratio"] = float(c2b / c2a)
        path = os.path.join(out_dir, "fit_report.json")
        with atomic_writer(path) as fh:
            fh.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        written.append(path)
    except BaseException:
        for path in written:
            if os.path.exists(path):
                os.unlink(path)
        raise
    for path in written:
        print(path)
    return EXIT_OK


COMMANDS = {
    "phases": cmd_phases,
    "spectrum": cmd_spectrum,
    "evolve": cmd_evolve,
    "holonomy": cmd_holonomy,
    "floquet": cmd_floquet,
    "trap": cmd_trap,
    "fit-potential": cmd_fit_potential,
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="berrytrap",
        description="Geometric phases of a rotating quadrupole interaction, "
                    "and the trap electrostatics that drive it.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", default=None, help="JSON run configuration")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--print-config", action="store_true",
                       help="echo the resolved configuration and exit")
        p.add_argument("--seed", type=int, default=None,
                       help="reserved; all methods are deterministic")
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.out is not None:
            cfg["output"]["dir"] = args.out
        if cfg["output"]["dir"] is not None:
            os.makedirs(cfg["output"]["dir"], exist_ok=True)
        if args.print_config:
            print(json.dumps(cfg, indent=2, sort_keys=True))
            return EXIT_OK
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverConvergenceError as exc:
        print(f"solver did not converge: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (DegenerateBandError, DegeneracyLiftedError) as exc:
        print(f"degeneracy misuse: {exc}", file=sys.stderr)
        return EXIT_DEGENERACY


def entry():
    sys.exit(main())


if __name__ == "__main__":
    entry()
