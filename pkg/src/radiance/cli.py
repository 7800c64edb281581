"""Command-line interface.

Every computation is exposed as a subcommand emitting a machine-readable
table (CSV or JSON) with the fully resolved parameter set in the metadata,
so any run can be reproduced from its own output. All randomness sits
behind --seed; no timestamps enter the data, so identical invocations are
byte-identical.

Exit codes: 0 success, 2 argument errors, 3 numerical-validity failures,
4 I/O failures. RADIANCE_THREADS bounds internal parallelism.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .params import (CM3_PER_S_TO_M3_PER_S, CODATA, KEV_TO_JOULE,
                     PER_CM2_TO_PER_M2, GrwParams, ModelParams,
                     PhysicalConstants, lambda_from_grw,
                     photon_energy_to_wavenumber,
                     wavenumber_to_photon_energy)
from . import characteristic, dynamics, radiation, response

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDITY = 3
EXIT_IO = 4


class ValidityError(RuntimeError):
    """Numerical-validity failure mapped to exit code 3."""


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("RADIANCE_THREADS", "1")))
    except ValueError:
        return 1


# ---------------------------------------------------------------------------
# unit-suffixed quantities

def _parse_suffixed(text: str, suffixes: dict, what: str) -> float:
    s = text.strip()
    for suffix in sorted(suffixes, key=len, reverse=True):
        if s.lower().endswith(suffix.lower()):
            return float(s[:-len(suffix)]) * suffixes[suffix]
    try:
        return float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"cannot parse {what} {text!r}; allowed suffixes: "
            f"{', '.join(suffixes)} (bare numbers are SI)")


def parse_alpha(text: str) -> float:
    return _parse_suffixed(text, {"cm-2": PER_CM2_TO_PER_M2,
                                  "cm^-2": PER_CM2_TO_PER_M2,
                                  "m-2": 1.0, "m^-2": 1.0},
                           "inverse area")


def parse_gamma(text: str) -> float:
    return _parse_suffixed(text, {"cm3s-1": CM3_PER_S_TO_M3_PER_S,
                                  "cm^3s^-1": CM3_PER_S_TO_M3_PER_S,
                                  "m3s-1": 1.0, "m^3s^-1": 1.0},
                           "volume rate")


def parse_energy_j(text: str) -> float:
    return _parse_suffixed(text, {"keV": KEV_TO_JOULE, "J": 1.0}, "energy")


def parse_zeta(text: str) -> complex:
    s = text.strip().lower()
    if s in ("1", "+1"):
        return 1.0 + 0.0j
    if s in ("i", "1i", "j", "1j", "+i"):
        return 1j
    z = complex(s.replace("i", "j"))
    return z


# ---------------------------------------------------------------------------
# config file: flat key=value mirroring long flags

def _read_config(path: str) -> dict:
    values = {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"malformed config line {line!r}")
            key, _, val = line.partition("=")
            values[key.strip().replace("-", "_")] = val.strip()
    return values


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> list[str]:
    # pull --config out, load defaults from it, let explicit flags win
    probe = argparse.ArgumentParser(add_help=False)
    probe.add_argument("--config")
    known, _ = probe.parse_known_args(argv)
    if known.config:
        try:
            cfg = _read_config(known.config)
        except OSError as exc:
            parser.error(f"cannot read config: {exc}")
        parser.set_defaults(**cfg)
    return argv


# ---------------------------------------------------------------------------
# table emission

def emit_table(rows: list[dict], meta: dict, fmt: str, sink: str):
    """Write rows + metadata as CSV (# key=value header) or JSON.

    Floats are serialized with 17 significant digits; the data section is a
    pure function of the resolved parameters, so repeated runs are
    byte-identical.
    """
    if not rows:
        raise ValueError("refusing to emit an empty table")
    columns = list(rows[0].keys())
    if fmt == "csv":
        lines = [f"# {key}={_fmt(val)}" for key, val in sorted(meta.items())]
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_fmt(row[c]) for c in columns))
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        payload = {"meta": {k: meta[k] for k in sorted(meta)},
                   "data": [{c: row[c] for c in columns} for row in rows]}
        text = json.dumps(payload, indent=2, sort_keys=False,
                          default=_fmt) + "\n"
    else:
        raise ValueError(f"unknown format {fmt!r}")
    if sink == "-":
        sys.stdout.write(text)
    else:
        with open(sink, "w") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# parameter resolution shared by the physics subcommands

def _add_particle_args(sp, needs_lambda=False):
    sp.add_argument("--particle", choices=["electron", "proton"],
                    help="bind mass and charge from the built-in constants")
    sp.add_argument("--mass", type=float, help="particle mass (kg)")
    sp.add_argument("--charge", type=float, help="particle charge (C)")
    sp.add_argument("--omega0", type=float, default=0.0,
                    help="oscillator angular frequency (rad/s); 0 = free")
    sp.add_argument("--lambda", dest="lambda_qmupl", type=float,
                    help="collapse strength (m^-2 s^-1)")
    sp.add_argument("--lambda-grw", type=float,
                    help="jump-model collapse rate (s^-1)")
    sp.add_argument("--alpha", type=parse_alpha,
                    help="inverse correlation area (m^-2; suffix cm-2 allowed)")
    sp.add_argument("--gamma-csl", type=parse_gamma,
                    help="diffusion collapse strength (m^3 s^-1; suffix "
                         "cm3s-1 allowed)")
    sp.add_argument("--force-exact", action="store_true",
                    help="proceed even when omega0 exceeds the "
                         "root-expansion validity bound")


def _resolve_lambda(args, parser) -> float:
    direct = args.lambda_qmupl is not None
    grw_style = args.lambda_grw is not None or args.gamma_csl is not None
    if direct and grw_style:
        parser.error("--lambda and --lambda-grw/--gamma-csl are mutually "
                     "exclusive")
    if direct:
        return args.lambda_qmupl
    if grw_style:
        if args.alpha is None:
            parser.error("--lambda-grw/--gamma-csl requires --alpha")
        if args.gamma_csl is not None and args.lambda_grw is None:
            grw = GrwParams.from_gamma(args.gamma_csl, args.alpha)
        else:
            grw = GrwParams(lambda_grw=args.lambda_grw, alpha=args.alpha,
                            gamma_csl=args.gamma_csl)
        return lambda_from_grw(grw)
    return 0.0


def _resolve_params(args, parser) -> ModelParams:
    if args.particle == "electron":
        mass, charge = CODATA.electron_mass, CODATA.elementary_charge
    elif args.particle == "proton":
        mass, charge = CODATA.proton_mass, CODATA.elementary_charge
    else:
        if args.mass is None or args.charge is None:
            parser.error("either --particle or both --mass and --charge "
                         "are required")
        mass, charge = args.mass, args.charge
    lam = _resolve_lambda(args, parser)
    try:
        params = ModelParams(mass=mass, charge=charge, omega0=args.omega0,
                             lambda_qmupl=lam)
    except ValueError as exc:
        parser.error(str(exc))
    if not params.approx_valid and not args.force_exact:
        raise ValidityError(
            f"omega0 = {params.omega0:.6e} exceeds the validity bound "
            f"{params.omega0_bound:.6e}; rerun with --force-exact")
    return params


def _params_meta(params: ModelParams, args) -> dict:
    meta = {
        "tool": "radiance", "version": __version__,
        "mass": params.mass, "charge": params.charge,
        "omega0": params.omega0, "lambda": params.lambda_qmupl,
        "beta": params.beta, "kappa": params.kappa,
        "omega0_bound": params.omega0_bound,
        "format": args.format,
    }
    if getattr(args, "force_exact", False):
        meta["force_exact"] = "true"
    return meta


def _config_lines_from_meta(meta: dict) -> list[str]:
    """Keys of the meta block that reproduce the run via --config."""
    skip = {"tool", "version", "subcommand", "beta", "kappa", "omega0_bound"}
    return [f"{k}={_fmt(v)}" for k, v in sorted(meta.items()) if k not in skip]


# ---------------------------------------------------------------------------
# subcommand handlers

def _cmd_constants(args, parser):
    c = CODATA
    rows = [
        {"name": "hbar", "value": c.hbar, "unit": "J s"},
        {"name": "c", "value": c.c, "unit": "m/s"},
        {"name": "epsilon0", "value": c.epsilon0, "unit": "C^2 N^-1 m^-2"},
        {"name": "electron_mass", "value": c.electron_mass, "unit": "kg"},
        {"name": "proton_mass", "value": c.proton_mass, "unit": "kg"},
        {"name": "elementary_charge", "value": c.elementary_charge,
         "unit": "C"},
    ]
    if args.particle or (args.mass is not None and args.charge is not None):
        params = _resolve_params(args, parser)
        rows.append({"name": "beta", "value": params.beta, "unit": "kg s"})
        rows.append({"name": "omega0_bound", "value": params.omega0_bound,
                     "unit": "rad/s"})
        if params.lambda_qmupl:
            rows.append({"name": "lambda", "value": params.lambda_qmupl,
                         "unit": "m^-2 s^-1"})
    meta = {"tool": "radiance", "version": __version__,
            "subcommand": "constants", "format": args.format}
    emit_table(rows, meta, args.format, args.output)


def _cmd_roots(args, parser):
    params = _resolve_params(args, parser)
    if args.method == "cardan":
        roots = characteristic.cardan_roots(params)
    elif args.method == "approx":
        try:
            roots = characteristic.approx_roots(params)
        except characteristic.ApproximationDomainError as exc:
            raise ValidityError(str(exc))
    else:
        roots = characteristic.companion_roots(params)
    rows = []
    for name, z in (("z1", roots.z1), ("z2", roots.z2), ("z3", roots.z3)):
        h = characteristic.h_of_z(params, z)
        scale = (abs(params.kappa) + abs(params.mass * z * z)
                 + abs(params.beta * z ** 3))
        rows.append({"root": name, "re_per_s": z.real, "im_per_s": z.imag,
                     "residual": abs(h) / scale if scale else 0.0,
                     "method": roots.method})
    meta = _params_meta(params, args)
    meta.update(subcommand="roots", method=args.method)
    emit_table(rows, meta, args.format, args.output)


def _cmd_response(args, parser):
    params = _resolve_params(args, parser)
    policy = response.PolePolicy(include_runaway=args.include_runaway,
                                 include_field_pole=not args.no_field_pole)
    ts = np.linspace(args.tmin, args.tmax, args.tpoints) if args.tpoints > 1 \
        else np.array([args.tmin])
    rows = []
    for t in ts:
        ev = response.evaluate(params, args.kind, float(t), k=args.k,
                               k_prime=args.kprime,
                               signs=tuple(args.signs), policy=policy)
        rows.append({"t_s": float(t), "re_value": ev.value.real,
                     "im_value": ev.value.imag, "kind": args.kind})
    meta = _params_meta(params, args)
    meta.update(subcommand="response", kind=args.kind,
                include_runaway=str(args.include_runaway).lower(),
                no_field_pole=str(args.no_field_pole).lower(),
                tmin=args.tmin, tmax=args.tmax, tpoints=args.tpoints,
                signs=args.signs)
    if args.k is not None:
        meta["k"] = args.k
    if args.kprime is not None:
        meta["kprime"] = args.kprime
    emit_table(rows, meta, args.format, args.output)


def _spectrum_grid(args, parser) -> np.ndarray:
    by_k = args.kmin is not None or args.kmax is not None
    by_e = args.emin is not None or args.emax is not None
    if by_k == by_e:
        parser.error("specify the grid either with --kmin/--kmax or with "
                     "--emin/--emax (keV)")
    if by_e:
        kmin = photon_energy_to_wavenumber(args.emin, "J")
        kmax = photon_energy_to_wavenumber(args.emax, "J")
    else:
        kmin, kmax = args.kmin, args.kmax
    if kmin is None or kmax is None or not 0 < kmin < kmax:
        parser.error("grid bounds must satisfy 0 < min < max")
    return np.logspace(math.log10(kmin), math.log10(kmax), args.points)


def _cmd_spectrum(args, parser):
    params = _resolve_params(args, parser)
    grid = _spectrum_grid(args, parser)
    regime = args.regime.replace("-", "_")
    try:
        points, summary = radiation.spectrum_sweep(
            params, grid, regime, t=args.t,
            time_average=not args.keep_oscillations)
    except ValueError as exc:
        # includes too-sparse grids: an argument problem, exit 2
        parser.error(str(exc))
    rows = []
    for pt in points:
        row = {"k_per_m": pt.k,
               "E_keV": wavenumber_to_photon_energy(pt.k, "keV"),
               "dGamma_dk": pt.rate, "regime": pt.regime}
        if pt.t is not None:
            row["t_s"] = pt.t
        rows.append(row)
    meta = _params_meta(params, args)
    meta.update(subcommand="spectrum", regime=args.regime,
                kmin=float(grid[0]), kmax=float(grid[-1]),
                points=args.points,
                keep_oscillations=str(args.keep_oscillations).lower(),
                summary_tail_exponent=summary.tail_exponent)
    if args.t is not None:
        meta["t"] = args.t
    if summary.resonance_k is not None:
        meta["summary_resonance_k"] = summary.resonance_k
        meta["summary_resonance_peak"] = summary.resonance_peak
    if summary.energy_growth_rate is not None:
        meta["summary_energy_growth_W"] = summary.energy_growth_rate
    for flag in summary.flags:
        meta[f"summary_flag_{flag}"] = "true"
    emit_table(rows, meta, args.format, args.output)


def _cmd_energy(args, parser):
    params = _resolve_params(args, parser)
    if params.omega0 != 0.0:
        parser.error("energy growth applies to the free particle "
                     "(omega0 = 0)")
    rate = radiation.mean_energy_growth(params)
    rows = [{"quantity": "mean_kinetic_energy_growth", "value": rate,
             "unit": "W"}]
    meta = _params_meta(params, args)
    meta.update(subcommand="energy")
    emit_table(rows, meta, args.format, args.output)


def _cmd_limits(args, parser):
    params = _resolve_params(args, parser)
    if params.omega0 <= 0.0:
        parser.error("limits requires a bound particle (--omega0 > 0)")
    wit = radiation.order_of_limits_witness(
        params, k_over_omega0=args.k_over_omega0, decades=args.decades,
        n_sweep=args.sweep_points, t=args.t)
    rows = []
    for w0, rate in zip(wit.omega0_sweep, wit.finite_time_rates):
        rows.append({"omega0_per_s": w0, "finite_time_rate": rate,
                     "free_rate": wit.free_rate,
                     "rate_over_free": rate / wit.free_rate})
    meta = _params_meta(params, args)
    meta.update(subcommand="limits", k=wit.k, t=wit.t,
                k_over_omega0=args.k_over_omega0, decades=args.decades,
                sweep_points=args.sweep_points,
                free_limit_then_large_time=wit.free_rate,
                large_time_then_free_limit=wit.large_time_rate,
                ratio_large_time_to_free=wit.ratio_large_time_to_free,
                transient_decay_time_s=radiation.transient_decay_time(params))
    emit_table(rows, meta, args.format, args.output)


def _sim_params(args) -> ModelParams:
    # simulation units: dimensionless hbar/mass/lambda, documented in README
    unit = PhysicalConstants(hbar=args.sim_hbar, c=1.0, epsilon0=1.0,
                             electron_mass=1.0, elementary_charge=1.0,
                             proton_mass=1.0)
    return ModelParams(mass=args.sim_mass, charge=0.0,
                       omega0=args.sim_omega0,
                       lambda_qmupl=args.sim_lambda, constants=unit)


def _sim_initial_state(args) -> dynamics.WavefunctionGrid:
    if args.psi0 == "gaussian":
        return dynamics.WavefunctionGrid.gaussian(
            args.x_min, args.x_max, args.n_points, center=args.center,
            sigma=args.sigma, momentum=args.momentum, hbar=args.sim_hbar)
    return dynamics.WavefunctionGrid.two_gaussians(
        args.x_min, args.x_max, args.n_points,
        centers=(-args.separation / 2.0, args.separation / 2.0),
        sigma=args.sigma, weights=(args.weight_left, 1.0 - args.weight_left))


def _sim_meta(args, extra: dict) -> dict:
    meta = {"tool": "radiance", "version": __version__,
            "format": args.format, "sim_hbar": args.sim_hbar,
            "sim_mass": args.sim_mass, "sim_lambda": args.sim_lambda,
            "sim_omega0": args.sim_omega0, "x_min": args.x_min,
            "x_max": args.x_max, "n_points": args.n_points,
            "psi0": args.psi0, "sigma": args.sigma,
            "t_final": args.t_final, "dt": args.dt}
    meta.update(extra)
    return meta


def _cmd_simulate(args, parser):
    params = _sim_params(args)
    psi0 = _sim_initial_state(args)
    n_samples = max(1, args.samples)
    times = [args.t_final * (i + 1) / n_samples for i in range(n_samples)]
    try:
        stats = dynamics.ensemble_run(
            params, parse_zeta(args.zeta), psi0, args.n_traj, args.t_final,
            args.seed, dt=args.dt, sample_times=times,
            with_hamiltonian=not args.zero_hamiltonian,
            threads=_threads())
    except ValueError as exc:
        parser.error(str(exc))
    rows = []
    for i, t in enumerate(stats.times):
        rows.append({"t": float(t),
                     "mean_q": float(stats.mean_q[i]),
                     "se_q": float(stats.se_q[i]),
                     "mean_q2": float(stats.mean_q2[i]),
                     "se_q2": float(stats.se_q2[i]),
                     "mean_p2": float(stats.mean_p2[i]),
                     "se_p2": float(stats.se_p2[i])})
    meta = _sim_meta(args, {"subcommand": "simulate", "zeta": args.zeta,
                            "n_traj": args.n_traj, "seed": args.seed,
                            "samples": n_samples,
                            "zero_hamiltonian":
                                str(args.zero_hamiltonian).lower(),
                            "center": args.center,
                            "momentum": args.momentum,
                            "separation": args.separation,
                            "weight_left": args.weight_left})
    emit_table(rows, meta, args.format, args.output)


def _cmd_master(args, parser):
    params = _sim_params(args)
    psi0 = _sim_initial_state(args)
    rho0 = dynamics.DensityMatrixGrid.from_pure(psi0)
    probe = args.coherence_probe if args.coherence_probe is not None \
        else (args.x_max - args.x_min) / 4.0
    if args.model == "qmupl":
        out = dynamics.evolve_master_qmupl(
            rho0, params, args.t_final,
            with_hamiltonian=not args.zero_hamiltonian)
    else:
        if args.lambda_grw is None or args.alpha is None:
            parser.error("--model grw requires --lambda-grw and --alpha")
        grw = GrwParams(lambda_grw=args.lambda_grw, alpha=args.alpha)
        out = dynamics.evolve_master_grw(
            rho0, grw, params, args.t_final,
            with_hamiltonian=not args.zero_hamiltonian)
    idx = int(round((probe - out.x_min) / out.dx))
    idx = min(max(idx, 0), out.n_points - 1)
    i0 = int(np.argmin(np.abs(out.x)))
    coh0 = abs(rho0.rho[i0, idx])
    coh = abs(out.rho[i0, idx])
    rows = [{"t": args.t_final, "trace": out.trace(),
             "hermiticity_defect": out.hermiticity_defect(),
             "mean_q2": out.mean_q2(),
             "mean_p2": out.mean_p2(params.constants.hbar),
             "coherence_probe_x": float(out.x[idx]),
             "coherence_ratio": coh / coh0 if coh0 > 0 else 0.0}]
    meta = _sim_meta(args, {"subcommand": "master", "model": args.model,
                            "zero_hamiltonian":
                                str(args.zero_hamiltonian).lower(),
                            "separation": args.separation,
                            "weight_left": args.weight_left,
                            "center": args.center, "momentum": args.momentum})
    if args.lambda_grw is not None:
        meta["lambda_grw"] = args.lambda_grw
    if args.alpha is not None:
        meta["alpha"] = args.alpha
    emit_table(rows, meta, args.format, args.output)


# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="radiance",
        description="Collapse-model electromagnetics: characteristic "
                    "roots, response kernels, emission spectra, and "
                    "stochastic collapse dynamics.")
    parser.add_argument("--version", action="version",
                        version=f"radiance {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--output", default="-",
                        help="output path ('-' = stdout)")
    common.add_argument("--config",
                        help="key=value file mirroring the long flags; "
                             "explicit flags win")

    sp = sub.add_parser("constants", parents=[common],
                        help="physical constants and derived coefficients")
    _add_particle_args(sp)
    sp.set_defaults(handler=_cmd_constants)

    sp = sub.add_parser("roots", parents=[common],
                        help="characteristic cubic roots")
    _add_particle_args(sp)
    sp.add_argument("--method", choices=["cardan", "approx", "oracle"],
                    default="cardan")
    sp.set_defaults(handler=_cmd_roots)

    sp = sub.add_parser("response", parents=[common],
                        help="response kernels on a time grid")
    _add_particle_args(sp)
    sp.add_argument("--kind", choices=list(response.RESPONSE_KINDS),
                    required=True)
    sp.add_argument("--k", type=float, help="photon wavenumber (m^-1)")
    sp.add_argument("--kprime", type=float,
                    help="second wavenumber (m^-1, Gpm only)")
    sp.add_argument("--signs", choices=["++", "+-", "-+", "--"],
                    default="+-", help="pole signs for Gpm")
    sp.add_argument("--tmin", type=float, required=True)
    sp.add_argument("--tmax", type=float, default=None)
    sp.add_argument("--tpoints", type=int, default=1)
    sp.add_argument("--include-runaway", action="store_true")
    sp.add_argument("--no-field-pole", action="store_true")
    sp.set_defaults(handler=_cmd_response)

    sp = sub.add_parser("spectrum", parents=[common],
                        help="emission spectrum on a wavenumber grid")
    _add_particle_args(sp)
    sp.add_argument("--regime", required=True,
                    choices=["free", "free-beta0", "ho-large-time",
                             "ho-beta0", "ho-finite-time"])
    sp.add_argument("--kmin", type=float)
    sp.add_argument("--kmax", type=float)
    sp.add_argument("--emin", type=parse_energy_j,
                    help="grid start as photon energy (suffix keV or J)")
    sp.add_argument("--emax", type=parse_energy_j,
                    help="grid end as photon energy (suffix keV or J)")
    sp.add_argument("--points", type=int, default=200)
    sp.add_argument("--t", type=float, help="time for ho-finite-time (s)")
    sp.add_argument("--keep-oscillations", action="store_true")
    sp.set_defaults(handler=_cmd_spectrum)

    sp = sub.add_parser("energy", parents=[common],
                        help="mean kinetic-energy growth rate")
    _add_particle_args(sp)
    sp.set_defaults(handler=_cmd_energy)

    sp = sub.add_parser("limits", parents=[common],
                        help="order-of-limits witness (free vs large time)")
    _add_particle_args(sp)
    sp.add_argument("--k-over-omega0", type=float, default=10.0)
    sp.add_argument("--decades", type=float, default=3.0)
    sp.add_argument("--sweep-points", type=int, default=7)
    sp.add_argument("--t", type=float, default=None)
    sp.set_defaults(handler=_cmd_limits)

    sim_common = argparse.ArgumentParser(add_help=False)
    sim_common.add_argument("--sim-hbar", type=float, default=1.0)
    sim_common.add_argument("--sim-mass", type=float, default=1.0)
    sim_common.add_argument("--sim-lambda", type=float, default=1.0)
    sim_common.add_argument("--sim-omega0", type=float, default=0.0)
    sim_common.add_argument("--zero-hamiltonian", action="store_true",
                            help="drop the Hamiltonian entirely (H = 0)")
    sim_common.add_argument("--x-min", type=float, default=-12.0)
    sim_common.add_argument("--x-max", type=float, default=12.0)
    sim_common.add_argument("--n-points", type=int, default=512)
    sim_common.add_argument("--psi0", choices=["gaussian", "double"],
                            default="gaussian")
    sim_common.add_argument("--sigma", type=float, default=1.0)
    sim_common.add_argument("--center", type=float, default=0.0)
    sim_common.add_argument("--momentum", type=float, default=0.0)
    sim_common.add_argument("--separation", type=float, default=4.0)
    sim_common.add_argument("--weight-left", type=float, default=0.5)
    sim_common.add_argument("--t-final", type=float, default=0.2)
    sim_common.add_argument("--dt", type=float, default=1e-3)

    sp = sub.add_parser("simulate", parents=[common, sim_common],
                        help="stochastic trajectory ensemble "
                             "(simulation units)")
    sp.add_argument("--zeta", default="1",
                    help="unit phase of the noise coupling (1, i, or a+bi)")
    sp.add_argument("--n-traj", type=int, default=200)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--samples", type=int, default=4)
    sp.set_defaults(handler=_cmd_simulate)

    sp = sub.add_parser("master", parents=[common, sim_common],
                        help="averaged density-matrix evolution "
                             "(simulation units)")
    sp.add_argument("--model", choices=["qmupl", "grw"], default="qmupl")
    sp.add_argument("--lambda-grw", type=float)
    sp.add_argument("--alpha", type=float)
    sp.add_argument("--coherence-probe", type=float,
                    help="off-diagonal distance |x - y| to report (length "
                         "units of the grid)")
    sp.set_defaults(handler=_cmd_master)
    return parser


def run(argv=None) -> int:
    """Parse argv, execute the subcommand, return the exit code."""
    parser = _build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    _apply_config(parser, argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if getattr(args, "tmax", None) is None and hasattr(args, "tmax"):
        args.tmax = args.tmin
    # config files feed strings through set_defaults; coerce numerics
    for name, caster in (("tmin", float), ("tmax", float), ("tpoints", int),
                         ("kmin", float), ("kmax", float), ("points", int),
                         ("t", float), ("omega0", float), ("mass", float),
                         ("charge", float), ("lambda_qmupl", float),
                         ("k", float), ("kprime", float),
                         ("n_traj", int), ("seed", int), ("samples", int),
                         ("t_final", float), ("dt", float),
                         ("sim_hbar", float), ("sim_mass", float),
                         ("sim_lambda", float), ("sim_omega0", float),
                         ("x_min", float), ("x_max", float),
                         ("n_points", int), ("sigma", float),
                         ("center", float), ("momentum", float),
                         ("separation", float), ("weight_left", float),
                         ("k_over_omega0", float), ("decades", float),
                         ("sweep_points", int), ("lambda_grw", float),
                         ("alpha", float), ("coherence_probe", float)):
        val = getattr(args, name, None)
        if isinstance(val, str):
            try:
                setattr(args, name, caster(val))
            except ValueError:
                parser.error(f"invalid value for --{name.replace('_', '-')}: "
                             f"{val!r}")
    for name in ("force_exact", "include_runaway", "no_field_pole",
                 "keep_oscillations", "zero_hamiltonian"):
        val = getattr(args, name, None)
        if isinstance(val, str):
            setattr(args, name, val.strip().lower() in ("1", "true", "yes"))
    try:
        args.handler(args, parser)
    except ValidityError as exc:
        print(f"radiance: validity error: {exc}", file=sys.stderr)
        return EXIT_VALIDITY
    except OSError as exc:
        print(f"radiance: i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SystemExit as exc:
        return int(exc.code or 0)
    return EXIT_OK


def main():  # console_scripts entry point
    sys.exit(run())


if __name__ == "__main__":
    main()
