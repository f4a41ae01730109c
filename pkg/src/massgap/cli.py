"""Command-line front end: ``massgap <subcommand> [options]``.

Every subcommand prints its report on stdout.  When an output directory is
given (``--output-dir``, the ``MASSGAP_OUT`` environment variable or an
``output_dir`` key in the ``--config`` file) the report is also written
there.  Exit status is 0 when every check passes, 1 on a failed check or a
domain error (reported as a JSON error record) and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import __version__
from .dyson_schwinger import (
    ClosureConditions,
    g1_residual,
    g2_greens_residual,
    g3_at_origin,
    g3_convolution,
    g4_convolution,
    ghost_check,
    two_point_check,
    ym_two_point_check,
    RestFrameKernels,
)
from .elliptic import complete_K, jacobi
from .fluctuations import LameOperator, stability_eigencheck, zero_mode
from .lattice import (
    LatticeGrid,
    TimeSeries,
    analyse_spectrum,
    evolve,
    phase_velocity,
)
from .report import Check, ResidualReport, dumps, read_csv, write_csv
from .solutions import (
    FourMomentum,
    ScalarWaveSolution,
    classical_residual_scalar,
    classical_residual_su2,
    su2_solve,
    su2_system_residual,
)
from .spectral import (
    greens_jump_check,
    kernel_period,
    mass_n,
    propagator_momentum,
    propagator_tail_bound,
    spectrum,
)

__all__ = ["RunConfig", "build_parser", "parse_and_dispatch", "main"]


@dataclass
class RunConfig:
    """Merged physics parameters and numeric controls for one run."""

    lam: float | None = None
    g: float | None = None
    N: int | None = None
    mu: float = 1.0
    alpha: float = 1.0
    nmax: int = 20
    tol: float = 1e-8
    output_dir: str | None = None
    format: str = "json"

    def validate(self, mode: str = "scalar"):
        if not self.tol > 0:
            raise ValueError(f"tolerance must be positive, got {self.tol!r}")
        if mode == "ym":
            if self.lam is not None or self.g is None or self.N is None:
                raise ValueError("ym mode needs --g and --N and no --lambda")
        elif mode == "scalar":
            if self.lam is None or self.g is not None:
                raise ValueError("scalar mode needs --lambda and no --g")


# keys accepted in a --config file, mapped to argparse destinations
_CONFIG_KEYS = {
    "lambda": "lam", "lam": "lam", "g": "g", "N": "N", "mu": "mu", "alpha": "alpha",
    "nmax": "nmax", "tol": "tol", "output_dir": "output_dir", "format": "format",
    "p0": "p0", "p1": "p1", "p2": "p2", "p3": "p3", "psq": "psq", "k": "k", "epsilon": "epsilon",
    "periods": "periods", "sites": "sites", "dt_frac": "dt_frac", "dim": "dim",
    "steps_per_period": "steps_per_period", "scheme": "scheme", "msq": "msq",
}

_DEFAULTS = {"mu": 1.0, "alpha": 1.0, "nmax": 20, "tol": 1e-8, "format": "json", "k": 0,
             "epsilon": 1e-10, "periods": 10.0, "sites": 512, "dt_frac": 0.25, "dim": 0,
             "steps_per_period": 4096, "scheme": "verlet", "msq": 0.0,
             "p1": 0.0, "p2": 0.0, "p3": 0.0}


def read_config(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for n, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{n}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in _CONFIG_KEYS:
            raise ValueError(f"{path}:{n}: unknown key {key!r}")
        out[_CONFIG_KEYS[key]] = value
    return out


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key=value file; command-line flags take precedence")
    p.add_argument("--output-dir", dest="output_dir", help="directory for the report file")
    p.add_argument("--selftest", action="store_true",
                   help="run the built-in checks for this subcommand and exit")
    p.add_argument("--tol", type=float, help="pass threshold for residual checks")


def _add_scalar(p):
    p.add_argument("--lambda", dest="lam", type=float, help="quartic coupling")
    p.add_argument("--mu", type=float, help="integration scale")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="massgap", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("elliptic", help="sn, cn, dn and K at one point")
    p.add_argument("--u", type=float, default=0.5)
    p.add_argument("--m", type=float, default=-1.0)
    _add_common(p)

    p = sub.add_parser("verify-classical", help="FD residual of the scalar wave")
    _add_scalar(p)
    p.add_argument("--msq", type=float)
    _add_common(p)

    p = sub.add_parser("su2-solve", help="amplitudes of the diagonal SU(2) wave")
    p.add_argument("--alpha", type=float)
    p.add_argument("--g", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--p0", type=float, help="energy; default puts p on the mass shell")
    for c in ("p1", "p2", "p3"):
        p.add_argument(f"--{c}", type=float, help="spatial momentum component")
    _add_common(p)

    p = sub.add_parser("stability", help="sn*cn eigenvalue and zero-mode residual")
    _add_scalar(p)
    _add_common(p)

    p = sub.add_parser("spectrum", help="masses and weights as CSV")
    _add_scalar(p)
    p.add_argument("--nmax", type=int)
    _add_common(p)

    p = sub.add_parser("propagator", help="momentum-space two-point function")
    _add_scalar(p)
    p.add_argument("--p2", dest="psq", type=float, help="four-momentum squared (required)")
    p.add_argument("--epsilon", type=float)
    p.add_argument("--nmax", type=int)
    _add_common(p)

    p = sub.add_parser("ds-check", help="Dyson-Schwinger residuals")
    p.add_argument("mode", choices=("scalar", "ym"))
    _add_scalar(p)
    p.add_argument("--g", type=float)
    p.add_argument("--N", type=int)
    p.add_argument("--k", type=int)
    _add_common(p)

    p = sub.add_parser("lattice-run", help="classical evolution from exact data")
    _add_scalar(p)
    p.add_argument("--dim", type=int, choices=(0, 1))
    p.add_argument("--periods", type=float)
    p.add_argument("--sites", type=int, help="sites per wavelength (dim=1)")
    p.add_argument("--dt-frac", dest="dt_frac", type=float,
                   help="dt / spacing (dim=1)")
    p.add_argument("--steps-per-period", dest="steps_per_period", type=int,
                   help="time steps per period (dim=0)")
    p.add_argument("--p1", type=float, help="wave momentum for dim=1 (default 1)")
    p.add_argument("--scheme", choices=("verlet", "yoshida4"))
    p.add_argument("--series", help="write the probe time series to this CSV file")
    _add_common(p)

    p = sub.add_parser("measure-gap", help="fundamental frequency of a time series")
    p.add_argument("--input", help="CSV with columns t, phi (required)")
    p.add_argument("--min-periods", dest="min_periods", type=float, default=32.0)
    _add_common(p)
    return parser


def _merge(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset options from the config file, then from built-in defaults."""
    conf = read_config(args.config) if getattr(args, "config", None) else {}
    types = {"lam": float, "g": float, "N": int, "mu": float, "alpha": float, "nmax": int,
             "tol": float, "k": int, "epsilon": float, "periods": float, "sites": int,
             "dt_frac": float, "dim": int, "steps_per_period": int, "msq": float,
             "p0": float, "p1": float, "p2": float, "p3": float, "psq": float}
    for key, value in conf.items():
        if getattr(args, key, None) is None:
            setattr(args, key, types.get(key, str)(value))
    for key, value in _DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)
    if getattr(args, "output_dir", None) is None:
        args.output_dir = os.environ.get("MASSGAP_OUT") or None
    if getattr(args, "tol", None) is None:
        args.tol = _DEFAULTS["tol"]
    return args


def _config(args) -> RunConfig:
    kw = {f.name: getattr(args, f.name) for f in fields(RunConfig) if hasattr(args, f.name)}
    return RunConfig(**{k: v for k, v in kw.items() if v is not None})


def _provenance(grid=None) -> dict:
    return {"version": __version__, "seed": None, "grid": grid}


# ---------------------------------------------------------------- commands


def cmd_elliptic(args) -> ResidualReport:
    e = jacobi(args.u, args.m)
    rep = ResidualReport("elliptic", {"u": args.u, "m": args.m, "sn": e.sn, "cn": e.cn,
                                      "dn": e.dn, "K": complete_K(args.m)},
                         provenance=_provenance())
    rep.add(Check.below("pythagorean", e.sn**2 + e.cn**2 - 1.0, 1e-12))
    rep.add(Check.below("dn_identity", e.dn**2 + args.m * e.sn**2 - 1.0, 1e-12))
    return rep


def cmd_verify_classical(args) -> ResidualReport:
    _config(args).validate("scalar")
    sol = ScalarWaveSolution(args.lam, args.mu, args.msq)
    zeta = np.linspace(0.0, 4.0 * sol.quarter_period, 100)
    rep = ResidualReport("verify-classical",
                         {"lambda": args.lam, "mu": args.mu, "msq": args.msq,
                          "amplitude": sol.amplitude, "kappa": sol.kappa, "p2": sol.p2},
                         provenance=_provenance({"points": 100, "periods": 1}))
    rep.add(Check.below("residual", classical_residual_scalar(sol, zeta), args.tol))
    rep.add(Check.below("residual_richardson",
                        classical_residual_scalar(sol, zeta, richardson=True), args.tol))
    return rep


def cmd_su2_solve(args) -> ResidualReport:
    g = 1.0 if args.g is None else args.g
    if args.p0 is None:
        p = FourMomentum.on_shell(args.mu**2 * g, args.p1, args.p2, args.p3)
    else:
        p = FourMomentum(args.p0, args.p1, args.p2, args.p3)
    ans = su2_solve(p, args.alpha, g, args.mu)
    rep = ResidualReport("su2-solve",
                         {"alpha": args.alpha, "g": g, "mu": args.mu, "p0": p.p0, "p1": p.p1,
                          "p2": p.p2, "p3": p.p3, "X": ans.X, "Y": ans.Y, "Z": ans.Z},
                         provenance=_provenance({"points": 100, "periods": 1}))
    rep.add(Check.below("system_residual", su2_system_residual(ans), 1e-12))
    rep.add(Check.below("field_residual", classical_residual_su2(ans), args.tol))
    return rep


def cmd_stability(args) -> ResidualReport:
    _config(args).validate("scalar")
    res = stability_eigencheck(args.lam, args.mu, tol=args.tol)
    sol = ScalarWaveSolution(args.lam, args.mu)
    zeta = np.linspace(0.0, 8.0 * sol.quarter_period, 200)
    zm = LameOperator(sol).residual(lambda z: zero_mode(sol, z), zeta)
    rep = ResidualReport("stability", {"lambda": args.lam, "mu": args.mu,
                                       "eigenvalue": res.eigenvalue, "expected": res.expected},
                         provenance=_provenance({"points": 200, "periods": 2}))
    rep.add(Check.below("eigen_residual", res.residual, args.tol))
    rep.add(Check("on_shell", 1.0 if res.onshell else 0.0, 1.0, res.onshell))
    rep.add(Check.below("zero_mode_residual", zm, args.tol))
    return rep


def cmd_spectrum(args):
    _config(args).validate("scalar")
    spec = spectrum(args.lam, args.mu, args.nmax)
    rows = [(line.n, line.mass, line.weight) for line in spec.lines]
    rep = ResidualReport("spectrum", {"lambda": args.lam, "mu": args.mu, "nmax": args.nmax,
                                      "tail_bound": spec.tail_bound},
                         provenance=_provenance())
    rep.add(Check.below("weight_sum", spec.total_weight - 1.0, 1e-6))
    return rep, ("spectrum.csv", ["n", "mass", "weight"], rows)


def cmd_propagator(args) -> ResidualReport:
    _config(args).validate("scalar")
    val = propagator_momentum(args.psq, args.lam, args.mu, args.epsilon, args.nmax)
    tail = propagator_tail_bound(args.psq, args.lam, args.mu, args.nmax, args.epsilon)
    return ResidualReport("propagator", {"p2": args.psq, "lambda": args.lam, "mu": args.mu,
                                         "epsilon": args.epsilon, "nmax": args.nmax,
                                         "re": val.real, "im": val.imag, "tail_bound": tail},
                          provenance=_provenance())


def cmd_ds_check(args) -> ResidualReport:
    cfg = _config(args)
    cfg.validate(args.mode)
    if args.mode == "ym":
        rep = ym_two_point_check(args.N, args.g, args.mu, k=args.k, tol=args.tol)
        gh = ghost_check(4.0)
        rep.add(Check.below("ghost_jump_error", gh.free_jump - 1.0, args.tol))
        rep.add(Check.below("ghost_value_error", gh.propagator + 0.25, 1e-15))
        lam = args.N * args.g**2
    else:
        rep = two_point_check(args.lam, args.mu, k=args.k, tol=args.tol)
        lam = args.lam
    rep.command = "ds-check"
    rep.params["mode"] = args.mode
    rep.add(Check.below("g1_closure", g1_residual(ScalarWaveSolution(lam, args.mu),
                                                  ClosureConditions()), args.tol))
    origin = g3_at_origin(lam, args.mu)
    rep.add(Check.below("g3_origin", origin.numeric, 1e-12))
    kern = RestFrameKernels(lam, args.mu, args.k)
    T = kern.period
    rep.add(Check.below("g3_coincident", g3_convolution(T, T, 0.3 * T, kern), 1e-10))
    rep.add(Check.below("g4_coincident", g4_convolution(T, T, T, 0.3 * T, kern), 1e-10))
    rep.provenance = _provenance({"quadrature": "gauss-legendre 16x8 per period"})
    return rep


def cmd_lattice_run(args):
    _config(args).validate("scalar")
    if args.dim == 0:
        grid = LatticeGrid.rest_frame(args.lam, args.mu, args.steps_per_period)
        T = grid.dt * args.steps_per_period
        gdesc = {"dim": 0, "steps_per_period": args.steps_per_period}
    else:
        p1 = args.p1 or 1.0
        grid = LatticeGrid.travelling(p1, args.sites, 1, args.dt_frac)
        p0 = math.sqrt(args.mu**2 * math.sqrt(args.lam / 2.0) + p1 * p1)
        T = 4.0 * complete_K(-1.0) / p0
        gdesc = {"dim": 1, "sites": args.sites, "dt_frac": args.dt_frac, "p1": p1}
    res = evolve(grid, args.lam, args.mu, args.periods * T, scheme=args.scheme)
    params = {"lambda": args.lam, "mu": args.mu, "periods": args.periods,
              "scheme": args.scheme, "dt": res.dt, "steps": res.steps,
              "energy_drift": res.energy_drift, "final_error": res.final_error}
    rep = ResidualReport("lattice-run", params, provenance=_provenance(gdesc))
    rep.add(Check.below("energy_drift", res.energy_drift, 1e-6))
    if args.dim == 1:
        v = phase_velocity(res, grid)
        rep.params["phase_velocity"] = v
        rep.add(Check.below("phase_velocity", v * grid.p1 / p0 - 1.0, 1e-3))
    elif args.periods >= 32:
        m0 = mass_n(0, args.lam, args.mu)
        an = analyse_spectrum(res.series)
        rep.params["fundamental"] = an.fundamental
        rep.add(Check.below("mass_gap", an.fundamental / m0 - 1.0, 1e-3))
        rep.add(Check.below("even_harmonics", an.even_power_ratio, 1e-6))
    table = None
    if args.series:
        rows = zip(res.series.times.tolist(), res.series.values.tolist())
        table = (args.series, ["t", "phi"], list(rows))
    return rep, table


def cmd_measure_gap(args) -> ResidualReport:
    header, rows = read_csv(args.input)
    data = np.array(rows, dtype=float)
    t, phi = data[:, 0], data[:, 1]
    dt = float(t[1] - t[0])
    if not np.allclose(np.diff(t), dt, rtol=1e-9, atol=1e-12):
        raise ValueError("time column must be uniformly spaced")
    an = analyse_spectrum(TimeSeries(phi, dt, float(t[0])), args.min_periods)
    return ResidualReport("measure-gap", {"input": str(args.input), "omega": an.fundamental,
                                          "periods": an.periods,
                                          "third_ratio": an.third_ratio,
                                          "even_power_ratio": an.even_power_ratio},
                          provenance=_provenance())


# ---------------------------------------------------------------- selftests


def _selftest(command: str) -> ResidualReport:
    rep = ResidualReport(f"{command} --selftest", provenance=_provenance())
    K = complete_K(-1.0)
    if command == "elliptic":
        u = np.linspace(-20.0, 20.0, 2001)
        for m in (-1.0, -0.3, 0.0, 0.5, 0.99):
            e = jacobi(u, m)
            rep.add(Check.below(f"identities_m={m}",
                                float(np.max(np.abs(e.sn**2 + e.cn**2 - 1.0))), 1e-12))
        rep.add(Check.below("K(-1)", K - 1.3110287771460598, 1e-12))
    elif command in ("verify-classical", "su2-solve"):
        sol = ScalarWaveSolution(2.0, 1.0)
        rep.add(Check.below("scalar_residual", classical_residual_scalar(sol), 1e-8))
        bad = ScalarWaveSolution(2.0, 1.01)
        rep.add(Check.above("perturbed_amplitude",
                            classical_residual_scalar(sol, field=bad.value), 1e-3))
        ans = su2_solve(FourMomentum.rest(1.0), 1.0, 1.0, 1.0)
        rep.add(Check.below("landau_XYZ", float(np.max(np.abs(ans.amplitudes - 1.0))), 1e-15))
        rep.add(Check.below("su2_residual", classical_residual_su2(ans), 1e-8))
    elif command == "stability":
        res = stability_eigencheck(2.0, 1.0)
        rep.add(Check.below("eigen_residual", res.residual, 1e-8))
        off = stability_eigencheck(2.0, 1.0, p2=1.01)
        rep.add(Check.above("off_shell_residual", off.residual, 1e-3))
    elif command in ("spectrum", "propagator"):
        spec = spectrum(2.0, 1.0)
        rep.add(Check.below("weight_sum", spec.total_weight - 1.0, 1e-6))
        rep.add(Check.below("m1_over_m0", spec.masses[1] / spec.masses[0] - 3.0, 1e-15))
        rep.add(Check.below("G(0)", propagator_momentum(0.0, 2.0, 1.0).real + 0.5, 1e-3))
        jump = greens_jump_check(2.0, 1.0)
        rep.add(Check.below("jump_error", jump.jump_error, 1e-8))
        wrong = greens_jump_check(2.0, 1.0, phase=0.5 * K)
        rep.add(Check.above("wrong_phase_jump_error", wrong.jump_error, 0.1))
    elif command == "ds-check":
        rep.add(Check.below("g2_jump", g2_greens_residual(2.0, 1.0)[0], 1e-8))
        rep.add(Check.below("g3_origin", g3_at_origin(2.0, 1.0).numeric, 1e-12))
        ctrl = g3_at_origin(kernels=RestFrameKernels.two_sided())
        rep.add(Check.above("two_sided_control", ctrl.numeric, 1e-3))
        rep.add(Check.below("g1_offset", g1_residual(ScalarWaveSolution(2.0, 1.0),
                                                     ClosureConditions(G3_00=0.1)) - 0.2, 1e-8))
    elif command in ("lattice-run", "measure-gap"):
        grid = LatticeGrid.rest_frame(2.0, 1.0, 256)
        T = grid.dt * 256
        res = evolve(grid, 2.0, 1.0, 33 * T)
        an = analyse_spectrum(res.series)
        rep.add(Check.below("mass_gap", an.fundamental / mass_n(0, 2.0, 1.0) - 1.0, 1e-3))
        t = np.arange(4096) * 0.05
        rep.add(Check.below("sine_calibration",
                            analyse_spectrum(TimeSeries(np.sin(t), 0.05)).fundamental - 1.0,
                            1e-4))
        rep.add(Check.below("kernel_period", kernel_period(2.0, 1.0) - 4.0 * K, 1e-12))
    return rep


# ---------------------------------------------------------------- dispatch

_COMMANDS = {
    "elliptic": cmd_elliptic,
    "verify-classical": cmd_verify_classical,
    "su2-solve": cmd_su2_solve,
    "stability": cmd_stability,
    "spectrum": cmd_spectrum,
    "propagator": cmd_propagator,
    "ds-check": cmd_ds_check,
    "lattice-run": cmd_lattice_run,
    "measure-gap": cmd_measure_gap,
}


def _emit(rep: ResidualReport, table, args, stdout) -> None:
    out_dir = Path(args.output_dir) if args.output_dir else None
    if out_dir is not None:
        out_dir.mkdir(parents=True, exist_ok=True)
    if table is not None:
        name, header, rows = table
        if args.command == "spectrum":
            stdout.write(write_csv(None, header, rows))
            if out_dir is not None:
                write_csv(out_dir / name, header, rows)
            return
        write_csv(name, header, rows)
    text = dumps(rep)
    stdout.write(text)
    if out_dir is not None:
        (out_dir / f"{args.command}.json").write_text(text, encoding="utf-8")


def parse_and_dispatch(argv=None, stdout=None) -> int:
    """Run one subcommand; return the process exit code."""
    stdout = sys.stdout if stdout is None else stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        args = _merge(args)
    except (ValueError, OSError) as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"massgap: error: {exc}\n")
        return 2
    required = {"propagator": ("psq", "--p2"), "measure-gap": ("input", "--input")}
    if not args.selftest and args.command in required:
        dest, flag = required[args.command]
        if getattr(args, dest) is None:
            parser.print_usage(sys.stderr)
            sys.stderr.write(f"massgap {args.command}: error: {flag} is required\n")
            return 2
    try:
        if args.selftest:
            rep, table = _selftest(args.command), None
        else:
            result = _COMMANDS[args.command](args)
            rep, table = result if isinstance(result, tuple) else (result, None)
    except (ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        err = {"schema": 1, "command": args.command, "pass": False,
               "error": {"type": type(exc).__name__, "message": str(exc)}}
        stdout.write(dumps(err))
        return 1
    _emit(rep, table, args, stdout)
    return 0 if rep.passed else 1


def main(argv=None) -> None:
    sys.exit(parse_and_dispatch(argv))


if __name__ == "__main__":
    main()
