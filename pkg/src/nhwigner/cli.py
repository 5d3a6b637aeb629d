"""Command-line front end.

Subcommands: spectrum, basis, project, evolve, resonance, bw. Exit status is
0 on success, 2 for usage or validation errors and 3 when a numerical run
becomes unstable.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import elliptic, evolution, lineshape
from .core import ModeIndex, ParameterError, make_grid
from .elliptic import SpectralCoeffs
from .io import (
    RunConfig,
    read_csv_series,
    series_text,
    write_csv_matrix,
    write_csv_series,
    write_pgm,
)

log = logging.getLogger("nhwigner")

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERICAL = 3
LONG_LIVED_RATE = 1e-3


class UsageError(Exception):
    pass


def _int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _float_pair(text: str) -> tuple[float, float]:
    parts = [float(x) for x in text.split(",")]
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected 'q,p', got {text!r}")
    return parts[0], parts[1]


def _add_model_flags(p: argparse.ArgumentParser, with_grid: bool = True) -> None:
    p.add_argument("--config", help="key = value file; explicit flags override it")
    p.add_argument("--model", choices=("elliptic", "hyperbolic", "general"))
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float, help="only used by --model general")
    p.add_argument("--gamma", type=float)
    if with_grid:
        p.add_argument("--L", type=float, dest="L", help="phase-space half-width")
        p.add_argument("--N", type=int, dest="N", help="grid points per axis")
    p.add_argument("--out", help="output directory (tables go to stdout when omitted)")
    p.add_argument("--format", dest="formats", help="comma list of csv-matrix,csv-series,pgm")


def _add_init_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--init", choices=("mode", "gaussian", "coeffs"), default="mode")
    p.add_argument("--n", help="radial index (comma list for sweeps); default from config modes")
    p.add_argument("--nu", help="angular index (comma list for sweeps)")
    p.add_argument("--parity", choices=("+", "-"))
    p.add_argument("--center", type=_float_pair, default=(0.0, 0.0), help="Gaussian centre 'q,p'")
    p.add_argument("--width", type=float, default=1.0 / math.sqrt(2.0), help="Gaussian std. deviation")
    p.add_argument("--coeffs", help="coefficient CSV (n,nu,parity,coeff) for --init coeffs")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nhwigner", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="decay-constant spectrum table")
    _add_model_flags(p, with_grid=False)
    p.add_argument("--n-max", type=int, default=3)
    p.add_argument("--nu-max", type=int, default=3)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("basis", help="sample basis functions B+/-_{n,nu}(t) on a grid")
    _add_model_flags(p)
    p.add_argument("--n")
    p.add_argument("--nu")
    p.add_argument("--parity", choices=("+", "-"))
    p.add_argument("--t", type=float, default=0.0)
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("project", help="expand an initial Wigner function over the eigenbasis")
    _add_model_flags(p)
    _add_init_flags(p)
    p.add_argument("--n-max", type=int, default=elliptic.DEFAULT_N_MAX)
    p.add_argument("--nu-max", type=int, default=elliptic.DEFAULT_NU_MAX)
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("evolve", help="finite-difference evolution with trace tracking")
    _add_model_flags(p)
    _add_init_flags(p)
    p.add_argument("--dt", type=float, help="time step (default: half the stability bound)")
    p.add_argument("--t-end", type=float, dest="t_end")
    p.add_argument("--record-every", type=int, dest="record_every")
    p.add_argument("--normalized", action="store_const", const=True, default=None)
    p.add_argument("--order", type=int, choices=(2, 4))
    p.set_defaults(func=cmd_evolve)

    p = sub.add_parser("resonance", help="resonance energies and critical (long-lived) states")
    _add_model_flags(p, with_grid=False)
    p.add_argument("--nu-max", type=int, default=3)
    p.set_defaults(func=cmd_resonance)

    p = sub.add_parser("bw", help="Breit-Wigner energy distribution of a mode")
    _add_model_flags(p, with_grid=False)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--nu", default="0", help="angular index (comma list)")
    p.add_argument("--window", type=float, default=5.0, help="half-width of the window in HWHM units")
    p.add_argument("--samples", type=int, default=1001)
    p.add_argument("--compare-numeric", action="store_true", help="add the quadrature transform column")
    p.set_defaults(func=cmd_bw)
    return parser


_CONFIG_KEYS = ("model", "alpha", "beta", "gamma", "L", "N", "dt", "t_end", "record_every", "normalized", "order", "out", "formats")


def run_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, the optional config file and explicit flags (flags win)."""
    values = {}
    if getattr(args, "config", None):
        values.update(RunConfig.parse_text(Path(args.config).read_text()))
    for key in _CONFIG_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    if isinstance(values.get("formats"), str):
        values["formats"] = tuple(x.strip() for x in values["formats"].split(",") if x.strip())
    cfg = RunConfig(**values)
    cfg.params  # validates alpha, beta, gamma
    return cfg


def _emit(text: str, out: str | None, filename: str) -> None:
    if out:
        path = Path(out)
        path.mkdir(parents=True, exist_ok=True)
        (path / filename).write_text(text)
        print(path / filename)
    else:
        sys.stdout.write(text)


def cmd_spectrum(args) -> int:
    cfg = run_config(args)
    p = cfg.params
    if cfg.model == "elliptic":
        rows = {"n": [], "nu": [], "lambda_re": [], "lambda_im": [], "tau": []}
        for n in range(args.n_max + 1):
            for nu in range(args.nu_max + 1):
                lam = elliptic.eigenvalue(ModeIndex(n, nu), p)
                for k, v in zip(rows, (n, nu, lam.re, lam.im, lam.lifetime)):
                    rows[k].append(v)
    elif cfg.model == "hyperbolic":
        rows = {"nu": [], "lambda_re": [], "lambda_im": []}
        for nu in range(args.nu_max + 1):
            lam = evolution.hyperbolic_eigenvalue(nu, p)
            for k, v in zip(rows, (nu, lam.re, lam.im)):
                rows[k].append(v)
    else:
        raise UsageError("no closed-form spectrum exists for the general model")
    _emit(series_text(rows), args.out, "spectrum.csv")
    return EXIT_OK


def _modes(args, cfg: RunConfig) -> list[tuple[ModeIndex, str]]:
    """Requested (mode, parity) pairs: the --n x --nu product, else the config's modes."""
    if args.n is None and args.nu is None:
        modes = [(ModeIndex(n, nu), args.parity or parity) for n, nu, parity in cfg.modes]
    else:
        ns = _int_list(args.n if args.n is not None else "0")
        nus = _int_list(args.nu if args.nu is not None else "0")
        modes = [(ModeIndex(n, nu), args.parity or "+") for n in ns for nu in nus]
    if not modes:
        raise UsageError("no modes requested")
    return modes


def cmd_basis(args) -> int:
    cfg = run_config(args)
    p = cfg.params
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    for m, parity in _modes(args, cfg):
        f = elliptic.basis_real(m, parity, args.t, p)
        W = f.sample(cfg.L, cfg.N)
        stem = f"basis_n{m.n}_nu{m.nu}{'p' if parity == '+' else 'm'}_t{args.t:g}"
        if "pgm" in cfg.formats:
            write_pgm(out / f"{stem}.pgm", W)
        if "csv-matrix" in cfg.formats:
            write_csv_matrix(out / f"{stem}.csv", W)
        peak = float(np.max(np.abs(W.values)))
        print(f"{stem}: extrema={elliptic.count_extrema(W)} max_abs={peak:.17g}")
    return EXIT_OK


def initial_condition(args, cfg: RunConfig, mode: tuple[ModeIndex, str] | None = None):
    grid = make_grid(cfg.L, cfg.N)
    if args.init == "mode":
        m, parity = mode if mode is not None else _modes(args, cfg)[0]
        return elliptic.basis_real(m, parity).sample(cfg.L, cfg.N)
    if args.init == "gaussian":
        Q, P = grid.mesh()
        q0, p0 = args.center
        s2 = args.width**2
        values = np.exp(-((Q - q0) ** 2 + (P - p0) ** 2) / (2 * s2)) / (2 * math.pi * s2)
        return grid.with_values(values)
    if not args.coeffs:
        raise UsageError("--init coeffs needs --coeffs FILE")
    return elliptic.evolve_analytic(read_coeffs(args.coeffs), 0.0, None, cfg.L, cfg.N)


def read_coeffs(path) -> SpectralCoeffs:
    cols, _ = read_csv_series(path)
    entries = {
        (int(n), int(nu), str(par)): float(c)
        for n, nu, par, c in zip(cols["n"], cols["nu"], cols["parity"], cols["coeff"])
    }
    return SpectralCoeffs(entries)


def cmd_project(args) -> int:
    cfg = run_config(args)
    W0 = initial_condition(args, cfg)
    c = elliptic.project(W0, args.n_max, args.nu_max, check_normalization=False)
    rows = {"n": [], "nu": [], "parity": [], "coeff": []}
    for (n, nu, parity), v in c.items():
        for k, x in zip(rows, (n, nu, parity, v)):
            rows[k].append(x)
    comments = [f"residual = {c.residual:.17g}", f"trace = {c.trace:.17g}"]
    text = series_text(rows, comments)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "coeffs.csv").write_text(text)
        print(out / "coeffs.csv")
    else:
        sys.stdout.write(text)
    print(f"residual={c.residual:.6g}", file=sys.stderr if not args.out else sys.stdout)
    return EXIT_OK


def _running_rates(times: np.ndarray, y: np.ndarray) -> np.ndarray:
    rates = np.full(times.shape, math.nan)
    for k in range(1, times.size):
        if np.all(y[: k + 1] > 0):
            rates[k] = -np.polyfit(times[: k + 1], np.log(y[: k + 1]), 1)[0]
    return rates


def _evolve_one(args, cfg: RunConfig, mode: tuple[ModeIndex, str] | None, out: Path) -> str:
    p = cfg.params
    W0 = initial_condition(args, cfg, mode)
    dt = cfg.dt if cfg.dt is not None else 0.5 * evolution.stability_bound(W0, p)
    ecfg = evolution.EvolverConfig(
        dt=dt,
        t_end=cfg.t_end,
        record_every=cfg.record_every,
        normalized=cfg.normalized,
        order=cfg.order,
        keep_snapshots="csv-matrix" in cfg.formats or "pgm" in cfg.formats,
    )
    result = evolution.evolve(W0, p, ecfg)
    out.mkdir(parents=True, exist_ok=True)
    for k, snap in enumerate(result.snapshots):
        if "csv-matrix" in cfg.formats:
            write_csv_matrix(out / f"snapshot_{k:05d}.csv", snap)
        if "pgm" in cfg.formats:
            write_pgm(out / f"snapshot_{k:05d}.pgm", snap)
    s = result.series
    # nu != 0 modes carry no trace; their recorded trace is roundoff
    angular = mode is not None and mode[0].nu != 0
    observable = "norm" if angular or not np.all(s.traces > 0) else "trace"
    y = s.traces if observable == "trace" else s.norms
    rate = evolution.decay_rate_fit(s, observable)
    if "csv-series" in cfg.formats:
        write_csv_series(
            out / "trace.csv",
            {"t": s.times, "trace": s.traces, "norm": s.norms, "fitted_rate": _running_rates(s.times, y)},
            comments=[f"observable = {observable}"],
        )
    modes = ((mode[0].n, mode[0].nu, mode[1]),) if mode is not None else ()
    cfg_out = RunConfig(**{**cfg.__dict__, "out": str(out), "modes": modes})
    cfg_out.save(out / "run.cfg")
    flag = " LONG-LIVED" if abs(rate) < LONG_LIVED_RATE else ""
    label = f"n={mode[0].n} nu={mode[0].nu} " if mode is not None else ""
    return f"{label}decay_rate={rate:.17g} observable={observable} t_end={s.times[-1]:.6g}{flag}"


def _threads() -> int:
    try:
        return max(1, int(os.environ.get("NHWIGNER_THREADS", "1")))
    except ValueError:
        raise UsageError("NHWIGNER_THREADS must be an integer") from None


def cmd_evolve(args) -> int:
    cfg = run_config(args)
    out = Path(cfg.out)
    if args.init == "mode":
        modes = _modes(args, cfg)
        if len(modes) == 1:
            jobs = [(modes[0], out)]
        else:
            jobs = [((m, par), out / f"n{m.n}_nu{m.nu}{'p' if par == '+' else 'm'}") for m, par in modes]
    else:
        jobs = [(None, out)]
    if len(jobs) == 1:
        lines = [_evolve_one(args, cfg, *jobs[0])]
    else:
        with ThreadPoolExecutor(max_workers=min(_threads(), len(jobs))) as pool:
            lines = list(pool.map(lambda job: _evolve_one(args, cfg, *job), jobs))
    for line in lines:
        print(line)
    return EXIT_OK


def cmd_resonance(args) -> int:
    cfg = run_config(args)
    p = cfg.params
    rows = {"nu": [], "E_c": [], "gamma_over_alpha_c": [], "n_c": [], "realizable": []}
    for nu in range(args.nu_max + 1):
        cs = elliptic.critical_state(nu, p)
        values = (nu, elliptic.resonance_energy(nu, p), cs.critical_gamma_over_alpha, cs.n_c, cs.realizable)
        for k, v in zip(rows, values):
            rows[k].append(v)
    _emit(series_text(rows), args.out, "resonance.csv")
    return EXIT_OK


def cmd_bw(args) -> int:
    cfg = run_config(args)
    p = cfg.params
    if args.samples < 3:
        raise UsageError("--samples must be at least 3")
    for nu in _int_list(args.nu):
        m = ModeIndex(args.n, nu)
        if cfg.model == "hyperbolic":
            line = lineshape.hyperbolic_energy_distribution(nu, p)
        elif cfg.model == "elliptic":
            line = lineshape.energy_distribution(m, p)
        else:
            raise UsageError("Breit-Wigner lines exist for the elliptic and hyperbolic models only")
        E = np.linspace(line.location - args.window * line.hwhm, line.location + args.window * line.hwhm, args.samples)
        cols = {"E": E, "f": line(E)}
        if args.compare_numeric:
            if cfg.model != "elliptic":
                raise UsageError("--compare-numeric needs the elliptic model")
            F = lineshape.half_line_fourier_numeric(m, p, E)
            cols["f_numeric"] = line.hwhm / math.pi * np.abs(F) ** 2
        comments = [f"hwhm = {line.hwhm:.17g}", f"location = {line.location:.17g}"]
        _emit(series_text(cols, comments), args.out, f"bw_{cfg.model}_n{m.n}_nu{nu}.csv")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except evolution.StabilityError as exc:
        print(f"error: {exc}; stability bound = {exc.bound:.17g}", file=sys.stderr)
        return EXIT_USAGE
    except (ParameterError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except evolution.NumericalInstabilityError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
