"""Command-line front end.

Subcommands ``spectrum``, ``scaling``, ``photon-number`` and ``verify``.
Any config key can be overridden with a dotted flag, e.g.
``--noise.tau=1e-18`` or ``--sweep.n_points 10``.

Exit codes: 0 success, 2 config error, 3 verification failure,
4 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

from . import __version__, kernels
from .config import ConfigError, RunConfig, apply_overrides, build_config, load_config
from .kernels import Order, Piece
from .oracles import loglog_slope
from .params import derive, make_frame
from .rates import rate_spectrum, photon_number
from .verify import format_table, run_checks

__all__ = ["main", "build_parser", "run_spectrum", "run_scaling", "run_photon_number",
           "run_verify", "EXIT_OK", "EXIT_CONFIG", "EXIT_VERIFY", "EXIT_NONCONVERGED"]

EXIT_OK, EXIT_CONFIG, EXIT_VERIFY, EXIT_NONCONVERGED = 0, 2, 3, 4

SPECTRUM_FIELDS = ["k", "omega_k", "rate", "formula", "noise_kind", "tau"]


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return "%.17g" % x


def _csv_text(fields, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(fields)
    for row in rows:
        writer.writerow([_fmt(row[f]) for f in fields])
    return buf.getvalue()


def _json_text(payload) -> str:
    return json.dumps(payload, indent=2, sort_keys=False) + "\n"


def _emit(text: str, out: str | None, name: str, fmt: str):
    if out is None:
        sys.stdout.write(text)
        return None
    target = Path(out)
    if target.suffix:  # explicit file
        path = target
    else:
        target.mkdir(parents=True, exist_ok=True)
        path = target / f"{name}.{fmt}"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return path


# ------------------------------------------------------------------- commands

def run_spectrum(cfg: RunConfig, *, jobs=1, dimensionless=False, out=None, fmt="csv") -> int:
    spec = cfg.sweep
    ks = spec.grid()
    frame = make_frame(cfg.params, spec.k_min)
    status = EXIT_OK
    all_rows = []
    # a directory target gets one file per formula; a file or stdout gets one table
    per_formula = out is not None and not Path(out).suffix
    for formula in spec.formulas:
        result = rate_spectrum(cfg.params, cfg.noise, ks, formula, t=spec.t_final,
                               order=spec.order, beta_scale=spec.beta_scale,
                               guard=spec.guard, jobs=jobs)
        if result.excluded:
            print(f"note: {formula.value}: {len(result.excluded)} resonant sample(s) "
                  f"excluded by the guard band", file=sys.stderr)
        if not result.all_converged:
            bad = sum(1 for c in result.converged if not c)
            print(f"warning: {formula.value}: {bad} sample(s) not converged at "
                  f"t_final = {spec.t_final}", file=sys.stderr)
            status = EXIT_NONCONVERGED
        rows = []
        for k, rate in result.samples:
            omega_k = cfg.params.c * k
            tau = cfg.tau
            if dimensionless:
                k, omega_k, rate = k / frame.k_ref, frame.to_freq(omega_k), rate / frame.rate_prefactor
                tau = None if tau is None else frame.to_time(tau)
            rows.append({"k": k, "omega_k": omega_k, "rate": rate, "formula": formula.value,
                         "noise_kind": cfg.noise_kind, "tau": tau})
        all_rows.extend(rows)
        if per_formula:
            text = _csv_text(SPECTRUM_FIELDS, rows) if fmt == "csv" else _json_text(rows)
            _emit(text, out, f"spectrum_{formula.value}", fmt)
    if not per_formula:
        text = _csv_text(SPECTRUM_FIELDS, all_rows) if fmt == "csv" else _json_text(all_rows)
        _emit(text, out, "spectrum", fmt)
    return status


def scaling_table(cfg: RunConfig, *, dimensionless=False):
    spec = cfg.scaling
    beta_phys = derive(cfg.params).beta
    rows = []
    for mult in spec.beta_multipliers:
        scale = spec.base_beta_scale * mult
        vals = {p: abs(kernels.t_piece(p, cfg.params, cfg.noise, spec.k_fixed, spec.t_final,
                                       spec.order, beta_scale=scale).value)
                for p in (Piece.A, Piece.B, Piece.D)}
        beta = beta_phys * scale
        if dimensionless:
            beta = make_frame(cfg.params, spec.k_fixed, beta=beta).damping
        rows.append({"beta": beta, "multiplier": mult, "abs_TA": vals[Piece.A],
                     "abs_TB": vals[Piece.B], "abs_TD": vals[Piece.D]})
    betas = [r["beta"] for r in rows]
    ta = [r["abs_TA"] for r in rows]
    summary = {
        "slope_TB": loglog_slope(betas, [r["abs_TB"] for r in rows]),
        "slope_TD": loglog_slope(betas, [r["abs_TD"] for r in rows]),
        "TA_variation": (max(ta) - min(ta)) / max(ta) if max(ta) > 0 else None,
    }
    return rows, summary


def run_scaling(cfg: RunConfig, *, dimensionless=False, out=None, fmt="csv") -> int:
    rows, summary = scaling_table(cfg, dimensionless=dimensionless)
    if fmt == "csv":
        text = _csv_text(["beta", "multiplier", "abs_TA", "abs_TB", "abs_TD"], rows)
    else:
        text = _json_text({"rows": rows, **summary})
    _emit(text, out, "scaling", fmt)
    for key, value in summary.items():
        shown = "n/a" if value is None else f"{value:.6g}"
        print(f"{key} = {shown}", file=sys.stderr)
    return EXIT_OK


def run_photon_number(cfg: RunConfig, *, dimensionless=False, out=None, fmt="csv") -> int:
    spec = cfg.photon_number
    frame = make_frame(cfg.params, spec.k)
    rows = []
    for t in spec.times:
        n = photon_number(cfg.params, cfg.noise, spec.k, t, spec.order,
                          beta_scale=spec.beta_scale)
        tt, kk = (frame.to_time(t), 1.0) if dimensionless else (t, spec.k)
        if dimensionless:
            n = n / frame.number_prefactor
        rows.append({"t": tt, "k": kk, "photon_number": n, "order": spec.order.value,
                     "noise_kind": cfg.noise_kind, "tau": cfg.tau})
    fields = ["t", "k", "photon_number", "order", "noise_kind", "tau"]
    text = _csv_text(fields, rows) if fmt == "csv" else _json_text(rows)
    _emit(text, out, "photon_number", fmt)
    return EXIT_OK


def run_verify(cfg: RunConfig, *, tolerance_scale=None) -> int:
    scale = cfg.tolerance_scale if tolerance_scale is None else tolerance_scale
    results = run_checks(scale)
    print(format_table(results))
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERIFY


# -------------------------------------------------------------------- parsing

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--out", help="output file, or directory for one file per table")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--dimensionless", action="store_true",
                        help="emit frame quantities (k in units of the reference k, "
                             "rates in units of the frame rate prefactor)")

    parser = argparse.ArgumentParser(
        prog="csl-emission",
        description="Spontaneous photon emission from collapse noise. Config keys can be "
                    "overridden with dotted flags such as --noise.tau=1e-18.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sp = sub.add_parser("spectrum", parents=[common], help="rate spectra for each formula")
    sp.add_argument("--jobs", type=int, default=1, help="worker processes")
    sub.add_parser("scaling", parents=[common], help="kernel pieces versus damping strength")
    sub.add_parser("photon-number", parents=[common], help="photon number versus time")
    vp = sub.add_parser("verify", parents=[common], help="run the oracle suite")
    vp.add_argument("--tolerance-scale", type=float, default=None,
                    help="multiply every tolerance by this factor")
    return parser


def _split_overrides(extra):
    overrides = []
    i = 0
    while i < len(extra):
        tok = extra[i]
        if not tok.startswith("--") or "." not in tok.split("=", 1)[0]:
            raise ConfigError(f"unrecognized argument {tok!r}")
        key = tok[2:]
        if "=" in key:
            overrides.append(key)
        else:
            if i + 1 >= len(extra):
                raise ConfigError(f"override {tok} needs a value")
            overrides.append(f"{key}={extra[i + 1]}")
            i += 1
        i += 1
    return overrides


def main(argv=None) -> int:
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    try:
        overrides = _split_overrides(extra)
        cfg = build_config(apply_overrides(load_config(args.config), overrides))
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "spectrum":
        if args.jobs < 1:
            print("config error: --jobs must be >= 1", file=sys.stderr)
            return EXIT_CONFIG
        return run_spectrum(cfg, jobs=args.jobs, dimensionless=args.dimensionless,
                            out=args.out, fmt=args.format)
    if args.command == "scaling":
        return run_scaling(cfg, dimensionless=args.dimensionless, out=args.out, fmt=args.format)
    if args.command == "photon-number":
        return run_photon_number(cfg, dimensionless=args.dimensionless, out=args.out,
                                 fmt=args.format)
    return run_verify(cfg, tolerance_scale=args.tolerance_scale)


if __name__ == "__main__":
    sys.exit(main())
