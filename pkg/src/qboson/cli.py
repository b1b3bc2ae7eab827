"""Command-line interface.

Four subcommands share one row schema and two writers:

    eval    one (x, gamma, variant) point, optionally given in physical units
    scan    grid sweep over gammas, x values, and variants
    limits  per-gamma report of both limit deviations of the half-integer form
    verify  run the verification suite and report every check

Exit codes: 0 success, 1 domain or usage error, 2 verification failure,
3 I/O failure.  CSV cells render floats with repr-faithful %.17g and null
values as empty strings; JSON uses native floats and null.  eval emits one
JSON object, scan and limits a JSON array of row objects.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Optional, Sequence

from .distributions import ModePoint, Variant, evaluate_distribution
from .errors import DomainError
from .qmath import DeformationParameter, make_deformation
from .thermo import log_partition_per_mode, regime_report
from .oracle import (
    DEFAULT_GRID_GAMMAS,
    DEFAULT_GRID_X_COUNT,
    default_verification_grid,
    linear_spaced,
    log_spaced,
    run_verification_suite,
)

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_VERIFICATION = 2
EXIT_IO = 3

# exact SI ratio (elementary charge over Boltzmann constant): kelvin per eV
KELVIN_PER_EV = 1.602176634e-19 / 1.380649e-23

ROW_COLUMNS = ("x", "gamma", "variant", "f", "beta_u_per_n", "ln_z_per_mode",
               "regime", "deviation_from_asymptote", "reason")
VERIFY_COLUMNS = ("name", "x", "gamma", "residual", "tolerance", "pass")

REASON_POLE = "x-not-above-gamma"
REASON_LNZ = "ln-z-undefined-for-deformed-no-zpe"
REASON_REGIME = "regime-undefined-x-not-above-gamma"
REASON_ASYMPTOTE = "no-asymptote-in-intermediate-regime"
REASON_SMALL_DEFORMATION = "small-deformation-condition-violated"


class CliError(Exception):
    """Usage-level failure; main maps it to exit code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse wants to sys.exit on bad usage; route through CliError so
    # main owns the exit code
    def error(self, message):
        raise CliError(message)


@dataclass(frozen=True)
class OutputRow:
    x: float
    gamma: float
    variant: str
    f: Optional[float]
    beta_u_per_n: Optional[float]
    ln_z_per_mode: Optional[float]
    regime: Optional[str]
    deviation_from_asymptote: Optional[float]
    reason: Optional[str]

    def to_json_dict(self) -> dict:
        return {name: getattr(self, name) for name in ROW_COLUMNS}


def build_row(x: float, d: DeformationParameter, variant: Variant,
              flag_ratio: Optional[float] = None) -> OutputRow:
    """Evaluate one grid point into the shared row schema.

    Unevaluable cells become null with a reason code instead of failing:
    deformed variants need x > gamma for everything, the deformed no-ZPE
    partition function is undefined, regime diagnostics need x > gamma,
    and only the two limit regimes define an asymptote.  Regime columns
    describe the point through the half-integer deformed form regardless
    of the row's variant, so they agree across variants at one point.
    flag_ratio, when given, appends an advisory reason code on rows where
    gamma > flag_ratio * x (the small-deformation condition fails).
    """
    p = ModePoint(x, d)
    reasons = []
    f = bu = lnz = deviation = None
    regime = None
    if variant.deformed and x <= d.gamma:
        reasons.append(REASON_POLE)
    else:
        f = evaluate_distribution(p, variant).value
        bu = x * f
        if variant is Variant.DEFORMED_NO_ZPE:
            reasons.append(REASON_LNZ)
        else:
            lnz = log_partition_per_mode(p, zpe=variant.zpe,
                                         deformed=variant.deformed)
    if x <= d.gamma:
        if REASON_POLE not in reasons:
            reasons.append(REASON_REGIME)
    else:
        rep = regime_report(p)
        regime = rep.regime.value
        deviation = rep.deviation
        if deviation is None:
            reasons.append(REASON_ASYMPTOTE)
    if flag_ratio is not None and d.gamma > flag_ratio * x:
        reasons.append(REASON_SMALL_DEFORMATION)
    return OutputRow(x, d.gamma, variant.value, f, bu, lnz, regime,
                     deviation, ";".join(reasons) if reasons else None)


def _csv_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _render_csv(columns: Sequence[str], rows: Sequence[Sequence],
                preamble: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for line in preamble:
        buf.write(line + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def _render_json(payload) -> str:
    return json.dumps(payload, indent=2) + "\n"


def _write_output(text: str, path: Optional[str]) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _rows_output(rows: Sequence[OutputRow], fmt: str,
                 metadata: Optional[dict] = None,
                 single: bool = False) -> str:
    """JSON renders a bare array of row objects, or for single-record
    commands one object (carrying any unit-conversion metadata).  CSV gets
    the fixed header; metadata becomes a leading comment line."""
    if fmt == "json":
        if single:
            payload: dict = rows[0].to_json_dict()
            if metadata:
                payload["metadata"] = metadata
            return _render_json(payload)
        return _render_json([r.to_json_dict() for r in rows])
    preamble = []
    if metadata:
        pairs = " ".join(f"{k}={_csv_cell(v)}" for k, v in metadata.items())
        preamble.append(f"# {pairs}")
    cells = [[getattr(r, c) for c in ROW_COLUMNS] for r in rows]
    return _render_csv(ROW_COLUMNS, cells, preamble)


def _parse_float_list(text: str, what: str) -> list[float]:
    try:
        values = [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError:
        raise CliError(f"{what} must be a comma-separated list of numbers, "
                       f"got {text!r}") from None
    if not values:
        raise CliError(f"{what} must name at least one value, got {text!r}")
    return values


def _parse_variants(text: str) -> list[Variant]:
    try:
        return [Variant.from_token(tok.strip())
                for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise CliError(str(exc)) from None


def _x_grid(args) -> list[float]:
    if not (0.0 < args.x_min < args.x_max):
        raise CliError(f"need 0 < --x-min < --x-max, got {args.x_min} "
                       f"and {args.x_max}")
    if args.x_count < 2:
        raise CliError(f"--x-count must be >= 2, got {args.x_count}")
    spaced = log_spaced if args.spacing == "log" else linear_spaced
    return spaced(args.x_min, args.x_max, args.x_count)


def _eval_deformation(args) -> DeformationParameter:
    if args.gamma is not None and args.q is not None:
        raise CliError("pass --gamma or --q, not both")
    if args.q is not None:
        return make_deformation(args.q, "from_q")
    if args.gamma is not None:
        return make_deformation(args.gamma, "from_gamma")
    return DeformationParameter.from_gamma(0.0)


def _eval_x(args) -> tuple[float, Optional[dict]]:
    physical = (args.hbar_omega_ev is not None
                or args.temperature_k is not None)
    if args.x is not None:
        if physical:
            raise CliError("pass either --x or the --hbar-omega-ev/"
                           "--temperature-k pair, not both")
        return args.x, None
    if args.hbar_omega_ev is None or args.temperature_k is None:
        raise CliError("pass --x, or both --hbar-omega-ev and --temperature-k")
    if not args.hbar_omega_ev > 0.0:
        raise CliError(f"--hbar-omega-ev must be positive, "
                       f"got {args.hbar_omega_ev}")
    if not args.temperature_k > 0.0:
        raise CliError(f"--temperature-k must be positive, "
                       f"got {args.temperature_k}")
    x = args.hbar_omega_ev * KELVIN_PER_EV / args.temperature_k
    meta = {"hbar_omega_ev": args.hbar_omega_ev,
            "temperature_k": args.temperature_k,
            "kelvin_per_ev": KELVIN_PER_EV}
    return x, meta


def _render_figures(kind: str, data, figures_dir: str) -> None:
    import os

    from . import plotting

    os.makedirs(figures_dir, exist_ok=True)
    if kind == "scan":
        plotting.render_scan_figures(data, figures_dir)
    elif kind == "limits":
        plotting.render_limits_figure(data, figures_dir)
    else:
        plotting.render_verification_figure(data, figures_dir)


def cmd_eval(args) -> int:
    x, meta = _eval_x(args)
    d = _eval_deformation(args)
    variant = Variant.from_token(args.variant)
    p = ModePoint(x, d)
    if variant.deformed:
        p.require_above_pole()
    row = build_row(x, d, variant)
    _write_output(_rows_output([row], args.format, meta, single=True),
                  args.output)
    return EXIT_OK


def _sweep_rows(gammas: Sequence[float], xs: Sequence[float],
                variants: Sequence[Variant]) -> list[OutputRow]:
    rows = []
    for g in gammas:
        d = DeformationParameter.from_gamma(g)
        for x in xs:
            for variant in variants:
                rows.append(build_row(x, d, variant))
    return rows


def cmd_scan(args) -> int:
    gammas = _parse_float_list(args.gammas, "--gammas")
    variants = _parse_variants(args.variants)
    rows = _sweep_rows(gammas, _x_grid(args), variants)
    text = _rows_output(rows, args.format)
    if args.figures_dir:
        _render_figures("scan", [r.to_json_dict() for r in rows],
                        args.figures_dir)
    _write_output(text, args.output)
    return EXIT_OK


def cmd_limits(args) -> int:
    """Two rows per gamma: the smallest swept x probes the classical
    asymptote, the largest the zero-point one; rows where gamma is not
    small against x carry an advisory reason code."""
    gammas = _parse_float_list(args.gammas, "--gammas")
    if not (0.0 < args.x_min < args.x_max):
        raise CliError(f"need 0 < --x-min < --x-max, got {args.x_min} "
                       f"and {args.x_max}")
    ratio = args.small_deformation_max_ratio
    if not ratio > 0.0:
        raise CliError(f"--small-deformation-max-ratio must be positive, "
                       f"got {ratio}")
    rows = []
    for g in gammas:
        d = DeformationParameter.from_gamma(g)
        for x in (args.x_min, args.x_max):
            rows.append(build_row(x, d, Variant.DEFORMED_ZPE,
                                  flag_ratio=ratio))
    text = _rows_output(rows, args.format)
    if args.figures_dir:
        _render_figures("limits", [r.to_json_dict() for r in rows],
                        args.figures_dir)
    _write_output(text, args.output)
    return EXIT_OK


def _parse_tolerances(entries: Optional[Sequence[str]]) -> Optional[dict]:
    if not entries:
        return None
    overrides = {}
    for entry in entries:
        name, sep, raw = entry.partition("=")
        if not sep or not name:
            raise CliError(f"--tolerance takes NAME=VALUE, got {entry!r}")
        try:
            overrides[name] = float(raw)
        except ValueError:
            raise CliError(f"--tolerance value must be a number, "
                           f"got {entry!r}") from None
    return overrides


def cmd_verify(args) -> int:
    if args.grid == "empty":
        if args.gammas is not None or args.x_count is not None:
            raise CliError("--gammas and --x-count apply to --grid default")
        grid = []
    else:
        gammas = (DEFAULT_GRID_GAMMAS if args.gammas is None
                  else _parse_float_list(args.gammas, "--gammas"))
        x_count = DEFAULT_GRID_X_COUNT if args.x_count is None else args.x_count
        if x_count < 2:
            raise CliError(f"--x-count must be >= 2, got {x_count}")
        grid = default_verification_grid(gammas=gammas, x_count=x_count)
    try:
        report = run_verification_suite(grid=grid,
                                        tolerances=_parse_tolerances(args.tolerance))
    except ValueError as exc:
        raise CliError(str(exc)) from None
    report_dict = report.to_json_dict()
    if args.format == "json":
        text = _render_json(report_dict)
    else:
        cells = [(c.name, c.x, c.gamma, c.residual, c.tolerance, c.passed)
                 for c in report.checks]
        text = _render_csv(VERIFY_COLUMNS, cells)
    if args.figures_dir:
        _render_figures("verify", report_dict, args.figures_dir)
    _write_output(text, args.output)
    return EXIT_OK if report.overall_pass else EXIT_VERIFICATION


def _add_output_options(sp, figures: bool) -> None:
    sp.add_argument("--format", choices=("csv", "json"), default="csv",
                    help="output format (default csv)")
    sp.add_argument("--output", metavar="PATH",
                    help="write to PATH instead of stdout")
    if figures:
        sp.add_argument("--figures-dir", metavar="DIR",
                        help="also render PNG figures into DIR")


def build_parser() -> _Parser:
    variant_tokens = [v.value for v in Variant]
    parser = _Parser(prog="qboson",
                     description="statistical mechanics of deformed boson "
                                 "oscillators")
    sub = parser.add_subparsers(dest="command", required=True)

    pe = sub.add_parser("eval", help="evaluate one point")
    pe.add_argument("--x", type=float, help="dimensionless E/kT")
    pe.add_argument("--hbar-omega-ev", type=float, metavar="EV",
                    help="mode energy in eV (with --temperature-k)")
    pe.add_argument("--temperature-k", type=float, metavar="K",
                    help="temperature in kelvin (with --hbar-omega-ev)")
    pe.add_argument("--gamma", type=float, help="deformation gamma = ln q")
    pe.add_argument("--q", type=float, help="deformation base q")
    pe.add_argument("--variant", choices=variant_tokens,
                    default=Variant.DEFORMED_ZPE.value)
    _add_output_options(pe, figures=False)
    pe.set_defaults(func=cmd_eval)

    ps = sub.add_parser("scan", help="sweep a grid of points")
    ps.add_argument("--gammas", default="0,0.01,0.05,0.1,0.3",
                    help="comma-separated gamma values")
    ps.add_argument("--variants", default=",".join(variant_tokens),
                    help="comma-separated variant tokens")
    ps.add_argument("--x-min", type=float, default=0.1)
    ps.add_argument("--x-max", type=float, default=10.0)
    ps.add_argument("--x-count", type=int, default=25)
    ps.add_argument("--spacing", choices=("log", "linear"), default="log")
    _add_output_options(ps, figures=True)
    ps.set_defaults(func=cmd_scan)

    pl = sub.add_parser("limits",
                        help="report both limit deviations per gamma")
    pl.add_argument("--gammas", default="1e-6,0.01,0.1",
                    help="comma-separated gamma values")
    pl.add_argument("--x-min", type=float, default=1e-3,
                    help="probe of the classical limit")
    pl.add_argument("--x-max", type=float, default=50.0,
                    help="probe of the zero-point limit")
    pl.add_argument("--small-deformation-max-ratio", type=float, default=0.1,
                    metavar="R", help="flag rows where gamma > R * x")
    _add_output_options(pl, figures=True)
    pl.set_defaults(func=cmd_limits)

    pv = sub.add_parser("verify", help="run the verification suite")
    pv.add_argument("--grid", choices=("default", "empty"), default="default",
                    help="'empty' keeps only the fixed canonical checks")
    pv.add_argument("--gammas", help="override the default grid gammas")
    pv.add_argument("--x-count", type=int,
                    help="override the default per-gamma x count")
    pv.add_argument("--tolerance", action="append", metavar="NAME=VALUE",
                    help="override one named tolerance (repeatable)")
    _add_output_options(pv, figures=True)
    pv.set_defaults(func=cmd_verify)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
