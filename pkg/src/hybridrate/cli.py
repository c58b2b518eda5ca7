"""Command-line front end: ``hybridrate {rates,ratio,contour,simulate,fit-qfc}``.

Data goes to stdout as tidy CSV (default) or a single JSON document;
diagnostics go to stderr as one line. The default format can be set with
the HYBRIDRATE_FORMAT environment variable.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import model
from .params import DomainError, NetworkParams, Protocol
from .qfc import QfcMeasurement, fit_qfc
from .scenarios import GridAxis, SweepSpec, apply_overrides, contour_grid, load_config, preset, sweep_rates
from .simulator import SimConfig, analytic_rate, run_simulation

SCHEMA_VERSION = 1
UNDEFINED = "undefined"
FORMAT_ENV = "HYBRIDRATE_FORMAT"


class CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v) if math.isfinite(v) else UNDEFINED
    if v is None:
        return UNDEFINED
    return str(v)


def _json_cell(v):
    if isinstance(v, float) and not math.isfinite(v):
        return UNDEFINED
    return v


def render(command: str, columns: Sequence[str], rows: Sequence[dict], fmt: str,
           metadata: dict) -> str:
    if fmt == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "metadata": metadata,
            "columns": list(columns),
            "rows": [{c: _json_cell(r[c]) for c in columns} for r in rows],
        }
        return json.dumps(doc, indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_cell(r[c]) for c in columns])
    return buf.getvalue()


def _params(args) -> NetworkParams:
    if args.config:
        params = load_config(args.config)
    else:
        try:
            params = preset(args.preset).params
        except KeyError as exc:
            raise CliError(exc.args[0]) from None
    try:
        return apply_overrides(params, args.set or [])
    except KeyError as exc:
        raise CliError(exc.args[0]) from None


def _protocols(text: str) -> list[Protocol]:
    if text == "all":
        return list(Protocol)
    return [Protocol.parse(t) for t in text.split(",") if t.strip()]


def _metadata(args, **extra) -> dict:
    meta = {"preset": None if args.config else args.preset}
    if args.config:
        meta["config"] = os.fspath(args.config)
    if args.set:
        meta["overrides"] = list(args.set)
    meta.update(extra)
    if args.timestamp:
        meta["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return meta


def _lengths(args) -> GridAxis:
    if args.steps < 1:
        raise CliError("--steps must be at least 1")
    return GridAxis("length_km", args.l_min, args.l_max, args.steps)


def cmd_rates(args) -> str:
    params = _params(args)
    points = sweep_rates(SweepSpec(params, _lengths(args), tuple(_protocols(args.protocols))))
    rows = [{"length_km": p.length_km, "protocol": p.protocol.value, "rate_hz": p.rate_hz}
            for p in points]
    return render("rates", ["length_km", "protocol", "rate_hz"], rows, args.format, _metadata(args))


def cmd_ratio(args) -> str:
    params = _params(args)
    points = sweep_rates(SweepSpec(params, _lengths(args), tuple(_protocols(args.protocols))))
    rows = []
    for p in points:
        base = model.rate_base(p.length_km, params)
        ratio = 1.0 if p.protocol is Protocol.BASELINE else (p.rate_hz / base if base > 0 else math.nan)
        rows.append({"length_km": p.length_km, "protocol": p.protocol.value, "ratio": ratio})
    return render("ratio", ["length_km", "protocol", "ratio"], rows, args.format, _metadata(args))


def cmd_contour(args) -> str:
    params = _params(args)
    if args.steps < 2:
        raise CliError("--steps must be at least 2")
    axis = np.linspace(0.0, 1.0, args.steps)
    grid = contour_grid(params, args.length, axis, axis)
    rows = [{"e_s": float(e), "p_nd": float(d), "ratio": float(grid[i, j])}
            for i, e in enumerate(axis) for j, d in enumerate(axis)]
    return render("contour", ["e_s", "p_nd", "ratio"], rows, args.format,
                  _metadata(args, length_km=args.length))


def cmd_simulate(args) -> str:
    params = _params(args)
    if args.tau is not None and args.tau_cycles is not None:
        raise CliError("give at most one of --tau and --tau-cycles")
    if args.tau is not None:
        params = params.replace(tau=args.tau)
    elif args.tau_cycles is not None:
        params = params.replace(tau=args.tau_cycles * model.cycle_period(params))
    config = SimConfig(params, args.length, Protocol.parse(args.protocol), args.cycles,
                       args.seed, args.rng_resolution)
    result = run_simulation(config)
    row = result.as_record()
    row["analytic_hz"] = analytic_rate(config)
    columns = list(row)
    return render("simulate", columns, [row], args.format,
                  _metadata(args, seed=args.seed, tau_s=params.tau))


def read_qfc_csv(path) -> list[QfcMeasurement]:
    """Read ``pump_power,efficiency[,uncertainty]`` rows (header required)."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        fields = [f.strip() for f in (reader.fieldnames or [])]
        for need in ("pump_power", "efficiency"):
            if need not in fields:
                raise CliError(f"{path}: missing column {need!r}")
        out = []
        for lineno, row in enumerate(reader, 2):
            row = {k.strip(): (v or "").strip() for k, v in row.items() if k}
            try:
                unc = row.get("uncertainty")
                out.append(QfcMeasurement(float(row["pump_power"]), float(row["efficiency"]),
                                          float(unc) if unc else None))
            except ValueError as exc:
                raise CliError(f"{path}:{lineno}: {exc}") from None
    return out


def cmd_fit_qfc(args) -> str:
    measurements = read_qfc_csv(args.input)
    fit = fit_qfc(measurements, tuple(args.guess) if args.guess else None)
    row = fit.as_record()
    meta = {"input": os.fspath(args.input), "points": len(measurements)}
    if args.timestamp:
        meta["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return render("fit-qfc", list(row), [row], args.format, meta)


def build_parser() -> argparse.ArgumentParser:
    default_fmt = os.environ.get(FORMAT_ENV, "csv")
    if default_fmt not in ("csv", "json"):
        default_fmt = "csv"

    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=default_fmt)
    common.add_argument("--timestamp", action="store_true",
                        help="add a UTC timestamp to JSON metadata (output is then not reproducible)")

    net = _Parser(add_help=False)
    net.add_argument("--preset", default="ir780")
    net.add_argument("--config", help="key = value parameter file (overrides --preset)")
    net.add_argument("--set", action="append", metavar="KEY=VALUE",
                     help="override one network parameter; repeatable")

    sweep = _Parser(add_help=False)
    sweep.add_argument("--protocols", default="all",
                       help="comma-separated subset of baseline,ndspm,ndspm_storage")
    sweep.add_argument("--l-min", type=float, default=0.0)
    sweep.add_argument("--l-max", type=float, default=50.0)
    sweep.add_argument("--steps", type=int, default=101)

    parser = _Parser(prog="hybridrate", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("rates", parents=[common, net, sweep], help="analytic rates versus length")
    p.set_defaults(func=cmd_rates)
    p = sub.add_parser("ratio", parents=[common, net, sweep], help="rate / homogeneous rate versus length")
    p.set_defaults(func=cmd_ratio)

    p = sub.add_parser("contour", parents=[common, net], help="storage gain over (E_s, P_nd)")
    p.add_argument("--length", type=float, default=10.0)
    p.add_argument("--steps", type=int, default=101)
    p.set_defaults(func=cmd_contour)

    p = sub.add_parser("simulate", parents=[common, net], help="Monte Carlo run of one protocol")
    p.add_argument("--protocol", default="ndspm")
    p.add_argument("--length", type=float, default=1.0)
    p.add_argument("--cycles", type=int, default=10**7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tau", type=float, help="storage lifetime in seconds")
    p.add_argument("--tau-cycles", type=float, help="storage lifetime in units of the cycle period")
    p.add_argument("--rng-resolution", type=float)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("fit-qfc", parents=[common], help="fit conversion efficiency versus pump power")
    p.add_argument("input", help="CSV with columns pump_power,efficiency[,uncertainty]")
    p.add_argument("--guess", type=float, nargs=2, metavar=("ETA", "P_M"))
    p.set_defaults(func=cmd_fit_qfc)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        out = args.func(args)
    except (CliError, DomainError, ValueError, KeyError, OSError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"hybridrate: error: {msg}".replace("\n", " "), file=sys.stderr)
        return 2
    sys.stdout.write(out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
