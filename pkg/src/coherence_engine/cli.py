"""Command-line front end: ``charge``, ``sweep``, ``optimize``, ``verify`` and ``figure``.

Tables go to CSV (header row, shortest round-trip reals) or JSON; output
files are written atomically.  Exit codes: 0 success, 1 a verification
check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

from . import reports
from .engine_cycle import performance_from_charge
from .jc_charging import DEFAULT_ACC, BathSpec, charged_qubit_state
from .optimizer import SweepGrid, grid_sweep, optimal_per_n

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2

FIGURES = ("fig2", "fig3", "fig4", "fig5", "fig6", "fig7")


class UsageError(Exception):
    pass


def _range(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, steps = text.split(":")
        return float(lo), float(hi), int(steps)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected min:max:steps, got {text!r}") from None


def _seed(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("seed must be non-negative")
    return value


def _cell(value):
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _jsonable(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if hasattr(value, "item"):
        return _jsonable(value.item())
    return value


def _plain(rows):
    return [[v.item() if hasattr(v, "item") else v for v in row] for row in rows]


def render_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in _plain(rows):
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def render_json(payload) -> str:
    return json.dumps(_jsonable(payload), indent=2, sort_keys=True) + "\n"


def table_payload(header, rows) -> dict:
    return {"columns": list(header), "rows": _plain(rows)}


def write_text(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def emit_table(args, header, rows, extra: dict | None = None) -> None:
    if args.format == "csv":
        write_text(render_csv(header, rows), args.out)
        if extra is not None:
            side = render_json(extra)
            if args.out is None:
                sys.stderr.write(side)
            else:
                write_text(side, args.out + ".agreement.json")
        return
    payload = table_payload(header, rows)
    if extra is not None:
        payload["agreement"] = extra
    write_text(render_json(payload), args.out)


def _grid(args, objective: str | None = None) -> SweepGrid:
    try:
        return SweepGrid(args.grid_beta, args.grid_gt, objective or args.objective, args.n, args.acc)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# --- subcommands ---------------------------------------------------------


def cmd_charge(args) -> int:
    if args.beta is None or args.gt is None:
        raise UsageError("charge needs --beta and --gt")
    spec = BathSpec(args.beta, acc=args.acc)
    charge = charged_qubit_state(args.beta, args.gt, spec, prefactor=args.prefactor == "on")
    perf = performance_from_charge(charge.rho_s.matrix, charge.s_bath, args.n, args.beta, args.gt)
    header = reports.ENGINE_COLUMNS + ("abs_delta", "route_gap")
    row = reports.engine_row(perf) + [abs(charge.delta), charge.route_gap]
    emit_table(args, header, [row])
    return EXIT_OK


def cmd_sweep(args) -> int:
    rows = grid_sweep(_grid(args), args.workers)
    emit_table(args, reports.ENGINE_COLUMNS, [reports.engine_row(r.performance) for r in rows])
    return EXIT_OK


def cmd_optimize(args) -> int:
    grid = _grid(args)
    n_values = [args.n] if args.n_max is None else None
    n_max = args.n if args.n_max is None else args.n_max
    results = optimal_per_n(n_max, grid.objective, grid, args.workers, n_values=n_values)
    header = reports.ENGINE_COLUMNS + ("objective", "value", "refined", "grid_beta_omega0", "grid_gt")
    rows = [
        reports.engine_row(r.performance) + [grid.objective, r.best_value, r.refined, r.grid_point[0], r.grid_point[1]]
        for r in results
    ]
    emit_table(args, header, rows)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        checks = reports.run_suite(args.suite, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    passed = all(c.passed for c in checks)
    if args.format == "csv":
        header = ("name", "residual", "tolerance", "passed")
        write_text(render_csv(header, [[c.name, c.residual, c.tolerance, c.passed] for c in checks]), args.out)
    else:
        payload = {"suite": args.suite, "seed": args.seed, "passed": passed, "checks": [c.as_dict() for c in checks]}
        write_text(render_json(payload), args.out)
    return EXIT_OK if passed else EXIT_FAILED


def cmd_figure(args) -> int:
    name = args.name
    if name == "fig2":
        grid = SweepGrid(args.grid_beta, args.grid_gt, "external_coherence", 1, args.acc)
        header, rows = reports.fig2_table(grid, workers=args.workers)
        emit_table(args, header, rows)
    elif name == "fig4":
        header, rows = reports.fig4_table(grid=_grid(args, "efficiency"), workers=args.workers)
        emit_table(args, header, rows)
    elif name in ("fig3", "fig5"):
        n_max = 10 if args.n_max is None else args.n_max
        fig3, fig5, agreement = reports.fig3_fig5_tables(n_max, _grid(args, "efficiency"), args.workers)
        header, rows = fig3 if name == "fig3" else fig5
        emit_table(args, header, rows, extra=agreement)
        if not agreement["internally_consistent"]:
            return EXIT_FAILED
    else:
        header, rows = reports.fig6_fig7_table()
        emit_table(args, header, rows)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--acc", type=float, default=DEFAULT_ACC, help="bath truncation accuracy")
    common.add_argument("--seed", type=_seed, default=0)
    common.add_argument("--out", default=None, help="output path (stdout when omitted)")
    common.add_argument("--format", choices=("csv", "json"), default=None, help="csv for tables, json for verify (default)")

    grid = argparse.ArgumentParser(add_help=False)
    grid.add_argument("--grid-beta", type=_range, default=(0.01, 3.0, 60), metavar="MIN:MAX:STEPS")
    grid.add_argument("--grid-gt", type=_range, default=(0.0, 30.0, 60), metavar="MIN:MAX:STEPS")
    grid.add_argument("--objective", choices=("ext", "eta", "efficiency", "external_coherence"), default="eta")
    grid.add_argument("--n", type=int, default=4, help="number of qubits")
    grid.add_argument("--workers", type=int, default=1)

    parser = argparse.ArgumentParser(prog="coherence-engine", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("charge", parents=[common], help="charge one qubit at a single point")
    p.add_argument("--beta", type=float, help="beta * omega_0")
    p.add_argument("--gt", type=float, help="coupling time g t")
    p.add_argument("--n", type=int, default=1, help="number of copies for the engine columns")
    p.add_argument("--prefactor", choices=("on", "off"), default="on", help="coherence-series convention")
    p.set_defaults(func=cmd_charge)

    p = sub.add_parser("sweep", parents=[common, grid], help="engine table over a (beta, gt) grid")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("optimize", parents=[common, grid], help="grid search plus simplex refinement")
    p.add_argument("--n-max", type=int, default=None, help="optimise every N from 1 to this value")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("--suite", default="all", help=f"one of {sorted(reports.SUITES)} or all")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("figure", parents=[common, grid], help="emit a figure dataset")
    p.add_argument("--name", choices=FIGURES, required=True)
    p.add_argument("--n-max", type=int, default=None)
    p.set_defaults(func=cmd_figure)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    if args.format is None:
        args.format = "json" if args.command == "verify" else "csv"
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        sys.stderr.write(f"{parser.prog} {args.command}: error: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
