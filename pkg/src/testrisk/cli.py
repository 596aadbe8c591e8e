"""Command-line front end.

Exit codes: 0 ok, 1 validation findings at error level (or other domain
errors), 2 usage or input parse errors.  Machine output goes to stdout,
diagnostics to stderr.  ``--config -`` reads the plan from stdin, so
subcommands compose in pipes (``testrisk defaults | testrisk matrix
--config - --format csv``).
"""

from __future__ import annotations

import argparse
import os
import sys

from .calibration import calibrate_density, dre_of_phase, dre_profile
from .errors import ParseError, SchemaError, TestRiskError
from .persistence import (
    canonical_json,
    format_number,
    load_history_csv,
    load_plan,
    prediction_from_spec,
    render_matrix,
    render_scope,
    save_plan,
    scenario_result_to_jsonable,
)
from .planning import Scenario, apply_scenario, default_plan
from .matrix import extend_scope_matrix


def _out_bytes(data: bytes):
    sys.stdout.buffer.write(data)
    sys.stdout.buffer.flush()


def _out(text: str):
    sys.stdout.write(text)
    sys.stdout.flush()


def _diag(text: str):
    sys.stderr.write(text + "\n")


def _read_config(path: str) -> bytes:
    if path == "-":
        return sys.stdin.buffer.read()
    with open(path, "rb") as fh:
        return fh.read()


def _print_findings(findings):
    for f in findings:
        _diag(f"{f.severity}: {f.location}: {f.message}")


def _cmd_estimate(args) -> int:
    spec = {}
    if args.loc is not None:
        spec["loc"] = args.loc
    if args.fp is not None:
        spec["fp"] = args.fp
    if args.loc_per_fp is not None:
        spec["loc_per_fp"] = args.loc_per_fp
    if args.defects_per_fp is not None:
        spec["defects_per_fp"] = args.defects_per_fp
    if args.defects_per_kloc is not None:
        spec["defects_per_kloc"] = args.defects_per_kloc
    if args.adjust is not None:
        spec["adjustment"] = args.adjust
    if args.range_low is not None or args.range_high is not None:
        spec["range_factors"] = [args.range_low or 0.8125, args.range_high or 1.75]
    prediction, _ = prediction_from_spec(spec, location="flags")
    if args.json:
        _out_bytes(canonical_json(prediction.to_jsonable()))
    else:
        _out(f"predicted: {format_number(round(prediction.nominal, 10))}\n")
        _out(
            f"range: {format_number(round(prediction.low, 10))} - "
            f"{format_number(round(prediction.high, 10))}\n"
        )
        _out(f"method: {prediction.method}\n")
    return 0


def _cmd_matrix(args) -> int:
    plan = load_plan(_read_config(args.config))
    if args.strict:
        from dataclasses import replace

        plan = replace(plan, options=replace(plan.options, strict_validation=True))
    matrix = plan.build()
    _out(render_matrix(matrix, args.format))
    _print_findings(matrix.findings)
    return 1 if matrix.has_errors() else 0


def _cmd_scope(args) -> int:
    if args.config is not None:
        scope = load_plan(_read_config(args.config)).scope
    else:
        from .matrix import default_scope_matrix

        scope = default_scope_matrix()
    if args.add_activity:
        name, _, grades = args.add_activity.partition(":")
        scope = extend_scope_matrix(
            scope, new_activity=(name, [g.strip() for g in grades.split(",")])
        )
    _out(render_scope(scope, args.format))
    return 0


def _parse_set(pairs: list[str]) -> dict:
    overrides = {}
    for pair in pairs:
        path, sep, value = pair.partition("=")
        if not sep:
            raise SchemaError(f"--set needs path=value, got {pair!r}", "set")
        overrides[path] = value
    return overrides


def _cmd_whatif(args) -> int:
    plan = load_plan(_read_config(args.config))
    scenario = Scenario(name=args.name, base=plan, overrides=_parse_set(args.set))
    result = apply_scenario(scenario)
    if args.format == "json":
        _out_bytes(canonical_json(scenario_result_to_jsonable(result)))
    else:
        _out(f"## Scenario: {result.name}\n\n")
        _out(render_matrix(result.matrix, "markdown"))
        _out("\nDeltas vs base:\n\n")
        levels = list(result.deltas)
        header = ["DELTA"] + levels
        rows = [
            ["DELIVERED DEFECTS"]
            + [format_number(result.deltas[n].delivered_defects) for n in levels],
            ["STAFF WEEKS"]
            + [format_number(result.deltas[n].staff_weeks) for n in levels],
            ["CALENDAR WEEKS"]
            + [format_number(result.deltas[n].calendar_weeks) for n in levels],
        ]
        _out("| " + " | ".join(header) + " |\n")
        _out("| " + " | ".join("---" for _ in header) + " |\n")
        for row in rows:
            _out("| " + " | ".join(row) + " |\n")
        if result.selection_delta is not None:
            _out(
                f"\nselected level: {result.selected_level} "
                f"(delivered delta {format_number(result.selection_delta)})\n"
            )
    _print_findings(result.matrix.findings)
    return 1 if result.matrix.has_errors() else 0


def _cmd_calibrate_dre(args) -> int:
    histories = load_history_csv(_read_config(args.history))
    if not histories:
        _diag("error: empty-history: no releases in history file")
        return 1
    out_rows = []
    for h in histories:
        if args.phase:
            entries = [dre_of_phase(h, args.phase)]
            notes = []
        else:
            profile = dre_profile(h)
            entries, notes = profile.entries, profile.notes
        for e in entries:
            out_rows.append((h.release_name, e))
        for note in notes:
            _diag(f"note: {h.release_name}: {note}")
    if args.json:
        _out_bytes(
            canonical_json(
                [dict(release=r, **e.to_jsonable()) for r, e in out_rows]
            )
        )
    else:
        _out("release,phase,efficiency,found,subsequent,caution\n")
        for r, e in out_rows:
            _out(
                f"{r},{e.phase_name},{format_number(round(e.efficiency, 10))},"
                f"{e.found},{e.subsequent},{'yes' if e.caution else 'no'}\n"
            )
    return 0


def _cmd_calibrate_density(args) -> int:
    histories = load_history_csv(
        _read_config(args.history), sizes=_read_config(args.sizes)
    )
    params, notes = calibrate_density(histories, weighted=args.weighted)
    for note in notes:
        _diag(f"note: {note}")
    if args.json:
        _out_bytes(
            canonical_json(
                {
                    "defects_per_fp": params.defects_per_fp,
                    "defects_per_kloc": params.defects_per_kloc,
                    "adjustment": params.adjustment,
                }
            )
        )
    else:
        _out(f"defects_per_fp: {format_number(round(params.defects_per_fp, 10))}\n")
        _out(
            f"defects_per_kloc: {format_number(round(params.defects_per_kloc, 10))}\n"
        )
    return 0


def _cmd_serve(args) -> int:
    from .service import serve

    serve(port=args.port, session_ttl=args.session_ttl, static_dir=args.static_dir)
    return 0


def _cmd_defaults(args) -> int:
    _out_bytes(save_plan(default_plan()))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="testrisk",
        description="Test-effort risk planning: defect predictions, risk/scope "
        "matrices, and what-if scenarios.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("estimate", help="predict defects from size inputs")
    p.add_argument("--loc", type=float)
    p.add_argument("--fp", type=float)
    p.add_argument("--loc-per-fp", dest="loc_per_fp", type=float)
    p.add_argument("--defects-per-fp", dest="defects_per_fp", type=float)
    p.add_argument("--defects-per-kloc", dest="defects_per_kloc", type=float)
    p.add_argument("--adjust", type=float)
    p.add_argument("--range-low", dest="range_low", type=float)
    p.add_argument("--range-high", dest="range_high", type=float)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_estimate)

    p = sub.add_parser("matrix", help="build and render the risk matrix")
    p.add_argument("--config", required=True, help="plan file, or - for stdin")
    p.add_argument("--format", choices=["md", "markdown", "csv", "json"], default="md")
    p.add_argument("--strict", action="store_true")
    p.set_defaults(func=_cmd_matrix)

    p = sub.add_parser("scope", help="render the scope matrix")
    p.add_argument("--config")
    p.add_argument(
        "--add-activity",
        dest="add_activity",
        help="NAME:grade,grade,... (one grade per scope level)",
    )
    p.add_argument("--format", choices=["md", "markdown", "csv", "json"], default="md")
    p.set_defaults(func=_cmd_scope)

    p = sub.add_parser("whatif", help="apply overrides and show deltas")
    p.add_argument("--config", required=True)
    p.add_argument("--set", action="append", default=[], metavar="PATH=VALUE")
    p.add_argument("--name", default="whatif")
    p.add_argument("--format", choices=["md", "markdown", "json"], default="md")
    p.set_defaults(func=_cmd_whatif)

    p = sub.add_parser("calibrate", help="derive DRE or density from history")
    cal = p.add_subparsers(dest="calibrate_command", required=True)
    pd = cal.add_parser("dre", help="DRE profile from phase history")
    pd.add_argument("--history", required=True)
    pd.add_argument("--phase")
    pd.add_argument("--json", action="store_true")
    pd.set_defaults(func=_cmd_calibrate_dre)
    pc = cal.add_parser("density", help="density rates from sized history")
    pc.add_argument("--history", required=True)
    pc.add_argument("--sizes", required=True)
    pc.add_argument("--weighted", action="store_true")
    pc.add_argument("--json", action="store_true")
    pc.set_defaults(func=_cmd_calibrate_density)

    p = sub.add_parser("serve", help="run the HTTP service")
    p.add_argument(
        "--port", type=int, default=int(os.environ.get("TESTRISK_PORT", "8080"))
    )
    p.add_argument("--session-ttl", dest="session_ttl", type=float, default=24 * 3600.0)
    p.add_argument("--static-dir", dest="static_dir")
    p.set_defaults(func=_cmd_serve)

    p = sub.add_parser("defaults", help="emit the default plan document")
    p.set_defaults(func=_cmd_defaults)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ParseError, SchemaError) as exc:
        loc = f" ({exc.location})" if exc.location else ""
        _diag(f"error: {exc.code}: {exc.message}{loc}")
        return 2
    except TestRiskError as exc:
        loc = f" ({exc.location})" if exc.location else ""
        _diag(f"error: {exc.code}: {exc.message}{loc}")
        return 1
    except OSError as exc:
        _diag(f"error: io: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
