"""Command line front end.

Loads a scenario, runs a checker or a flow evaluation, and writes a
deterministic report (JSON or CSV) or a static SVG.  Exit codes: 0 when
every requested check passed, 1 when a check failed, 2 for usage and
configuration problems, 3 for numerical failures.  The environment
variable REEBFLOW_THREADS caps grid parallelism in the library.
"""

import argparse
import json
import math
import sys
from typing import Optional

from . import __version__
from .errors import ConfigError, NumericalFailure
from .matching import (DEFAULT_K_MAX, DEFAULT_TOL, check_eight_point,
                       check_four_point, counterexample_limit_table,
                       eight_point_case, four_point_triples)
from .reeb import (BoundaryPoint, BumpProfile, QuadrantPoint, Scenario,
                   scenario_from_dict)
from .reports import emit_report, format_float
from .svgplot import render_figure1, render_leaves, render_orbit, save_svg
from .synthesis import DEFAULT_DEPTH, synthesize

X_SIDE = "x_axis"
Y_SIDE = "y_axis"


def _add_io_flags(p: argparse.ArgumentParser, grids: bool = False) -> None:
    p.add_argument("--scenario", help="path to a scenario JSON file")
    p.add_argument("--model", choices=["hyperbolic_g", "counterexample"],
                   help="builtin model, when no scenario file is given")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)
    p.add_argument("--kmax", type=int, default=DEFAULT_K_MAX)
    p.add_argument("--seed", type=int, default=None,
                   help="recorded in the report header for replay")
    p.add_argument("--out", help="report output path (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    if grids:
        p.add_argument("--grid", type=int, default=4,
                       help="points per axis of the check grid")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reebflow",
        description="matching checks and flow synthesis for "
                    "foliation-preserving quadrant maps")
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="run a matching checker")
    check.add_argument("which", choices=["four-point", "eight-point"])
    _add_io_flags(check, grids=True)

    rep = sub.add_parser("reproduce",
                         help="recompute the distorted-map limit table")
    rep.add_argument("which", choices=["section6"])
    _add_io_flags(rep)

    flow = sub.add_parser("flow", help="evaluate the synthesized flow")
    flow.add_argument("which", choices=["eval"])
    _add_io_flags(flow)
    flow.add_argument("--t", type=float, nargs="+", default=[0.5, 1.0])
    flow.add_argument("--point", nargs="+", default=["1.1,0.9"],
                      help="comma pairs; a zero component selects a ray")
    flow.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    flow.add_argument("--override", action="store_true",
                      help="run even if the matching gate fails")

    sqrt = sub.add_parser("sqrt", help="half-time boundary map values")
    _add_io_flags(sqrt)
    sqrt.add_argument("--side", choices=[Y_SIDE, X_SIDE], default=Y_SIDE)
    sqrt.add_argument("--point", type=float, nargs="+", default=[1.0])
    sqrt.add_argument("--depth", type=int, default=DEFAULT_DEPTH)
    sqrt.add_argument("--override", action="store_true")

    plot = sub.add_parser("plot", help="write a static SVG figure")
    plot.add_argument("which", choices=["leaves", "orbit", "figure1"])
    plot.add_argument("--scenario")
    plot.add_argument("--model", choices=["hyperbolic_g", "counterexample"])
    plot.add_argument("--point", default="1.4,1.0",
                      help="orbit start as x,y")
    plot.add_argument("--steps", type=int, default=6)
    plot.add_argument("--out", help="output path (default: <figure>.svg)")
    return parser


def _load_scenario(args, default_model: Optional[str] = None) -> Scenario:
    if getattr(args, "scenario", None):
        try:
            with open(args.scenario, "r", encoding="utf-8") as handle:
                data = json.load(handle)
        except OSError as exc:
            raise ConfigError("cannot read scenario %s: %s"
                              % (args.scenario, exc))
        except ValueError as exc:
            raise ConfigError("scenario %s is not valid JSON: %s"
                              % (args.scenario, exc))
        return scenario_from_dict(data)
    model = getattr(args, "model", None) or default_model
    if model is None:
        raise ConfigError("a --model or --scenario is required")
    return scenario_from_dict({"model": model})


def _scenario_header(scenario: Scenario) -> dict:
    return {"model": scenario.model,
            "beta_amplitude": scenario.beta_amplitude,
            "params": scenario.config.as_dict()}


def _emit(doc: dict, table_report, args) -> None:
    if args.format == "csv":
        text = emit_report(table_report, path=args.out, format="csv")
    else:
        text = emit_report(doc, path=args.out, format="json")
    if args.out is None:
        sys.stdout.write(text)


def _summary(line: str, args) -> None:
    stream = sys.stdout if args.out is not None else sys.stderr
    stream.write(line + "\n")


def _wrap(report, scenario: Scenario, args, extra: Optional[dict] = None) -> dict:
    doc = {"version": __version__, "seed": args.seed,
           "scenario": _scenario_header(scenario)}
    if extra:
        doc.update(extra)
    doc["report"] = report.to_dict() if hasattr(report, "to_dict") else report
    return doc


def _run_check(args) -> int:
    scenario = _load_scenario(args)
    if args.which == "four-point":
        triples = four_point_triples(args.grid)
        report = check_four_point(scenario.homeo, triples, tol=args.tol,
                                  k_max=args.kmax)
    else:
        case = eight_point_case(scenario.config)
        report = check_eight_point(scenario.homeo, case, tol=args.tol,
                                   k_max=args.kmax)
    _emit(_wrap(report, scenario, args), report, args)
    residual = ("none" if report.max_residual is None
                else format_float(report.max_residual))
    _summary("%s: %s (max residual %s, threshold %s)"
             % (report.check, report.verdict, residual,
                format_float(report.threshold)), args)
    return 0 if report.passed() else 1


def _run_reproduce(args) -> int:
    scenario = _load_scenario(args, default_model="counterexample")
    if scenario.model != "counterexample":
        raise ConfigError("the limit table describes the distorted model; "
                          "pass --model counterexample or a matching scenario")
    profile = BumpProfile(scenario.beta_amplitude)
    report = counterexample_limit_table(profile=profile,
                                        config=scenario.config, tol=args.tol)
    _emit(_wrap(report, scenario, args), report, args)
    _summary("%s: %s (max residual %s)"
             % (report.check, report.verdict,
                format_float(report.max_residual)), args)
    return 0 if report.passed() else 1


def _parse_planar_point(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise ConfigError("point must be x,y: %r" % (text,))
    try:
        x, y = float(parts[0]), float(parts[1])
    except ValueError:
        raise ConfigError("point must be numeric: %r" % (text,))
    if not (math.isfinite(x) and math.isfinite(y)) or x < 0.0 or y < 0.0:
        raise ConfigError("point coordinates must be finite and "
                          "nonnegative: %r" % (text,))
    if x == 0.0 and y == 0.0:
        raise ConfigError("the corner is not in the model domain")
    if x == 0.0:
        return BoundaryPoint.on_y_axis(y)
    if y == 0.0:
        return BoundaryPoint.on_x_axis(x)
    return QuadrantPoint.from_xy(x, y)


def _as_pair(point) -> list:
    if isinstance(point, BoundaryPoint):
        if point.side == Y_SIDE:
            return [0.0, point.coord]
        return [point.coord, 0.0]
    return [point.x(), point.y()]


def _run_flow(args) -> int:
    scenario = _load_scenario(args)
    flow = synthesize(scenario.homeo, depth=args.depth, tol=args.tol,
                      override=args.override)
    points = [_parse_planar_point(text) for text in args.point]
    rows = []
    for t in args.t:
        for p in points:
            out = flow.at(t, p)
            if isinstance(p, QuadrantPoint):
                leaf = math.exp(p.leaf_log)
                chart_time = flow.time_coordinate(p)
            else:
                leaf = 0.0
                chart_time = None
            rows.append({"t": t, "input": _as_pair(p),
                         "output": _as_pair(out), "leaf": leaf,
                         "time_coordinate": chart_time})
    extra = {"depth": args.depth}
    if not flow.supported:
        extra["status"] = "unsupported input"
    doc = _wrap(rows, scenario, args, extra=extra)
    if args.format == "csv":
        flat = [{"t": r["t"], "in_x": r["input"][0], "in_y": r["input"][1],
                 "out_x": r["output"][0], "out_y": r["output"][1],
                 "leaf": r["leaf"], "time_coordinate": r["time_coordinate"]}
                for r in rows]
        text = emit_report(flat, path=args.out, format="csv")
        if args.out is None:
            sys.stdout.write(text)
    else:
        _emit(doc, rows, args)
    _summary("flow eval: %d rows" % len(rows), args)
    return 0


def _run_sqrt(args) -> int:
    scenario = _load_scenario(args)
    flow = synthesize(scenario.homeo, depth=args.depth, tol=args.tol,
                      override=args.override)
    ray = flow.flow_y if args.side == Y_SIDE else flow.flow_x
    rows = []
    for coord in args.point:
        out = ray.at(0.5, coord)
        rows.append({"side": args.side, "input": coord,
                     "output": out.coord})
    extra = {"depth": args.depth}
    if not flow.supported:
        extra["status"] = "unsupported input"
    _emit(_wrap(rows, scenario, args, extra=extra), rows, args)
    _summary("sqrt: %d values on %s" % (len(rows), args.side), args)
    return 0


def _run_plot(args) -> int:
    out = args.out or (args.which + ".svg")
    if args.which == "figure1":
        text = render_figure1()
    elif args.which == "leaves":
        scenario = _load_scenario(args, default_model="hyperbolic_g")
        text = render_leaves(model=scenario.model)
    else:
        scenario = _load_scenario(args, default_model="hyperbolic_g")
        start = _parse_planar_point(args.point)
        if not isinstance(start, QuadrantPoint):
            raise ConfigError("orbit start must be interior: %r"
                              % (args.point,))
        text = render_orbit(scenario.homeo, start, forward=args.steps,
                            backward=max(2, args.steps // 2))
    save_svg(text, out)
    sys.stdout.write("wrote %s\n" % out)
    return 0


def run(argv=None) -> int:
    """Parse arguments, dispatch, and map errors to exit codes."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2
    try:
        if args.command == "check":
            return _run_check(args)
        if args.command == "reproduce":
            return _run_reproduce(args)
        if args.command == "flow":
            return _run_flow(args)
        if args.command == "sqrt":
            return _run_sqrt(args)
        return _run_plot(args)
    except ConfigError as exc:
        sys.stderr.write("error: %s\n" % exc)
        return 2
    except NumericalFailure as exc:
        sys.stderr.write("numerical failure: %s\n" % exc)
        return 3


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
