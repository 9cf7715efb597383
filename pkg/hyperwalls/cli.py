#!/usr/bin/env python3
"""
Command-line front end: one subcommand per analysis, reports on standard output.

Usage:
    python -m hyperwalls.cli volume --arrangement extended --n 4
    python -m hyperwalls.cli tangent --t-squared 16/25
    python -m hyperwalls.cli slice --arrangement family22 --t 0.8 --base A --format svg --out slice_A.svg

Exit codes: 0 verdict computed, 1 when the input is refused or a fit fails, 2 internal error.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd

from hyperwalls.arrangement import (
    Arrangement,
    Parameter,
    builtin,
    coxeter_diagram,
    ideal_vertices,
    l_matrix,
    m_matrix,
    n_matrix,
    relation_matrix,
    roll_matrix,
    sigma_matrix,
    symmetry_census,
    t_for_n,
    verify_symmetry,
)
from hyperwalls.errors import HyperwallsError, LiteralError, PreconditionError
from hyperwalls.infinity import cuboctahedron_limit, render_slice_svg, slice_figure, sphere_table
from hyperwalls.minkowski import RelationKind
from hyperwalls.scalar import PI_OVER_COS_SQ, parse_exact
from hyperwalls.tangent import SystemMode, build_system, solve_kernel
from hyperwalls.vinberg import arithmeticity_check, finite_volume_check, transition_scan

logger = logging.getLogger(__name__)

ARRANGEMENT_CHOICES = "p24|gamma22|family22|extended|l6|cuboctahedron|file:PATH"
DEFAULT_WATCH = "-0,+1,+3,+5;+1,+3,+5,+7"
DEFAULT_GRID = "2/5,1/2,11/20,3/5,7/10"


class UsageError(Exception):
    """Bad command line."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class CommandResult:
    report: dict
    summary: list[str] = field(default_factory=list)
    frame: pd.DataFrame | None = None
    figure: object = None


# --- inputs -------------------------------------------------------------------

def resolve_parameter(args) -> tuple[Parameter | None, dict]:
    """Parameter from --t-squared, --n or --t, plus the fields echoed in the report."""
    given = [name for name in ("t_squared", "n", "t") if getattr(args, name, None) is not None]
    if len(given) > 1:
        raise UsageError("give at most one of --t-squared, --n, --t")
    if args.t_squared is not None:
        value = parse_exact(args.t_squared)
        return Parameter.exact(value, literal=args.t_squared), {"t_squared": args.t_squared}
    if args.n is not None:
        if args.n in PI_OVER_COS_SQ:
            value = t_for_n(args.n)
            return Parameter.exact(value, literal=str(value)), {"n": args.n, "t_squared": str(value)}
        value = t_for_n(args.n, exact=False)
        logger.warning("cos^2(pi/%d) is not exact here; using float t^2 = %r", args.n, value)
        return Parameter.numeric(value ** 0.5), {"n": args.n, "t": value ** 0.5}
    if args.t is not None:
        return Parameter.numeric(args.t, literal=repr(args.t)), {"t": args.t}
    return None, {}


def load_arrangement(args, default: str = "p24") -> tuple[Arrangement, dict]:
    parameter, echo = resolve_parameter(args)
    name = args.arrangement or default
    if name.startswith("file:"):
        if parameter is not None:
            raise PreconditionError("a file arrangement carries its own parameter; drop --t-squared/--n/--t")
        path = Path(name[len("file:"):])
        try:
            data = json.loads(path.read_text())
        except FileNotFoundError:
            raise PreconditionError(f"arrangement file {path} not found") from None
        except json.JSONDecodeError as exc:
            raise LiteralError(f"arrangement file {path} is not JSON: {exc}") from exc
        arr = Arrangement.from_json(data)
    else:
        arr = builtin(name, parameter)
    echo = {"arrangement": arr.name, "parameter": str(arr.parameter), **echo}
    return arr, echo


def _parse_labels(text: str) -> list[tuple[str, ...]]:
    return [tuple(label.strip() for label in group.split(",") if label.strip())
            for group in text.split(";") if group.strip()]


# --- commands -----------------------------------------------------------------

def cmd_relations(args) -> CommandResult:
    arr, echo = load_arrangement(args)
    matrix = relation_matrix(arr)
    counts = matrix.counts()
    # the embedded arrangement lets file: read this report back
    report = {**echo, "name": arr.name, "arrangement": arr.to_json(), "relations": matrix.to_json()}
    summary = [f"{arr.name} at t = {arr.parameter}"] + [f"  {code}: {n}" for code, n in sorted(counts.items())]
    return CommandResult(report, summary, matrix.to_frame().rename_axis("wall").reset_index())


def cmd_diagram(args) -> CommandResult:
    arr, echo = load_arrangement(args)
    diagram = coxeter_diagram(arr)
    summary = [f"{a} -- {b}: {diagram.label(a, b)}" for a, b in diagram.edges()]
    if diagram.flagged:
        summary.append(f"generic angles: {', '.join(f'{a}-{b}' for a, b in diagram.flagged)}")
    frame = pd.DataFrame([{"first": a, "second": b, "label": diagram.label(a, b)} for a, b in diagram.edges()])
    return CommandResult({**echo, "diagram": diagram.to_json()}, summary, frame)


def cmd_volume(args) -> CommandResult:
    arr, echo = load_arrangement(args, default="extended")
    verdict = finite_volume_check(arr, allow_generic=args.allow_generic)
    summary = [
        f"{verdict.status.value}",
        f"  edges: {len(verdict.edges)}, finite vertices: {len(verdict.finite_vertices)}, "
        f"finite edge ends: {verdict.finite_edge_ends}, cusps: {len(verdict.cusp_vertices)}",
    ] + [f"  bad edge: {{{','.join(e)}}}" for e in verdict.bad_edges]
    return CommandResult({**echo, **verdict.to_json()}, summary)


def cmd_arithmetic(args) -> CommandResult:
    arr, echo = load_arrangement(args, default="extended")
    report = arithmeticity_check(arr)
    summary = [report.verdict.value, f"  cycles checked: {report.cycles_checked}"]
    summary += [f"  failing cycle {'-'.join(c)}: {p}" for c, p in report.failing_cycles]
    return CommandResult({**echo, **report.to_json()}, summary)


def _tangent(args, mode: SystemMode) -> CommandResult:
    arr, echo = load_arrangement(args, default="family22")
    report = solve_kernel(build_system(arr, mode))
    summary = [f"{mode.value} at t^2 = {arr.parameter}: kernel dimension {report.dimension}"]
    if report.matched_closed_form is not None:
        summary.append(f"  proportional to the closed-form tangent: {report.matched_closed_form}")
    return CommandResult({**echo, **report.to_json()}, summary)


def cmd_tangent(args) -> CommandResult:
    mode = SystemMode.LETTER_SLICE if args.mode == "letters" else SystemMode.GAMMA22_SLICE
    return _tangent(args, mode)


def cmd_rigidity(args) -> CommandResult:
    return _tangent(args, SystemMode.LAMBDA_RIGIDITY)


def cmd_spheres(args) -> CommandResult:
    arr, echo = load_arrangement(args, default="family22")
    spheres = sphere_table(arr)
    rows = []
    for s in spheres:
        if s.is_plane:
            rows.append({"label": s.label, "kind": "plane", "nx": s.normal[0], "ny": s.normal[1],
                         "nz": s.normal[2], "offset": s.offset})
        else:
            rows.append({"label": s.label, "kind": "sphere", "cx": s.center[0], "cy": s.center[1],
                         "cz": s.center[2], "radius": s.radius})
    summary = []
    for s in spheres:
        if s.is_plane:
            summary.append(f"{s.label:>3}  plane  n = ({', '.join(f'{c:.6f}' for c in s.normal)}), offset {s.offset:.6f}")
        else:
            summary.append(f"{s.label:>3}  sphere center ({', '.join(f'{c:.6f}' for c in s.center)}), radius {s.radius:.6f}")
    return CommandResult({**echo, "spheres": [s.to_json() for s in spheres]}, summary, pd.DataFrame(rows))


def cmd_slice(args) -> CommandResult:
    if not args.base:
        raise UsageError("slice needs --base WALL")
    arr, echo = load_arrangement(args, default="family22")
    figure = slice_figure(arr, args.base)
    summary = [f"slice along {figure.base}: {len(figure.curves)} curves"]
    summary += [f"  {c.label:>3} {c.kind:<6} {c.code}" for c in figure.curves]
    frame = pd.DataFrame([{"label": c.label, "kind": c.kind, "code": c.code, "angle_degrees": c.angle_degrees}
                          for c in figure.curves])
    return CommandResult({**echo, **figure.to_json()}, summary, frame, figure)


def cmd_scan(args) -> CommandResult:
    arr, echo = load_arrangement(args, default="family22")
    watch = _parse_labels(args.walls or DEFAULT_WATCH)
    grid = [parse_exact(item) for item in (args.grid or DEFAULT_GRID).split(",") if item.strip()]
    table = transition_scan(arr, watch, grid, progress=args.progress)
    changes = [{"walls": list(s), "from_t_squared": str(a), "to_t_squared": str(b),
                "from": str(c1), "to": str(c2)} for s, a, b, c1, c2 in table.changes]
    summary = [f"{len(table.changes)} class changes"] + [
        f"  {{{','.join(c['walls'])}}}: {c['from']} -> {c['to']} between t^2 = {c['from_t_squared']} and {c['to_t_squared']}"
        for c in changes]
    report = {**echo, "grid": [str(g) for g in grid], "changes": changes,
              "rows": table.to_frame().to_dict(orient="records")}
    return CommandResult(report, summary, table.to_frame())


def cmd_limit(args) -> CommandResult:
    arr = cuboctahedron_limit()
    matrix = relation_matrix(arr)
    vertices = ideal_vertices(arr)
    orthogonal = len(matrix.pairs(RelationKind.ORTHOGONAL))
    non_right = [pair for pair, rel in matrix.relations.items()
                 if rel.intersecting and rel.kind is not RelationKind.ORTHOGONAL]
    report = {"arrangement": arr.to_json(), "parameter": str(arr.parameter), "walls": len(arr),
              "orthogonal_pairs": orthogonal, "ideal_vertices": len(vertices),
              "non_right_angles": [list(p) for p in non_right]}
    summary = [f"{len(arr)} walls, {orthogonal} orthogonal pairs, {len(vertices)} ideal vertices"]
    return CommandResult(report, summary, matrix.to_frame().rename_axis("wall").reset_index())


def cmd_symmetry(args) -> CommandResult:
    arr, echo = load_arrangement(args)
    named = {"L": l_matrix(), "M": m_matrix(), "N": n_matrix(), "R": roll_matrix()}
    permutations = {name: verify_symmetry(arr, g) for name, g in named.items()}
    permutations["sigma"] = verify_symmetry(arr, sigma_matrix(), reparametrize="inverse")
    report = {**echo, "permutations": permutations}
    summary = [f"{name}: {'symmetry' if perm is not None else 'not a symmetry'}" for name, perm in permutations.items()]
    if arr.name == "P24":
        census = symmetry_census(arr, progress=args.progress)
        report["census"] = {"order": census.order, "integer_entries": census.integer_entries,
                            "octet_preserving": census.octet_preserving, "gh_stabilizer": census.gh_stabilizer}
        summary.append(f"group order {census.order}, integer {census.integer_entries}, "
                       f"octet-preserving {census.octet_preserving}, G/H stabilizer {census.gh_stabilizer}")
    return CommandResult(report, summary)


def cmd_vertices(args) -> CommandResult:
    arr, echo = load_arrangement(args)
    records = ideal_vertices(arr)
    ranks: dict[int, int] = {}
    for r in records:
        ranks[r.cusp_rank] = ranks.get(r.cusp_rank, 0) + 1
    report = {**echo, "vertices": [r.to_json() for r in records], "ranks": {str(k): v for k, v in sorted(ranks.items())}}
    summary = [f"{len(records)} ideal vertices"] + [f"  rank {k}: {v}" for k, v in sorted(ranks.items())]
    frame = pd.DataFrame([{"incident": " ".join(r.incident), "cusp_rank": r.cusp_rank} for r in records])
    return CommandResult(report, summary, frame)


COMMANDS = {
    "relations": (cmd_relations, "Pairwise relation matrix"),
    "diagram": (cmd_diagram, "Coxeter diagram"),
    "volume": (cmd_volume, "Finite-volume check on elliptic and parabolic subdiagrams"),
    "arithmetic": (cmd_arithmetic, "Arithmeticity cycle criterion"),
    "tangent": (cmd_tangent, "Zariski tangent space in the slice"),
    "rigidity": (cmd_rigidity, "Infinitesimal rigidity with the angle pairs fixed"),
    "spheres": (cmd_spheres, "Spheres and planes of the walls at infinity"),
    "slice": (cmd_slice, "Circles cut on one wall's boundary"),
    "scan": (cmd_scan, "Subdiagram classes over a grid of t^2 values"),
    "limit": (cmd_limit, "Cuboctahedron limit at t -> 0"),
    "symmetry": (cmd_symmetry, "Symmetry checks and the 24-cell census"),
    "vertices": (cmd_vertices, "Ideal vertices and cusp ranks"),
}


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--arrangement", type=str, default=None, help=f"Arrangement: {ARRANGEMENT_CHOICES}")
    common.add_argument("--t-squared", type=str, default=None, help='Exact t^2, e.g. "1/3" or "(11+4*sqrt5)/41"')
    common.add_argument("--n", type=int, default=None, help="Use t_n with nu(t_n) = n")
    common.add_argument("--t", type=float, default=None, help="Float parameter t")
    common.add_argument("--format", type=str, default="json", choices=["json", "csv", "text", "svg"],
                        help="Output format")
    common.add_argument("--out", type=str, default=None, help="Write the report to this path")
    common.add_argument("--verbose", action="store_true", help="Debug logging")

    parser = _Parser(description="Hyperbolic reflection-wall arrangements")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, parents=[common], help=help_text, description=help_text)
        if name == "volume":
            p.add_argument("--allow-generic", action="store_true",
                           help="Audit edges even when some angles are not pi/m")
        if name == "slice":
            p.add_argument("--base", type=str, default=None, help="Wall to slice along")
        if name == "scan":
            p.add_argument("--walls", type=str, default=None,
                           help="Watched subsets, e.g. --walls=-0,+1,+3,+5;+1,+3,+5,+7")
            p.add_argument("--grid", type=str, default=None, help="Comma-separated exact t^2 values")
        if name == "tangent":
            p.add_argument("--mode", type=str, default="gamma22", choices=["gamma22", "letters"],
                           help="Full slice system or the letter walls only")
        if name in ("scan", "symmetry"):
            p.add_argument("--progress", action="store_true", help="Show a progress bar")
    return parser


# --- output -------------------------------------------------------------------

def render(result: CommandResult, fmt: str) -> str | bytes:
    if fmt == "json":
        return json.dumps(result.report, indent=2, sort_keys=True, default=str) + "\n"
    if fmt == "text":
        return "\n".join(result.summary) + "\n"
    if fmt == "csv":
        if result.frame is None:
            raise PreconditionError("this command has no CSV form")
        return result.frame.to_csv(index=False)
    if result.figure is None:
        raise PreconditionError("only the slice command renders SVG")
    buffer = io.BytesIO()
    render_slice_svg(result.figure, buffer)
    return buffer.getvalue()


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"❌ Error: {exc}", file=sys.stderr)
        return 1
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    command, _ = COMMANDS[args.command]
    try:
        output = render(command(args), args.format)
    except (HyperwallsError, UsageError) as exc:
        print(f"❌ Error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        logger.debug("internal error", exc_info=True)
        print(f"❌ Internal error: {exc}", file=sys.stderr)
        return 2
    if args.out:
        mode = "wb" if isinstance(output, bytes) else "w"
        with open(args.out, mode) as fh:
            fh.write(output)
        print(f"✓ {args.command} report written to {args.out}")
    elif isinstance(output, bytes):
        sys.stdout.buffer.write(output)
    else:
        sys.stdout.write(output)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
