"""Command-line entry point ``grigid``.

Exit status: 0 when every verdict is PASS or INFO, 1 when any verdict is
FAIL, 2 for usage errors and unreadable inputs.
"""

from __future__ import annotations

import argparse
import os
import shlex
import sys

from . import __version__
from .affine import CantorStage, cantor_refine, certify_affine
from .attractor import chaos_game
from .cover import NotAxisAlignedError, certify_lipschitz
from .directions import admissible_rotations, phi_image
from .fitting import VerdictConfig, fit_similitudes, rigidity_verdict, self_similarity_residual
from .graph import (UNIT, Affine, CantorLebesgue, Interval, Rectangle, SampledGraph, Takagi,
                    Weierstrass, framing_rectangle, parse_metadata, sample)
from .ifsfile import IfsParseError, IfsValidationError, parse_angle, read_ifs
from .report import (Report, add_ifs, affine_block, cover_block, fit_fields, rigidity_block,
                     sha256_file)
from .svg import Style, render_svg

FUNCTIONS = ("affine", "takagi", "weierstrass", "cantor", "csv")


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("GRIGID_SEED")
    if raw is None or raw == "":
        return 0
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"GRIGID_SEED must be an integer, got {raw!r}") from None


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _graph_args(p: argparse.ArgumentParser, default_function: str | None = "takagi") -> None:
    g = p.add_argument_group("graph")
    g.add_argument("--function", choices=FUNCTIONS, default=default_function)
    g.add_argument("--a", type=float, default=None,
                   help="slope (affine) or amplitude ratio (weierstrass, default 0.5)")
    g.add_argument("--b", type=float, default=None,
                   help="intercept (affine) or odd frequency (weierstrass, default 3)")
    g.add_argument("--depth", type=int, default=None, help="series depth")
    g.add_argument("--n", type=int, default=2048, help="grid intervals (nodes = n + 1)")
    g.add_argument("--csv", default=None, help="sampled graph x,y for --function csv")
    g.add_argument("--eval-error", type=float, default=0.0,
                   help="declared evaluation error for --function csv")


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", default=None, help="write output here instead of stdout")
    p.add_argument("--seed", type=int, default=None, help="RNG seed (default: $GRIGID_SEED or 0)")
    p.add_argument("--threads", type=int, default=1, help="parallelism cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grigid", description="Self-similarity tools for function graphs.")
    parser.add_argument("--version", action="version", version=f"grigid {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("render", help="write an SVG figure")
    _graph_args(p)
    _common(p)
    p.add_argument("--ifs", default=None)
    p.add_argument("--frames", action="store_true", help="overlay first-level framing rectangles S_i(R)")
    p.add_argument("--cantor-stage", type=int, default=0, help="overlay this Cantor stage")
    p.add_argument("--attractor", type=int, default=0, help="overlay N chaos-game points")
    p.add_argument("--directions", type=float, default=None, help="inset direction set seen from x")
    p.add_argument("--title", default="")

    p = sub.add_parser("verify", help="self-similarity residual of an IFS against a graph")
    _graph_args(p)
    _common(p)
    p.add_argument("--ifs", required=True)
    p.add_argument("--tol", type=float, default=None, help="default: 2h + 4 eval_error")

    p = sub.add_parser("certify-lipschitz", help="cover certificate for the 4 omega_f bound")
    _graph_args(p)
    _common(p)
    p.add_argument("--ifs", required=True)
    p.add_argument("--deltas", type=_floats, default=None)
    p.add_argument("--pair-budget", type=int, default=1024)

    p = sub.add_parser("certify-affine", help="Cantor refinement certificate")
    _graph_args(p)
    _common(p)
    p.add_argument("--ifs", required=True)
    p.add_argument("--stages", type=int, default=10)
    p.add_argument("--target", type=_floats, default=None, help="interval a,b (default 0,1)")

    p = sub.add_parser("classify-rotation", help="rotation class and admissibility of angles")
    _graph_args(p)
    _common(p)
    p.add_argument("--angle", action="append", required=True,
                   help="radians or pi literal such as pi/3 or 2*pi/5; repeatable")
    p.add_argument("--tol", type=float, default=1e-9)

    p = sub.add_parser("fit", help="fit k similitudes to a graph")
    _graph_args(p)
    _common(p)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--budget", type=int, default=4000)
    p.add_argument("--free", action="store_true", help="allow any rotation angle")

    p = sub.add_parser("verdict", help="affine or non-self-similar-consistent classification")
    _graph_args(p)
    _common(p)
    p.add_argument("--tol", type=float, default=None, help="affine tolerance")
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--budget", type=int, default=4000)
    p.add_argument("--free", action="store_true")
    return parser


def load_graph(args) -> SampledGraph:
    if args.n < 2:
        raise UsageError("--n must be >= 2")
    f = args.function
    if f == "affine":
        return sample(Affine(1.0 if args.a is None else args.a, 0.0 if args.b is None else args.b), args.n)
    if f == "takagi":
        return sample(Takagi(52 if args.depth is None else args.depth), args.n)
    if f == "weierstrass":
        b = 3 if args.b is None else args.b
        if b != int(b):
            raise UsageError("--b must be an odd integer for weierstrass")
        return sample(Weierstrass(0.5 if args.a is None else args.a, int(b),
                                  40 if args.depth is None else args.depth), args.n)
    if f == "cantor":
        return sample(CantorLebesgue(40 if args.depth is None else args.depth), args.n)
    if args.csv is None:
        raise UsageError("--function csv needs --csv PATH")
    with open(args.csv, encoding="utf-8") as fh:
        text = fh.read()
    # an optional metadata header ("# key = value") may precede the x,y table
    meta_lines = [ln[1:] for ln in text.splitlines() if ln.startswith("#")]
    table = "\n".join(ln for ln in text.splitlines() if not ln.startswith("#"))
    meta = parse_metadata("\n".join(meta_lines)) if meta_lines else {}
    err = float(meta.get("eval_error", args.eval_error))
    return SampledGraph.from_csv(table, eval_error=max(err, args.eval_error), label="csv")


def _start_report(args, argv, g: SampledGraph | None) -> Report:
    rep = Report(__version__)
    rep.add_header("argv", shlex.join(argv))
    rep.add_header("command", args.command)
    rep.add_header("seed", args.seed)
    rep.add_header("threads", args.threads)
    if getattr(args, "ifs", None):
        rep.add_header("input.ifs", args.ifs)
        rep.add_header("input.ifs.sha256", sha256_file(args.ifs))
    if getattr(args, "csv", None) and args.function == "csv":
        rep.add_header("input.csv", args.csv)
        rep.add_header("input.csv.sha256", sha256_file(args.csv))
    if g is not None:
        rep.add_header("graph.function", g.label)
        for k, v in g.params.items():
            rep.add_header(f"graph.{k}", v)
        rep.add_header("graph.n", g.n)
        rep.add_header("graph.h", g.h)
        rep.add_header("graph.eval_error", g.eval_error)
        rep.add_header("graph.modulus", g.modulus())
    return rep


def _cmd_render(args, argv) -> tuple[str, int]:
    g = load_graph(args)
    objects: list = [g]
    ifs = read_ifs(args.ifs) if args.ifs else None
    if (args.frames or args.cantor_stage or args.attractor) and ifs is None:
        raise UsageError("--frames, --cantor-stage and --attractor need --ifs")
    if args.frames:
        R = framing_rectangle(g, UNIT)
        objects.append([_image_rect(m, R) for m in ifs.maps])
    if args.attractor:
        objects.append(chaos_game(ifs, args.attractor, rng_seed=args.seed))
    if args.cantor_stage:
        st = CantorStage.initial(UNIT)
        for _ in range(args.cantor_stage):
            st = cantor_refine(ifs, g, st)
        objects.append(st)
    if args.directions is not None:
        x = args.directions
        objects.append(phi_image(g, (x, float(g(x)))))
    return render_svg(objects, Style(title=args.title)), 0


def _image_rect(m, R):
    corners = m(R.corners())
    return Rectangle(Interval(float(corners[:, 0].min()), float(corners[:, 0].max())),
                     Interval(float(corners[:, 1].min()), float(corners[:, 1].max())))


def _cmd_verify(args, argv) -> tuple[str, int]:
    g = load_graph(args)
    ifs = read_ifs(args.ifs)
    rep = _start_report(args, argv, g)
    res = self_similarity_residual(ifs, g)
    tol = args.tol if args.tol is not None else 2.0 * g.h + 4.0 * g.eval_error
    b = rep.block("verify")
    add_ifs(b, ifs)
    b.add("moran_dimension", ifs.moran_dimension())
    b.add("residual", res)
    b.add("tol", tol)
    b.verdict = "PASS" if res <= tol else "FAIL"
    return rep.render(), rep.exit_code()


def _cmd_lipschitz(args, argv) -> tuple[str, int]:
    g = load_graph(args)
    ifs = read_ifs(args.ifs)
    rep = _start_report(args, argv, g)
    kw = {"pair_budget": args.pair_budget}
    if args.deltas:
        kw["deltas"] = args.deltas
    cover_block(rep, certify_lipschitz(ifs, g, **kw))
    return rep.render(), rep.exit_code()


def _cmd_affine(args, argv) -> tuple[str, int]:
    g = load_graph(args)
    ifs = read_ifs(args.ifs)
    if args.target is not None and len(args.target) != 2:
        raise UsageError("--target takes exactly two numbers a,b")
    target = Interval(*args.target) if args.target else UNIT
    rep = _start_report(args, argv, g)
    cover = certify_lipschitz(ifs, g)
    cover_block(rep, cover)
    affine_block(rep, certify_affine(ifs, g, target, args.stages, cover=cover))
    return rep.render(), rep.exit_code()


def _cmd_rotation(args, argv) -> tuple[str, int]:
    g = load_graph(args)
    try:
        angles = [parse_angle(a) for a in args.angle]
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rep = _start_report(args, argv, g)
    result = admissible_rotations(g, angles, tol=args.tol)
    b = rep.block("rotation")
    b.add("tol", args.tol)
    b.add("is_line", result.is_line)
    b.add("line_deviation", result.line_deviation)
    for i, (p, arc) in enumerate(result.arc_reports, start=1):
        b.add(f"base.{i}.point", list(p))
        b.add(f"base.{i}.contains_arc", arc.contains_arc)
        b.add(f"base.{i}.max_gap", arc.max_gap)
        b.add(f"base.{i}.resolution", arc.resolution)
    for i, v in enumerate(result.verdicts, start=1):
        b.add(f"angle.{i}.value", v.angle)
        b.add(f"angle.{i}.class", v.rotation_class)
        b.add(f"angle.{i}.status", v.status)
        b.add(f"angle.{i}.reason", v.reason)
    b.verdict = "INFO"
    return rep.render(), rep.exit_code()


def _cmd_fit(args, argv) -> tuple[str, int]:
    g = load_graph(args)
    rep = _start_report(args, argv, g)
    fit = fit_similitudes(g, args.k, not args.free, args.restarts, args.seed, args.budget,
                          threads=args.threads)
    b = rep.block("fit")
    fit_fields(b, fit)
    b.verdict = "INFO"
    return rep.render(), rep.exit_code()


def _cmd_verdict(args, argv) -> tuple[str, int]:
    g = load_graph(args)
    rep = _start_report(args, argv, g)
    cfg = VerdictConfig(tol_affine=args.tol, k=args.k, restarts=args.restarts, seed=args.seed,
                        budget=args.budget, restrict_rotations=not args.free, threads=args.threads)
    rigidity_block(rep, rigidity_verdict(g, cfg))
    return rep.render(), rep.exit_code()


COMMANDS = {
    "render": _cmd_render,
    "verify": _cmd_verify,
    "certify-lipschitz": _cmd_lipschitz,
    "certify-affine": _cmd_affine,
    "classify-rotation": _cmd_rotation,
    "fit": _cmd_fit,
    "verdict": _cmd_verdict,
}


def run_command(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    """Run one subcommand; returns the exit status instead of exiting."""
    argv = list(sys.argv[1:] if argv is None else argv)
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        return int(exc.code or 0)
    try:
        if args.seed is None:
            args.seed = _default_seed()
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        text, code = COMMANDS[args.command](args, argv)
    except (UsageError, IfsParseError, IfsValidationError, NotAxisAlignedError, OSError,
            ValueError) as exc:
        print(f"grigid: error: {exc}", file=stderr)
        return 2
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        stdout.write(text)
    return code


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
