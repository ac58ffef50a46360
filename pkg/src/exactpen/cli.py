"""Command-line entry point.

Subcommands: gen (emit an instance document), solve (penalized descent),
enumerate (block vertex sets), certify (beta-grid exactness scan), and
probe (error-bound measurements). Every run writes a JSON report; probe
and certify also write a CSV table, and report-bearing commands render PNG
figures next to their outputs unless --no-figures is given. Exit codes:
0 success, 1 model-level failure, 2 usage or document error.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
import time
from pathlib import Path

from .errors import ExactPenError, SchemaError
from .exactness import certify_exactness, find_beta_bar
from .instances import (
    DEFAULT_PROBE_EPSILONS,
    error_bound_probe,
    mmot_instance,
    mmot_optimal_solution,
    mmot_perturbed,
    random_instance,
)
from .lp import enumerate_vertices
from .model import Instance
from .serialize import build_report, emit_instance, emit_report, parse_instance
from .solver import SolveOptions, multi_start

PROBE_CSV_COLUMNS = (
    "epsilon",
    "p_value",
    "dist_upper",
    "ratio",
    "predicted_p",
    "predicted_dist",
)


def _float_list(text: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}")
    if not values:
        raise argparse.ArgumentTypeError("expected at least one value")
    return values


def _add_instance_source(sub: argparse.ArgumentParser, default_k: int = 4) -> None:
    sub.add_argument(
        "--instance",
        type=Path,
        default=None,
        help="instance document to load (overrides --K)",
    )
    sub.add_argument(
        "--K",
        type=int,
        default=default_k,
        help=f"grid size of the built-in transport instance (default {default_k})",
    )


def _add_output_options(sub: argparse.ArgumentParser, default_out: str) -> None:
    sub.add_argument(
        "--out",
        type=Path,
        default=Path(default_out),
        help=f"report path (default {default_out}); side files share its stem",
    )
    sub.add_argument(
        "--no-figures",
        action="store_true",
        help="skip PNG figure rendering",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="exactpen",
        description="Exact-penalty experiments for complementarity-constrained "
        "multi-affine programs.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="write an instance document")
    kinds = gen.add_subparsers(dest="family", required=True)
    gen_mmot = kinds.add_parser("mmot", help="three-marginal transport instance")
    gen_mmot.add_argument("--K", type=int, default=4, help="grid size (default 4)")
    gen_mmot.add_argument(
        "--out", type=Path, default=Path("instance.json"), help="output path"
    )
    gen_mmot.set_defaults(func=_cmd_gen_mmot)
    gen_random = kinds.add_parser("random", help="seeded random instance")
    gen_random.add_argument("--n", type=int, required=True, help="number of blocks")
    gen_random.add_argument("--m", type=int, required=True, help="block dimension")
    gen_random.add_argument("--seed", type=int, default=0, help="generator seed")
    gen_random.add_argument(
        "--out", type=Path, default=Path("instance.json"), help="output path"
    )
    gen_random.set_defaults(func=_cmd_gen_random)

    solve = commands.add_parser(
        "solve", help="run blockwise descent on the penalized objective"
    )
    _add_instance_source(solve)
    solve.add_argument("--beta", type=float, default=0.0, help="penalty weight")
    solve.add_argument(
        "--beta-grid",
        type=_float_list,
        default=None,
        help="increasing schedule; runs continuation instead of a single beta",
    )
    solve.add_argument("--starts", type=int, default=1, help="number of starts")
    solve.add_argument("--seed", type=int, default=0, help="start-sampling seed")
    solve.add_argument(
        "--max-sweeps", type=int, default=50, help="sweep cap per descent run"
    )
    solve.add_argument(
        "--tol",
        type=float,
        default=None,
        help="relative sweep-improvement cutoff (module default if omitted)",
    )
    solve.add_argument(
        "--budget",
        type=int,
        default=None,
        help="basis-subset cap for start-sampling vertex enumeration",
    )
    solve.add_argument(
        "--emit-heatmap",
        action="store_true",
        help="also write the final point's blocks as dense CSV grids",
    )
    _add_output_options(solve, "solve_report.json")
    solve.set_defaults(func=_cmd_solve)

    enum = commands.add_parser("enumerate", help="enumerate block vertex sets")
    _add_instance_source(enum)
    enum.add_argument(
        "--budget", type=int, default=None, help="basis-subset enumeration cap"
    )
    enum.add_argument(
        "--tol", type=float, default=None, help="vertex deduplication tolerance"
    )
    _add_output_options(enum, "enumerate_report.json")
    enum.set_defaults(func=_cmd_enumerate)

    certify = commands.add_parser(
        "certify", help="scan a beta grid for penalty exactness"
    )
    _add_instance_source(certify)
    certify.add_argument(
        "--beta-grid",
        type=_float_list,
        default=None,
        help="betas to scan (default: doubling grid with refinement)",
    )
    certify.add_argument(
        "--beta",
        type=float,
        default=None,
        help="beta for the sampled certificate (default: twice the estimate)",
    )
    certify.add_argument(
        "--samples", type=int, default=1000, help="random feasible points to test"
    )
    certify.add_argument("--seed", type=int, default=0, help="sampling seed")
    certify.add_argument(
        "--tol", type=float, default=None, help="complementarity tolerance"
    )
    certify.add_argument(
        "--budget", type=int, default=None, help="lattice and enumeration cap"
    )
    _add_output_options(certify, "certify_report.json")
    certify.set_defaults(func=_cmd_certify)

    probe = commands.add_parser(
        "probe", help="measure the error-bound counterexample quantities"
    )
    probe.add_argument("--K", type=int, default=8, help="grid size (default 8)")
    probe.add_argument(
        "--eps",
        type=_float_list,
        default=DEFAULT_PROBE_EPSILONS,
        help="comma-separated epsilons (default 0.1,0.01,0.001)",
    )
    probe.add_argument(
        "--emit-heatmap",
        action="store_true",
        help="also write optimal and perturbed blocks as dense CSV grids",
    )
    _add_output_options(probe, "probe_report.json")
    probe.set_defaults(func=_cmd_probe)

    return parser


def _load_instance(args: argparse.Namespace) -> Instance:
    if args.instance is not None:
        return parse_instance(Path(args.instance).read_text(encoding="utf-8"))
    return mmot_instance(args.K)


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")


def _side_path(out: Path, suffix: str) -> Path:
    return out.with_name(out.stem + suffix)


def _write_heatmap_csv(out: Path, tag: str, point) -> list[Path]:
    written = []
    m = point.block_dim
    side = math.isqrt(m)
    for i in range(point.n_blocks):
        x = point.block(i)
        grid = x.reshape(side, side, order="F") if side * side == m else x[None, :]
        path = _side_path(out, f".heatmap.{tag}.block{i}.csv")
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            for row in grid:
                writer.writerow([float(v) for v in row])
        written.append(path)
    return written


def _cmd_gen_mmot(args: argparse.Namespace) -> int:
    inst = mmot_instance(args.K)
    _write_text(args.out, emit_instance(inst))
    print(f"wrote {args.out}")
    return 0


def _cmd_gen_random(args: argparse.Namespace) -> int:
    inst = random_instance(args.n, args.m, args.seed)
    _write_text(args.out, emit_instance(inst))
    for note in inst.warnings:
        print(f"warning: {note}", file=sys.stderr)
    print(f"wrote {args.out}")
    return 0


def _cmd_solve(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    inst = _load_instance(args)
    opt_kwargs = {
        "beta": args.beta,
        "max_sweeps": args.max_sweeps,
        "seed": args.seed,
        "beta_schedule": args.beta_grid,
    }
    if args.tol is not None:
        opt_kwargs["improvement_tol"] = args.tol
    opts = SolveOptions(**opt_kwargs)
    ms_kwargs = {}
    if args.budget is not None:
        ms_kwargs["vertex_budget"] = args.budget
    report = multi_start(inst, opts, args.starts, **ms_kwargs)
    options = {
        "beta": args.beta,
        "beta_grid": list(args.beta_grid) if args.beta_grid else None,
        "starts": args.starts,
        "seed": args.seed,
        "max_sweeps": args.max_sweeps,
        "tol": args.tol,
        "budget": args.budget,
    }
    doc = build_report(
        "solve",
        inst,
        options,
        report,
        {"total_s": time.perf_counter() - t0},
    )
    _write_text(args.out, emit_report(doc))
    written = [args.out]
    if args.emit_heatmap:
        written += _write_heatmap_csv(args.out, "final", report.point)
    if not args.no_figures:
        from . import figures

        written.append(
            figures.save_trajectory_figure(
                report.trajectory, _side_path(args.out, ".trajectory.png")
            )
        )
        written += figures.save_block_heatmaps(
            report.point, _side_path(args.out, ".point")
        )
    for note in report.warnings:
        print(f"warning: {note}", file=sys.stderr)
    print(
        f"f={report.f_value!r} p={report.p_value!r} "
        f"f_beta={report.fbeta_value!r} complementary={report.complementary}"
    )
    print("wrote " + " ".join(str(p) for p in written))
    return 0


def _cmd_enumerate(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    inst = _load_instance(args)
    kwargs = {}
    if args.budget is not None:
        kwargs["budget"] = args.budget
    if args.tol is not None:
        kwargs["dedupe_tol"] = args.tol
    vertex_sets = [enumerate_vertices(poly, **kwargs) for poly in inst.polyhedra]
    options = {"budget": args.budget, "tol": args.tol}
    doc = build_report(
        "enumerate",
        inst,
        options,
        {"blocks": vertex_sets},
        {"total_s": time.perf_counter() - t0},
    )
    _write_text(args.out, emit_report(doc))
    for i, vs in enumerate(vertex_sets):
        print(f"block {i}: {len(vs)} vertices")
    print(f"wrote {args.out}")
    return 0


def _cmd_certify(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    inst = _load_instance(args)
    enum_kwargs = {}
    lattice_kwargs = {}
    if args.budget is not None:
        enum_kwargs["budget"] = args.budget
        lattice_kwargs["budget"] = args.budget
    if args.tol is not None:
        lattice_kwargs["comp_tol"] = args.tol
    vertex_sets = [
        enumerate_vertices(poly, **enum_kwargs) for poly in inst.polyhedra
    ]
    exact = find_beta_bar(
        inst, vertex_sets, grid=args.beta_grid, **lattice_kwargs
    )
    cert_beta = args.beta
    if cert_beta is None:
        if exact.beta_bar_estimate is not None:
            cert_beta = 2.0 * exact.beta_bar_estimate
        else:
            cert_beta = exact.beta_grid[-1]
    cert = certify_exactness(
        inst,
        cert_beta,
        vertex_sets,
        samples=args.samples,
        seed=args.seed,
        **lattice_kwargs,
    )
    options = {
        "beta_grid": list(args.beta_grid) if args.beta_grid else None,
        "beta": args.beta,
        "samples": args.samples,
        "seed": args.seed,
        "tol": args.tol,
        "budget": args.budget,
    }
    doc = build_report(
        "certify",
        inst,
        options,
        {"exactness": exact, "certification": cert},
        {"total_s": time.perf_counter() - t0},
    )
    _write_text(args.out, emit_report(doc))
    csv_path = _side_path(args.out, ".csv")
    with csv_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "beta",
                "penalized_value",
                "feasible_value",
                "penalized_argmin_size",
                "feasible_argmin_size",
                "inclusion_sbar_beta_in_sopt",
                "sets_equal",
            ]
        )
        for rec in exact.records:
            writer.writerow(
                [
                    rec.beta,
                    rec.penalized.value,
                    rec.feasible.value,
                    len(rec.penalized.argmin),
                    len(rec.feasible.argmin),
                    rec.inclusion_sbar_beta_in_sopt,
                    rec.sets_equal,
                ]
            )
    written = [args.out, csv_path]
    if not args.no_figures:
        from . import figures

        written.append(
            figures.save_certify_figure(exact, _side_path(args.out, ".betas.png"))
        )
    print(
        f"beta_bar_estimate={exact.beta_bar_estimate!r} "
        f"vertex_level_equal={cert.vertex_level_equal} "
        f"sampled_violations={cert.sampled_violations}"
    )
    print("wrote " + " ".join(str(p) for p in written))
    return 0


def _cmd_probe(args: argparse.Namespace) -> int:
    t0 = time.perf_counter()
    rows = error_bound_probe(args.K, args.eps)
    inst = mmot_instance(args.K)
    options = {"K": args.K, "eps": list(args.eps)}
    doc = build_report(
        "probe",
        inst,
        options,
        {"K": args.K, "rows": rows},
        {"total_s": time.perf_counter() - t0},
    )
    _write_text(args.out, emit_report(doc))
    csv_path = _side_path(args.out, ".csv")
    with csv_path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(PROBE_CSV_COLUMNS)
        for row in rows:
            writer.writerow(
                [
                    row.epsilon,
                    row.p_value,
                    row.dist_upper,
                    row.ratio,
                    row.predicted_p,
                    row.predicted_dist,
                ]
            )
    written = [args.out, csv_path]
    if args.emit_heatmap:
        written += _write_heatmap_csv(args.out, "optimal", mmot_optimal_solution(args.K))
        written += _write_heatmap_csv(
            args.out, "perturbed", mmot_perturbed(args.K, args.eps[0])
        )
    if not args.no_figures:
        from . import figures

        written.append(
            figures.save_probe_figure(rows, _side_path(args.out, ".ratio.png"))
        )
        written += figures.save_block_heatmaps(
            mmot_perturbed(args.K, args.eps[0]),
            _side_path(args.out, ".perturbed"),
        )
    for row in rows:
        print(f"eps={row.epsilon!r} p={row.p_value!r} ratio={row.ratio!r}")
    print("wrote " + " ".join(str(p) for p in written))
    return 0


def run_cli(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ExactPenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))
