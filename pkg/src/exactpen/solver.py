"""Block-wise extreme-point rounding and the descent loops built on it.

One rounding pass solves the n per-block LPs in order, fixing already
rounded blocks at their new vertices, and never increases the penalized
objective. Iterating the pass is a block coordinate descent over the finite
vertex lattice; the continuation and multi-start wrappers are practical
layers on top with no optimality claim of their own.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import BudgetExceededError, DomainError, LpError
from .lp import BASIS_BUDGET, VertexSet, enumerate_vertices, is_vertex, solve_lp
from .model import (
    DEFAULT_TOL,
    BlockPoint,
    Instance,
    check_membership,
    complementarity_residual,
    eval_objective,
    eval_penalized,
    partial_linearization,
)

# A block move must beat the incumbent block value by this much (relative)
# to be accepted; equal-value moves are rejected so descent over the finite
# vertex lattice terminates.
MOVE_TOL = 1e-11
# Default relative sweep-improvement cutoff for bcd_solve.
IMPROVEMENT_TOL = 1e-10


@dataclass(frozen=True)
class SolveOptions:
    beta: float = 0.0
    max_sweeps: int = 50
    improvement_tol: float = IMPROVEMENT_TOL
    seed: int = 0
    beta_schedule: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be >= 1")
        if self.improvement_tol <= 0:
            raise ValueError("improvement_tol must be positive")
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        if self.beta_schedule is not None:
            sched = tuple(float(b) for b in self.beta_schedule)
            if not sched:
                raise ValueError("beta_schedule must be nonempty when given")
            if any(b2 <= b1 for b1, b2 in zip(sched, sched[1:])):
                raise ValueError("beta_schedule must be strictly increasing")
            object.__setattr__(self, "beta_schedule", sched)


@dataclass(frozen=True)
class SolveReport:
    point: BlockPoint
    f_value: float
    p_value: float
    fbeta_value: float
    beta_used: float
    sweeps: int
    block_is_vertex: tuple[bool, ...]
    complementary: bool
    trajectory: tuple[float, ...]
    start_index: int | None = None
    warnings: tuple[str, ...] = ()


def _report(inst: Instance, beta: float, z: BlockPoint, sweeps, traj,
            start_index=None, warnings=()) -> SolveReport:
    f = eval_objective(inst, z)
    p, comp = complementarity_residual(z, DEFAULT_TOL)
    return SolveReport(
        point=z,
        f_value=f,
        p_value=p,
        fbeta_value=f + beta * p,
        beta_used=beta,
        sweeps=sweeps,
        block_is_vertex=tuple(
            is_vertex(inst.polyhedra[i], z.block(i)) for i in range(inst.n_blocks)
        ),
        complementary=comp,
        trajectory=tuple(traj),
        start_index=start_index,
        warnings=tuple(warnings),
    )


def extreme_point_rounding(
    inst: Instance, beta: float, z_hat: BlockPoint
) -> BlockPoint:
    """Round every block of a feasible point onto its vertex set.

    Solves one LP per block in order 0..n-1; block i's cost is the affine
    restriction of the penalized objective with blocks < i already at their
    new vertices and blocks > i still at z_hat. A block only moves when the
    LP strictly improves on its current value or the current value is not a
    vertex, which makes already-optimal vertex inputs exact fixed points and
    never increases the penalized objective.
    """
    n = inst.n_blocks
    for i in range(n):
        if not check_membership(inst.polyhedra[i], z_hat.block(i), DEFAULT_TOL):
            raise DomainError(f"block {i} of the input is not in its polyhedron")
    z = z_hat
    for i in range(n):
        c, _ = partial_linearization(inst, beta, z, i)
        sol = solve_lp(inst.polyhedra[i], c)
        if sol.status == "infeasible":
            raise LpError(f"block {i} subproblem infeasible on malformed input")
        if sol.status == "unbounded":
            raise LpError(
                f"block {i} subproblem unbounded; the model requires compact blocks"
            )
        cur = float(c @ z.block(i))
        move_cut = MOVE_TOL * (1.0 + abs(cur))
        if sol.value < cur - move_cut or not is_vertex(
            inst.polyhedra[i], z.block(i), DEFAULT_TOL
        ):
            z = z.with_block(i, sol.point)
    return z


def bcd_solve(inst: Instance, opts: SolveOptions, z0: BlockPoint) -> SolveReport:
    """Iterate rounding sweeps until a full sweep stops improving.

    The trajectory records the penalized value after each sweep and is
    nonincreasing; termination is guaranteed because every accepted block
    move strictly descends over a finite vertex lattice.
    """
    beta = opts.beta
    z = z0
    traj: list[float] = []
    prev = eval_penalized(inst, beta, z)
    sweeps = 0
    for _ in range(opts.max_sweeps):
        z = extreme_point_rounding(inst, beta, z)
        val = eval_penalized(inst, beta, z)
        traj.append(val)
        sweeps += 1
        if prev - val < opts.improvement_tol * (1.0 + abs(val)):
            break
        prev = val
    return _report(inst, beta, z, sweeps, traj)


def penalty_continuation(
    inst: Instance, opts: SolveOptions, z0: BlockPoint
) -> SolveReport:
    """Run bcd_solve along the beta schedule, warm-starting each stage.

    Returns the final stage's report. The penalty value is expected to be
    nonincreasing along the schedule; increases are recorded as warnings
    rather than asserted, since the descent is only local.
    """
    if opts.beta_schedule is None:
        raise ValueError("penalty_continuation requires opts.beta_schedule")
    z = z0
    warnings: list[str] = []
    last_p: float | None = None
    report = None
    for beta in opts.beta_schedule:
        report = bcd_solve(inst, replace(opts, beta=beta, beta_schedule=None), z)
        z = report.point
        if last_p is not None and report.p_value > last_p + DEFAULT_TOL:
            warnings.append(
                f"penalty rose from {last_p:.3e} to {report.p_value:.3e} at beta={beta}"
            )
        last_p = report.p_value
    if warnings:
        report = replace(report, warnings=tuple(warnings))
    return report


def _feasible_starts(
    inst: Instance,
    num_starts: int,
    rng: np.random.Generator,
    vertex_sets: list[VertexSet | None],
) -> list[BlockPoint]:
    """Seeded feasible starting points, one list entry per start.

    Blocks with an enumerated vertex set get random convex combinations of
    their vertices; the rest fall back to convex mixes of deterministic and
    random-cost LP vertices, i.e. feasible points jittered by seeded noise.
    """
    starts = []
    for _ in range(num_starts):
        blocks = []
        for i, poly in enumerate(inst.polyhedra):
            vs = vertex_sets[i]
            if vs is not None and len(vs) > 0:
                w = rng.dirichlet(np.ones(len(vs)))
                blocks.append(np.vstack(vs.vertices).T @ w)
            else:
                base = solve_lp(poly, np.zeros(poly.dim))
                if base.status != "optimal":
                    raise LpError(f"block {i} has no feasible point")
                probe = solve_lp(poly, rng.uniform(-1.0, 1.0, poly.dim))
                t = rng.uniform(0.0, 1.0)
                blocks.append((1.0 - t) * base.point + t * probe.point)
        starts.append(BlockPoint.from_blocks(blocks))
    return starts


def multi_start(
    inst: Instance,
    opts: SolveOptions,
    num_starts: int,
    vertex_sets: list[VertexSet | None] | None = None,
    vertex_budget: int = BASIS_BUDGET,
) -> SolveReport:
    """Best report over num_starts seeded starts; ties keep the earliest start.

    Runs penalty_continuation when opts carries a schedule, else bcd_solve.
    Deterministic for a fixed seed.
    """
    if num_starts < 1:
        raise ValueError("num_starts must be >= 1")
    if vertex_sets is None:
        vertex_sets = []
        for poly in inst.polyhedra:
            try:
                vertex_sets.append(enumerate_vertices(poly, budget=vertex_budget))
            except BudgetExceededError:
                vertex_sets.append(None)
    rng = np.random.default_rng(opts.seed)
    starts = _feasible_starts(inst, num_starts, rng, list(vertex_sets))
    best: SolveReport | None = None
    for k, z0 in enumerate(starts):
        if opts.beta_schedule is not None:
            rep = penalty_continuation(inst, opts, z0)
        else:
            rep = bcd_solve(inst, opts, z0)
        rep = replace(rep, start_index=k)
        if best is None or rep.fbeta_value < best.fbeta_value:
            best = rep
    return best
