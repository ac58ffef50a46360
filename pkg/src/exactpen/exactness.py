"""Ground-truth oracles over the finite vertex lattice.

Every block polytope here is compact, so each block has finitely many
vertices and the product lattice is finite. Scanning it gives the exact
optimal values of the penalized and the complementarity-constrained
problems at desk scale, which is what the certification routines compare
against. The scans are dense tensor reductions, not loops over tuples.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, DomainError, LatticeInfeasibleError
from .lp import VertexSet, enumerate_vertices
from .model import (
    DEFAULT_TOL,
    BlockPoint,
    Instance,
    eval_objective,
    eval_penalty,
)

# Absolute tolerance for membership in an argmin set.
TIE_TOL = 1e-8
# Hard cap on the number of vertex tuples a lattice scan may touch.
LATTICE_BUDGET = 10_000_000
# Doubling grid used when the caller does not supply one.
DEFAULT_BETA_GRID = tuple(2.0**k for k in range(-4, 13))
# Bisection steps of the refinement pass around the detected threshold.
REFINE_STEPS = 10

CERTIFICATION_SCOPE = (
    "vertex lattice enumerated exhaustively; continuum solution set "
    "spot-checked by randomized convex-combination sampling only"
)


@dataclass(frozen=True)
class LatticeOptima:
    """Exact optimum of a function over the product vertex lattice."""

    value: float
    argmin: tuple[BlockPoint, ...]
    argmin_indices: tuple[tuple[int, ...], ...]
    lattice_size: int
    tie_tol: float

    def index_set(self) -> frozenset[tuple[int, ...]]:
        return frozenset(self.argmin_indices)


@dataclass(frozen=True)
class BetaRecord:
    """Lattice comparison of the penalized and constrained problems at one beta."""

    beta: float
    penalized: LatticeOptima
    feasible: LatticeOptima
    inclusion_sbar_beta_in_sopt: bool
    sets_equal: bool


@dataclass(frozen=True)
class ExactnessReport:
    beta_grid: tuple[float, ...]
    records: tuple[BetaRecord, ...]
    beta_bar_estimate: float | None
    refined: bool
    scope: str = CERTIFICATION_SCOPE


@dataclass(frozen=True)
class CertificationRecord:
    beta: float
    vertex_level_equal: bool
    sampled_violations: int
    samples: int
    seed: int
    penalized: LatticeOptima
    feasible: LatticeOptima
    scope: str = CERTIFICATION_SCOPE


def _block_matrices(
    inst: Instance, vertex_sets: list[VertexSet] | None, budget: int
) -> list[np.ndarray]:
    """Stack each block's vertices into a (count, dim) matrix."""
    if vertex_sets is None:
        vertex_sets = [enumerate_vertices(poly) for poly in inst.polyhedra]
    if len(vertex_sets) != inst.n_blocks:
        raise DomainError("need one vertex set per block")
    mats = []
    for i, vs in enumerate(vertex_sets):
        if len(vs) == 0:
            raise DomainError(f"block {i} has an empty vertex set")
        mats.append(np.vstack(vs.vertices))
    total = math.prod(m.shape[0] for m in mats)
    if total > budget:
        raise BudgetExceededError(
            f"lattice has {total} vertex tuples, over the budget of {budget}"
        )
    return mats


def _spread(values: np.ndarray, axes: tuple[int, ...], n: int) -> np.ndarray:
    """Reshape a dense table so it broadcasts along the given lattice axes."""
    shape = [1] * n
    for k, ax in enumerate(axes):
        shape[ax] = values.shape[k]
    return values.reshape(shape)


def lattice_tables(
    inst: Instance,
    vertex_sets: list[VertexSet] | None = None,
    budget: int = LATTICE_BUDGET,
) -> tuple[np.ndarray, np.ndarray, list[np.ndarray]]:
    """Dense tables of f and p over the vertex lattice.

    Returns (F, P, block_matrices) where F[k_0,...,k_{n-1}] is the objective
    at the tuple picking vertex k_i from block i and P is the penalty.
    """
    mats = _block_matrices(inst, vertex_sets, budget)
    n = inst.n_blocks
    shape = tuple(m.shape[0] for m in mats)
    obj = inst.objective
    F = np.full(shape, float(obj.constant))
    for i in range(n):
        F = F + _spread(mats[i] @ obj.linear[i], (i,), n)
    for (i, j), q in obj.pairwise.items():
        F = F + _spread(mats[i] @ q @ mats[j].T, (i, j), n)
    for mono in obj.higher_terms:
        term = np.full(shape, float(mono.coeff))
        for block, coord in mono.factors:
            term = term * _spread(mats[block][:, coord], (block,), n)
        F = F + term
    P = np.zeros(shape)
    for i in range(n):
        for j in range(i + 1, n):
            P = P + _spread(mats[i] @ mats[j].T, (i, j), n)
    return F, P, mats


def _optima_from_table(
    table: np.ndarray, mats: list[np.ndarray], tie_tol: float
) -> LatticeOptima:
    vmin = float(table.min())
    hits = np.argwhere(table <= vmin + tie_tol)
    indices = tuple(tuple(int(k) for k in row) for row in hits)
    points = tuple(
        BlockPoint.from_blocks([mats[i][idx[i]] for i in range(len(mats))])
        for idx in indices
    )
    return LatticeOptima(
        value=vmin,
        argmin=points,
        argmin_indices=indices,
        lattice_size=int(table.size),
        tie_tol=tie_tol,
    )


def brute_force_penalty_opt(
    inst: Instance,
    beta: float,
    vertex_sets: list[VertexSet] | None = None,
    tie_tol: float = TIE_TOL,
    budget: int = LATTICE_BUDGET,
) -> LatticeOptima:
    """Exact minimum of the penalized objective over the vertex lattice."""
    if beta < 0:
        raise DomainError("beta must be nonnegative")
    F, P, mats = lattice_tables(inst, vertex_sets, budget)
    return _optima_from_table(F + beta * P, mats, tie_tol)


def brute_force_mpgcc_opt(
    inst: Instance,
    vertex_sets: list[VertexSet] | None = None,
    comp_tol: float = DEFAULT_TOL,
    tie_tol: float = TIE_TOL,
    budget: int = LATTICE_BUDGET,
) -> LatticeOptima:
    """Exact minimum of f over the complementary vertex tuples."""
    F, P, mats = lattice_tables(inst, vertex_sets, budget)
    mask = P <= comp_tol
    if not mask.any():
        raise LatticeInfeasibleError(
            "no complementary vertex tuple exists on this lattice; every "
            "tuple of block vertices has overlapping supports"
        )
    return _optima_from_table(np.where(mask, F, np.inf), mats, tie_tol)


def _record(
    beta: float,
    F: np.ndarray,
    P: np.ndarray,
    mats: list[np.ndarray],
    feasible: LatticeOptima,
    comp_tol: float,
    tie_tol: float,
) -> BetaRecord:
    pen = _optima_from_table(F + beta * P, mats, tie_tol)
    inclusion = all(
        P[idx] <= comp_tol and abs(F[idx] - feasible.value) <= tie_tol
        for idx in pen.argmin_indices
    )
    return BetaRecord(
        beta=beta,
        penalized=pen,
        feasible=feasible,
        inclusion_sbar_beta_in_sopt=inclusion,
        sets_equal=pen.index_set() == feasible.index_set(),
    )


def _persistent_threshold(records: list[BetaRecord]) -> float | None:
    """Smallest recorded beta that is set-equal along with everything above it."""
    threshold = None
    for rec in reversed(records):
        if not rec.sets_equal:
            break
        threshold = rec.beta
    return threshold


def find_beta_bar(
    inst: Instance,
    vertex_sets: list[VertexSet] | None = None,
    grid: tuple[float, ...] | list[float] | None = None,
    comp_tol: float = DEFAULT_TOL,
    tie_tol: float = TIE_TOL,
    budget: int = LATTICE_BUDGET,
) -> ExactnessReport:
    """Scan a beta grid for the threshold where the argmin sets coincide.

    With the default grid the detected bracket is refined by REFINE_STEPS
    bisection steps, and the refinement betas join the report's grid. An
    explicit grid is scanned as given. The estimate is None when no grid
    beta is persistently set-equal.
    """
    refine = grid is None
    betas = DEFAULT_BETA_GRID if grid is None else tuple(float(b) for b in grid)
    if not betas:
        raise DomainError("beta grid must be nonempty")
    if any(b <= 0 for b in betas):
        raise DomainError("beta grid entries must be positive")
    if any(b2 <= b1 for b1, b2 in zip(betas, betas[1:])):
        raise DomainError("beta grid must be strictly increasing")
    F, P, mats = lattice_tables(inst, vertex_sets, budget)
    mask = P <= comp_tol
    if not mask.any():
        raise LatticeInfeasibleError(
            "no complementary vertex tuple exists on this lattice; every "
            "tuple of block vertices has overlapping supports"
        )
    feasible = _optima_from_table(np.where(mask, F, np.inf), mats, tie_tol)
    records = [_record(b, F, P, mats, feasible, comp_tol, tie_tol) for b in betas]
    threshold = _persistent_threshold(records)
    if refine and threshold is not None and threshold > betas[0]:
        pos = next(k for k, r in enumerate(records) if r.beta == threshold)
        lo, hi = records[pos - 1].beta, threshold
        for _ in range(REFINE_STEPS):
            mid = 0.5 * (lo + hi)
            rec = _record(mid, F, P, mats, feasible, comp_tol, tie_tol)
            records.append(rec)
            if rec.sets_equal:
                hi = mid
            else:
                lo = mid
        records.sort(key=lambda r: r.beta)
        threshold = _persistent_threshold(records)
    return ExactnessReport(
        beta_grid=tuple(r.beta for r in records),
        records=tuple(records),
        beta_bar_estimate=threshold,
        refined=refine,
    )


def certify_exactness(
    inst: Instance,
    beta: float,
    vertex_sets: list[VertexSet] | None = None,
    samples: int = 1000,
    seed: int = 0,
    comp_tol: float = DEFAULT_TOL,
    tie_tol: float = TIE_TOL,
    budget: int = LATTICE_BUDGET,
) -> CertificationRecord:
    """Vertex-level set equality at one beta plus a randomized continuum check.

    Each sample is a blockwise Dirichlet convex combination of the block's
    vertices, so it lies in the feasible region but is almost surely not a
    vertex tuple. A sample violates the certificate when its penalized value
    undercuts the constrained lattice value by more than 1e-9, or when it
    attains that value without being complementary with a matching f.
    """
    if samples < 0:
        raise DomainError("samples must be nonnegative")
    if beta < 0:
        raise DomainError("beta must be nonnegative")
    F, P, mats = lattice_tables(inst, vertex_sets, budget)
    mask = P <= comp_tol
    if not mask.any():
        raise LatticeInfeasibleError(
            "no complementary vertex tuple exists on this lattice; every "
            "tuple of block vertices has overlapping supports"
        )
    feasible = _optima_from_table(np.where(mask, F, np.inf), mats, tie_tol)
    penalized = _optima_from_table(F + beta * P, mats, tie_tol)
    rng = np.random.default_rng(seed)
    violations = 0
    for _ in range(samples):
        blocks = [m.T @ rng.dirichlet(np.ones(m.shape[0])) for m in mats]
        z = BlockPoint.from_blocks(blocks)
        f = eval_objective(inst, z)
        p = eval_penalty(z)
        fb = f + beta * p
        if fb < feasible.value - 1e-9:
            violations += 1
        elif abs(fb - feasible.value) <= tie_tol and (
            p > comp_tol or abs(f - feasible.value) > tie_tol
        ):
            violations += 1
    return CertificationRecord(
        beta=beta,
        vertex_level_equal=penalized.index_set() == feasible.index_set(),
        sampled_violations=violations,
        samples=samples,
        seed=seed,
        penalized=penalized,
        feasible=feasible,
    )
