"""Deterministic linear programming over one block polyhedron.

Everything here returns extreme points. The solver is a dense two-phase
tableau simplex with Bland's smallest-index rule, chosen because the block
subproblems are heavily degenerate and anti-cycling plus reproducibility
matter more than speed at desk scale. Vertex enumeration walks every basis
of the standard form, so it is complete but only viable for small column
counts.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, DomainError, ShapeError
from .model import DEFAULT_TOL, Polyhedron, check_membership

# Pivot threshold for the rank-revealing elimination that drops redundant
# equality rows.
ELIM_PIVOT_TOL = 1e-10
# Simplex entering/ratio tolerances and the phase-1 feasibility cutoff.
SIMPLEX_TOL = 1e-9
# Max-norm vertex dedupe radius: above simplex residuals, below vertex
# separation on desk-scale polytopes.
DEDUPE_TOL = 1e-7
# Default cap on the number of bases enumerate_vertices may visit.
BASIS_BUDGET = 5_000_000


@dataclass(frozen=True)
class StandardFormLP:
    """min cost.x s.t. constraint_matrix x = rhs, x >= 0, rhs >= 0.

    The first n_original columns are the polyhedron's coordinates; the rest
    are slacks, one per inequality row, recorded in slack_map. Redundant
    equality rows are dropped (indices kept in dropped_eq_rows); rows are
    sign-flipped so the rhs is nonnegative, which can make a slack column
    carry -1.
    """

    constraint_matrix: np.ndarray
    rhs: np.ndarray
    cost: np.ndarray | None
    n_original: int
    slack_map: dict[int, int]  # original inequality row -> slack column
    dropped_eq_rows: tuple[int, ...] = ()

    @property
    def n_rows(self) -> int:
        return self.constraint_matrix.shape[0]

    @property
    def n_cols(self) -> int:
        return self.constraint_matrix.shape[1]

    def with_cost(self, cost: np.ndarray) -> "StandardFormLP":
        cost = np.asarray(cost, dtype=float)
        if cost.shape != (self.n_original,):
            raise ShapeError("cost length must match the original dimension")
        full = np.zeros(self.n_cols)
        full[: self.n_original] = cost
        return StandardFormLP(
            self.constraint_matrix,
            self.rhs,
            full,
            self.n_original,
            self.slack_map,
            self.dropped_eq_rows,
        )

    def original_point(self, x_std: np.ndarray) -> np.ndarray:
        return np.array(x_std[: self.n_original])


@dataclass(frozen=True)
class LpSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    point: np.ndarray | None = None
    value: float | None = None
    basis: tuple[int, ...] | None = None  # standard-form column indices


@dataclass(frozen=True)
class VertexSet:
    """All extreme points of one polyhedron, with basis certificates."""

    vertices: tuple[np.ndarray, ...]
    bases: tuple[tuple[int, ...], ...]
    dedupe_tol: float = DEDUPE_TOL
    # Pairs of stored vertices closer than 10x dedupe_tol: a hint that
    # floating-point dedupe may be conflating near-degenerate vertices.
    near_pairs: tuple[tuple[int, int], ...] = ()

    def __len__(self) -> int:
        return len(self.vertices)

    def index_of(self, x, tol: float = DEDUPE_TOL) -> int | None:
        x = np.asarray(x, dtype=float)
        for k, v in enumerate(self.vertices):
            if np.max(np.abs(v - x)) <= tol:
                return k
        return None


def _independent_eq_rows(A: np.ndarray, b: np.ndarray) -> tuple[list[int], list[int]]:
    """Split equality rows into a maximal independent set and redundant rest.

    Gaussian elimination with partial pivoting on [A | b]; rows never used as
    pivots are linearly dependent on the kept ones. Inconsistent dependent
    rows (zero coefficients, nonzero residual rhs) are kept so the simplex
    reports infeasibility instead of the set silently growing.
    """
    p, m = A.shape
    work = np.hstack([A.astype(float), b.reshape(-1, 1).astype(float)])
    rows = list(range(p))
    kept: list[int] = []
    row_at = list(range(p))  # work row index -> original row index
    r = 0
    for col in range(m):
        if r >= p:
            break
        piv = r + int(np.argmax(np.abs(work[r:, col])))
        if abs(work[piv, col]) <= ELIM_PIVOT_TOL:
            continue
        work[[r, piv]] = work[[piv, r]]
        row_at[r], row_at[piv] = row_at[piv], row_at[r]
        kept.append(row_at[r])
        factors = work[r + 1 :, col] / work[r, col]
        work[r + 1 :] -= np.outer(factors, work[r])
        r += 1
    dropped = []
    for k in range(r, p):
        if abs(work[k, -1]) > ELIM_PIVOT_TOL:
            kept.append(row_at[k])  # inconsistent: keep so the LP is infeasible
        else:
            dropped.append(row_at[k])
    kept.sort()
    dropped.sort()
    return kept, dropped


def to_standard_form(poly: Polyhedron) -> StandardFormLP:
    """Reduce a nonnegative polyhedron to equality standard form.

    Feasible sets are in bijection: a standard-form point maps back by
    dropping the slack coordinates.
    """
    if not poly.nonneg:
        raise DomainError("standard form requires the x >= 0 block")
    m = poly.dim
    A_eq, b_eq = poly.eq_matrix, poly.eq_rhs
    kept, dropped = _independent_eq_rows(A_eq, b_eq) if A_eq.shape[0] else ([], [])
    n_ineq = poly.ineq_matrix.shape[0]
    n_rows = len(kept) + n_ineq
    n_cols = m + n_ineq
    A = np.zeros((n_rows, n_cols))
    b = np.zeros(n_rows)
    for r, orig in enumerate(kept):
        A[r, :m] = A_eq[orig]
        b[r] = b_eq[orig]
    slack_map = {}
    for k in range(n_ineq):
        r = len(kept) + k
        A[r, :m] = poly.ineq_matrix[k]
        A[r, m + k] = 1.0
        b[r] = poly.ineq_rhs[k]
        slack_map[k] = m + k
    flip = b < 0
    A[flip] *= -1.0
    b[flip] *= -1.0
    A.flags.writeable = False
    b.flags.writeable = False
    return StandardFormLP(A, b, None, m, slack_map, tuple(dropped))


def _bland_pivot(T, basis, blocked_cols=frozenset(), tol=SIMPLEX_TOL):
    """Run Bland-rule pivots on tableau T in place until optimal or unbounded.

    T layout: rows 0..p-1 are constraints [A | b], last row is the reduced
    cost row with -objective in its final entry. Entering column: smallest
    index with negative reduced cost; leaving row: minimum ratio, ties broken
    by the smallest basic variable index. Returns "optimal" or "unbounded".
    """
    p = T.shape[0] - 1
    ncols = T.shape[1] - 1
    while True:
        enter = -1
        for j in range(ncols):
            if j not in blocked_cols and T[-1, j] < -tol:
                enter = j
                break
        if enter < 0:
            return "optimal"
        leave = -1
        best = np.inf
        for r in range(p):
            a = T[r, enter]
            if a <= tol:
                continue
            ratio = T[r, -1] / a
            if ratio < best - tol:
                best = ratio
                leave = r
            elif ratio <= best + tol and basis[r] < basis[leave]:
                leave = r
        if leave < 0:
            return "unbounded"
        _pivot(T, basis, leave, enter)


def _pivot(T, basis, row, col):
    T[row] /= T[row, col]
    for r in range(T.shape[0]):
        if r != row and T[r, col] != 0.0:
            T[r] -= T[r, col] * T[row]
    basis[row] = col


def solve_lp(poly: Polyhedron, cost) -> LpSolution:
    """Minimize cost.x over poly, returning a vertex via two-phase simplex.

    Deterministic for identical inputs: Bland's smallest-index rule fixes
    every entering and leaving choice.
    """
    cost = np.asarray(cost, dtype=float)
    std = to_standard_form(poly).with_cost(cost)
    A, b, c = std.constraint_matrix, std.rhs, std.cost
    p, q = A.shape
    scale = max(1.0, float(np.abs(b).max(initial=1.0)))

    # Phase 1: artificial basis, minimize the artificial sum.
    T = np.zeros((p + 1, q + p + 1))
    T[:p, :q] = A
    T[:p, q : q + p] = np.eye(p)
    T[:p, -1] = b
    T[-1, q : q + p] = 1.0
    T[-1] -= T[:p].sum(axis=0)  # reduce against the artificial basis (costs 1)
    basis = list(range(q, q + p))
    status = _bland_pivot(T, basis, blocked_cols=frozenset(range(q, q + p)))
    phase1_obj = -T[-1, -1]
    if status != "optimal" or phase1_obj > SIMPLEX_TOL * scale:
        return LpSolution(status="infeasible")

    # Drive any zero-level artificials out of the basis; rows with no real
    # pivot entry are redundant and get neutralized.
    drop_rows = []
    for r in range(p):
        if basis[r] >= q:
            piv = -1
            for j in range(q):
                if abs(T[r, j]) > SIMPLEX_TOL:
                    piv = j
                    break
            if piv >= 0:
                _pivot(T, basis, r, piv)
            else:
                drop_rows.append(r)
    keep = [r for r in range(p) if r not in drop_rows]

    # Phase 2: rebuild the cost row over the real columns only.
    p2 = len(keep)
    T2 = np.zeros((p2 + 1, q + 1))
    T2[:p2, :q] = T[keep][:, :q]
    T2[:p2, -1] = T[keep][:, -1]
    basis2 = [basis[r] for r in keep]
    T2[-1, :q] = c
    for r in range(p2):
        cb = c[basis2[r]]
        if cb != 0.0:
            T2[-1] -= cb * T2[r]
    status = _bland_pivot(T2, basis2)
    if status == "unbounded":
        return LpSolution(status="unbounded")

    x = np.zeros(q)
    for r in range(p2):
        x[basis2[r]] = T2[r, -1]
    np.maximum(x, 0.0, out=x)  # shave simplex round-off
    point = std.original_point(x)
    point.flags.writeable = False
    return LpSolution(
        status="optimal",
        point=point,
        value=float(cost @ point),
        basis=tuple(sorted(basis2)),
    )


def is_vertex(poly: Polyhedron, x, tol: float = DEFAULT_TOL) -> bool:
    """True iff the active constraints at x have full rank dim.

    Raises DomainError when x is not a member of poly.
    """
    x = np.asarray(x, dtype=float)
    if not check_membership(poly, x, tol):
        raise DomainError("is_vertex requires a member of the polyhedron")
    rows = [poly.eq_matrix]
    if poly.ineq_matrix.shape[0]:
        tight = np.abs(poly.ineq_matrix @ x - poly.ineq_rhs) <= tol
        rows.append(poly.ineq_matrix[tight])
    if poly.nonneg:
        at_zero = np.flatnonzero(np.abs(x) <= tol)
        unit = np.zeros((at_zero.size, poly.dim))
        unit[np.arange(at_zero.size), at_zero] = 1.0
        rows.append(unit)
    active = np.vstack(rows)
    if active.shape[0] < poly.dim:
        return False
    return int(np.linalg.matrix_rank(active)) == poly.dim


def enumerate_vertices(
    poly: Polyhedron, budget: int = BASIS_BUDGET, dedupe_tol: float = DEDUPE_TOL
) -> VertexSet:
    """Complete extreme-point enumeration by visiting every standard-form basis.

    Every basic feasible solution corresponds to at least one basis, so
    walking all column subsets of basis size finds every vertex. Candidates
    are deduplicated in the max-norm and validated with is_vertex; the first
    (lexicographically smallest) basis is kept as the certificate.
    """
    std = to_standard_form(poly)
    p, q = std.n_rows, std.n_cols
    n_bases = math.comb(q, p)
    if n_bases > budget:
        raise BudgetExceededError(
            f"{n_bases} bases exceed the budget of {budget}; refusing to truncate"
        )
    A, b = std.constraint_matrix, std.rhs
    scale = max(1.0, float(np.abs(b).max(initial=1.0)))
    verts: list[np.ndarray] = []
    bases: list[tuple[int, ...]] = []
    for cols in itertools.combinations(range(q), p):
        if p:
            B = A[:, cols]
            try:
                xb = np.linalg.solve(B, b)
            except np.linalg.LinAlgError:
                continue
            if not np.all(np.isfinite(xb)):
                continue
            if np.max(np.abs(B @ xb - b)) > SIMPLEX_TOL * scale:
                continue  # near-singular basis, solution is junk
            if xb.min(initial=0.0) < -SIMPLEX_TOL:
                continue
        else:
            xb = np.zeros(0)  # no constraint rows: the origin is the lone candidate
        x = np.zeros(q)
        x[list(cols)] = np.maximum(xb, 0.0)
        cand = std.original_point(x)
        if any(np.max(np.abs(cand - v)) <= dedupe_tol for v in verts):
            continue
        if not check_membership(poly, cand, DEFAULT_TOL * scale):
            continue
        if not is_vertex(poly, cand, DEFAULT_TOL * scale):
            continue
        cand.flags.writeable = False
        verts.append(cand)
        bases.append(tuple(cols))
    near = []
    for a in range(len(verts)):
        for bdx in range(a + 1, len(verts)):
            if np.max(np.abs(verts[a] - verts[bdx])) <= 10 * dedupe_tol:
                near.append((a, bdx))
    return VertexSet(
        vertices=tuple(verts),
        bases=tuple(bases),
        dedupe_tol=dedupe_tol,
        near_pairs=tuple(near),
    )
