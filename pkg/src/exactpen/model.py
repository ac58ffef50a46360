"""Problem data types and evaluation primitives.

The objective is multi-affine over n variable blocks of common dimension m:
a constant, per-block linear terms, pairwise bilinear couplings, and an
optional list of degree >= 3 monomials touching each block at most once.
Each block ranges over its own polyhedron intersected with the nonnegative
orthant; the complementarity penalty is the sum of pairwise block inner
products, which vanishes exactly at complementary points of the feasible
region.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ShapeError

# Absolute tolerance for feasibility and complementarity checks; sized for
# double-precision simplex residuals on desk-scale data.
DEFAULT_TOL = 1e-9


def _frozen_array(a, dtype=float) -> np.ndarray:
    out = np.array(a, dtype=dtype)
    if not np.all(np.isfinite(out)):
        raise DomainError("array entries must be finite")
    out.flags.writeable = False
    return out


@dataclass(frozen=True)
class Monomial:
    """coeff * prod of single coordinates, one coordinate per distinct block."""

    coeff: float
    factors: tuple[tuple[int, int], ...]  # (block index, coordinate index)

    def __post_init__(self):
        object.__setattr__(self, "coeff", float(self.coeff))
        object.__setattr__(
            self, "factors", tuple((int(b), int(c)) for b, c in self.factors)
        )
        if len(self.factors) < 3:
            raise ShapeError(
                "monomials of degree < 3 belong in linear/pairwise terms"
            )
        blocks = [b for b, _ in self.factors]
        if len(set(blocks)) != len(blocks):
            raise ShapeError("monomial references a block more than once")


@dataclass(frozen=True)
class MultiAffineObjective:
    """Multi-affine function of n blocks, affine in each block separately."""

    n_blocks: int
    block_dim: int
    constant: float = 0.0
    linear: np.ndarray = None  # (n, m)
    pairwise: dict[tuple[int, int], np.ndarray] = field(default_factory=dict)
    higher_terms: tuple[Monomial, ...] = ()

    def __post_init__(self):
        n, m = int(self.n_blocks), int(self.block_dim)
        if n < 1 or m < 1:
            raise ShapeError("need n_blocks >= 1 and block_dim >= 1")
        object.__setattr__(self, "n_blocks", n)
        object.__setattr__(self, "block_dim", m)
        object.__setattr__(self, "constant", float(self.constant))
        lin = np.zeros((n, m)) if self.linear is None else self.linear
        lin = _frozen_array(lin)
        if lin.shape != (n, m):
            raise ShapeError(f"linear must have shape {(n, m)}, got {lin.shape}")
        object.__setattr__(self, "linear", lin)
        pw = {}
        for key, mat in dict(self.pairwise).items():
            i, j = int(key[0]), int(key[1])
            if not (0 <= i < j < n):
                raise ShapeError(f"pairwise key {key!r} must satisfy 0 <= i < j < n")
            mat = _frozen_array(mat)
            if mat.shape != (m, m):
                raise ShapeError(f"pairwise[{i},{j}] must be {m}x{m}")
            pw[(i, j)] = mat
        object.__setattr__(self, "pairwise", pw)
        terms = tuple(
            t if isinstance(t, Monomial) else Monomial(*t) for t in self.higher_terms
        )
        for t in terms:
            for b, c in t.factors:
                if not (0 <= b < n and 0 <= c < m):
                    raise ShapeError(f"monomial factor ({b},{c}) out of range")
        object.__setattr__(self, "higher_terms", terms)


@dataclass(frozen=True)
class Polyhedron:
    """One block's feasible set: A x = b, G x <= g, optionally x >= 0."""

    dim: int
    eq_matrix: np.ndarray = None
    eq_rhs: np.ndarray = None
    ineq_matrix: np.ndarray = None
    ineq_rhs: np.ndarray = None
    nonneg: bool = True

    def __post_init__(self):
        m = int(self.dim)
        if m < 1:
            raise ShapeError("dim must be positive")
        object.__setattr__(self, "dim", m)
        A = np.zeros((0, m)) if self.eq_matrix is None else self.eq_matrix
        b = np.zeros(0) if self.eq_rhs is None else self.eq_rhs
        G = np.zeros((0, m)) if self.ineq_matrix is None else self.ineq_matrix
        g = np.zeros(0) if self.ineq_rhs is None else self.ineq_rhs
        A, b, G, g = (_frozen_array(x) for x in (A, b, G, g))
        if A.ndim != 2 or A.shape[1] != m or b.shape != (A.shape[0],):
            raise ShapeError("equality system dimensions inconsistent with dim")
        if G.ndim != 2 or G.shape[1] != m or g.shape != (G.shape[0],):
            raise ShapeError("inequality system dimensions inconsistent with dim")
        object.__setattr__(self, "eq_matrix", A)
        object.__setattr__(self, "eq_rhs", b)
        object.__setattr__(self, "ineq_matrix", G)
        object.__setattr__(self, "ineq_rhs", g)
        object.__setattr__(self, "nonneg", bool(self.nonneg))


@dataclass(frozen=True)
class BlockPoint:
    """A candidate point, n blocks of dimension m stacked as an (n, m) array."""

    blocks: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.blocks)
        if arr.ndim != 2:
            raise ShapeError("blocks must be a 2-d array (n_blocks, block_dim)")
        object.__setattr__(self, "blocks", arr)

    @classmethod
    def from_blocks(cls, vectors) -> "BlockPoint":
        return cls(np.vstack([np.asarray(v, dtype=float) for v in vectors]))

    @property
    def n_blocks(self) -> int:
        return self.blocks.shape[0]

    @property
    def block_dim(self) -> int:
        return self.blocks.shape[1]

    def block(self, i: int) -> np.ndarray:
        return self.blocks[i]

    def with_block(self, i: int, x) -> "BlockPoint":
        new = np.array(self.blocks)
        new[i] = np.asarray(x, dtype=float)
        return BlockPoint(new)


@dataclass(frozen=True)
class Instance:
    """A full problem: one multi-affine objective plus one polyhedron per block."""

    objective: MultiAffineObjective
    polyhedra: tuple[Polyhedron, ...]
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        polys = tuple(self.polyhedra)
        object.__setattr__(self, "polyhedra", polys)
        object.__setattr__(self, "warnings", tuple(self.warnings))
        if len(polys) != self.objective.n_blocks:
            raise ShapeError("number of polyhedra must equal n_blocks")
        for p in polys:
            if p.dim != self.objective.block_dim:
                raise ShapeError("every polyhedron must have dim == block_dim")
            if not p.nonneg:
                raise ShapeError("instance polyhedra must include x >= 0")

    @property
    def n_blocks(self) -> int:
        return self.objective.n_blocks

    @property
    def block_dim(self) -> int:
        return self.objective.block_dim


def _check_point(inst: Instance, z: BlockPoint) -> None:
    if z.blocks.shape != (inst.n_blocks, inst.block_dim):
        raise ShapeError(
            f"point shape {z.blocks.shape} does not match instance "
            f"{(inst.n_blocks, inst.block_dim)}"
        )


def eval_objective(inst: Instance, z: BlockPoint) -> float:
    """Evaluate the multi-affine objective at z."""
    _check_point(inst, z)
    obj = inst.objective
    x = z.blocks
    val = obj.constant + float(np.sum(obj.linear * x))
    for (i, j), q in obj.pairwise.items():
        val += float(x[i] @ q @ x[j])
    for t in obj.higher_terms:
        prod = t.coeff
        for b, c in t.factors:
            prod *= x[b, c]
        val += prod
    return val


def eval_penalty(z: BlockPoint) -> float:
    """Sum of pairwise block inner products; zero exactly at complementary points."""
    x = z.blocks
    n = x.shape[0]
    val = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            val += float(x[i] @ x[j])
    return val


def eval_penalized(inst: Instance, beta: float, z: BlockPoint) -> float:
    """Objective plus beta times the complementarity penalty."""
    return eval_objective(inst, z) + beta * eval_penalty(z)


def partial_linearization(
    inst: Instance, beta: float, z: BlockPoint, i: int
) -> tuple[np.ndarray, float]:
    """Affine restriction of the penalized objective to block i.

    Returns (c, offset) such that substituting any vector x for block i in z
    gives penalized value <c, x> + offset. The cost c carries both the
    objective couplings against the fixed blocks and the penalty gradient
    beta * sum of the other blocks.
    """
    _check_point(inst, z)
    n, m = inst.n_blocks, inst.block_dim
    if not (0 <= i < n):
        raise ShapeError(f"block index {i} out of range [0, {n})")
    obj = inst.objective
    x = z.blocks

    c = np.array(obj.linear[i])
    offset = obj.constant
    for j in range(n):
        if j != i:
            offset += float(obj.linear[j] @ x[j])
            c += beta * x[j]
    for (a, b), q in obj.pairwise.items():
        if a == i:
            c += q @ x[b]
        elif b == i:
            c += q.T @ x[a]
        else:
            offset += float(x[a] @ q @ x[b])
    for a in range(n):
        for b in range(a + 1, n):
            if a != i and b != i:
                offset += beta * float(x[a] @ x[b])
    for t in obj.higher_terms:
        rest = t.coeff
        coord = None
        for b, cc in t.factors:
            if b == i:
                coord = cc
            else:
                rest *= x[b, cc]
        if coord is None:
            offset += rest
        else:
            c[coord] += rest
    return c, offset


def complementarity_residual(
    z: BlockPoint, tol: float = DEFAULT_TOL
) -> tuple[float, bool]:
    """Penalty value and whether it is within tol of zero.

    Blocks must be nonnegative up to -tol; entries in [-tol, 0) are clamped
    to zero so the penalty keeps its absolute-value-free meaning.
    """
    x = z.blocks
    low = float(x.min()) if x.size else 0.0
    if low < -tol:
        raise DomainError(
            f"block entry {low} below -tol; penalty loses its l1 meaning"
        )
    clamped = BlockPoint(np.maximum(x, 0.0))
    p = eval_penalty(clamped)
    return p, p <= tol


def check_membership(poly: Polyhedron, x, tol: float = DEFAULT_TOL) -> bool:
    """True iff x satisfies the polyhedron's constraints within tol."""
    x = np.asarray(x, dtype=float)
    if x.shape != (poly.dim,):
        raise ShapeError(f"point has shape {x.shape}, expected {(poly.dim,)}")
    if poly.eq_matrix.shape[0]:
        if np.max(np.abs(poly.eq_matrix @ x - poly.eq_rhs)) > tol:
            return False
    if poly.ineq_matrix.shape[0]:
        if np.max(poly.ineq_matrix @ x - poly.ineq_rhs) > tol:
            return False
    if poly.nonneg and x.size and x.min() < -tol:
        return False
    return True
