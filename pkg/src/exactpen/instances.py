"""Built-in instances: the Coulomb transport family and seeded random ones.

The transport family discretizes three uniform marginals on a 1-D grid of K
cells of width 1/K, couples them pairwise through the Coulomb cost, and
forbids mass on the diagonal of each transport plan. Its blocks are K x K
plans vectorized by column stacking, its known optimum is a triple of
cyclic-shift permutation plans, and a one-parameter perturbation of that
optimum drives the penalty to zero quadratically while staying a fixed
distance away per unit of epsilon. That perturbation is the probe used to
rule out a Lipschitz error bound on the penalty.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetExceededError, DomainError
from .model import (
    BlockPoint,
    Instance,
    MultiAffineObjective,
    Polyhedron,
    eval_penalty,
)

# Epsilons probed when the caller does not supply any.
DEFAULT_PROBE_EPSILONS = (0.1, 0.01, 0.001)
# Largest per-block vertex count random_instance will agree to produce.
RANDOM_VERTEX_BUDGET = 10_000


@dataclass(frozen=True)
class MmotSpec:
    """Grid size and derived dimensions of the transport family."""

    K: int

    def __post_init__(self):
        if int(self.K) < 2:
            raise DomainError("K must be at least 2")
        object.__setattr__(self, "K", int(self.K))

    @property
    def h(self) -> float:
        return 1.0 / self.K

    @property
    def n_blocks(self) -> int:
        return 3

    @property
    def block_dim(self) -> int:
        return self.K * self.K


@dataclass(frozen=True)
class ProbeRow:
    """One epsilon's measurements against the closed-form predictions."""

    epsilon: float
    p_value: float
    dist_upper: float
    ratio: float
    predicted_p: float
    predicted_dist: float


def coulomb_cost(K: int) -> np.ndarray:
    """K x K cost matrix 1/(|i-j| h) off the diagonal, 0 on it."""
    if K < 2:
        raise DomainError("K must be at least 2")
    idx = np.arange(K)
    gap = np.abs(idx[:, None] - idx[None, :])
    C = np.zeros((K, K))
    off = gap > 0
    C[off] = K / gap[off]
    return C


def _vec(X: np.ndarray) -> np.ndarray:
    # Column stacking: entry (i, j) lands at position j*K + i.
    return np.asarray(X, dtype=float).flatten(order="F")


def _plan_polyhedron(K: int) -> Polyhedron:
    """Zero-diagonal doubly stochastic plans in vectorized coordinates."""
    eye = np.eye(K)
    ones_row = np.ones((1, K))
    row_sums = np.kron(ones_row, eye)
    col_sums = np.kron(eye, ones_row)
    trace_row = _vec(eye)[None, :]
    A = np.vstack([row_sums, col_sums, trace_row])
    b = np.concatenate([np.ones(2 * K), [0.0]])
    return Polyhedron(dim=K * K, eq_matrix=A, eq_rhs=b)


def mmot_instance(K: int) -> Instance:
    """Three-block transport instance with pairwise Coulomb couplings.

    Each block's polytope fixes unit row sums, unit column sums, and a zero
    trace. The objective is sum_i <X_i, C> + sum_{i<j} <X_i, X_j C>, carried
    in vectorized form with coupling matrix kron(C, I), so that
    <x_i, (C kron I) x_j> = <X_i, X_j C>.
    """
    spec = MmotSpec(K)
    C = coulomb_cost(spec.K)
    c_vec = _vec(C)
    Q = np.kron(C, np.eye(spec.K))
    objective = MultiAffineObjective(
        n_blocks=3,
        block_dim=spec.block_dim,
        linear=np.vstack([c_vec, c_vec, c_vec]),
        pairwise={(0, 1): Q, (0, 2): Q, (1, 2): Q},
    )
    poly = _plan_polyhedron(spec.K)
    return Instance(objective=objective, polyhedra=(poly, poly, poly))


def _shift_plan(K: int, shift: int, weight: float = 1.0) -> np.ndarray:
    """Permutation plan with `weight` at (i, (i + shift) mod K)."""
    X = np.zeros((K, K))
    rows = np.arange(K)
    X[rows, (rows + shift) % K] = weight
    return X


def mmot_optimal_solution(K: int) -> BlockPoint:
    """The known optimal triple: cyclic shifts by K/4, K/2, and 3K/4.

    Written entrywise, block 1 has ones where i - j = 3K/4 or j - i = K/4,
    block 2 where |i - j| = K/2, block 3 where i - j = K/4 or j - i = 3K/4;
    the cyclic shifts cover exactly those offsets. Requires 4 | K.
    """
    spec = MmotSpec(K)
    if spec.K % 4 != 0:
        raise DomainError("the explicit optimal triple needs K divisible by 4")
    q = spec.K // 4
    return BlockPoint.from_blocks(
        [_vec(_shift_plan(spec.K, s)) for s in (q, 2 * q, 3 * q)]
    )


def mmot_perturbed(K: int, epsilon: float) -> BlockPoint:
    """Feasible perturbation of the optimal triple with penalty K*epsilon^2.

    The middle block stays put; the outer blocks move mass epsilon from
    their own shift onto the common shift K/4 + 1 (entrywise: epsilon where
    i - j = 3K/4 - 1 or j - i = K/4 + 1, 1 - epsilon on the original
    offsets). The only support overlap is the shared shift, so the penalty
    is exactly K*epsilon^2 while the point stays doubly stochastic with a
    zero diagonal. Requires 4 | K, K > 4, and epsilon in (0, 1).
    """
    spec = MmotSpec(K)
    if spec.K % 4 != 0:
        raise DomainError("the perturbed triple needs K divisible by 4")
    if spec.K <= 4:
        raise DomainError("the perturbed triple needs K > 4")
    if not 0.0 < epsilon < 1.0:
        raise DomainError("epsilon must lie strictly between 0 and 1")
    q = spec.K // 4
    bump = _shift_plan(spec.K, q + 1, epsilon)
    x1 = _shift_plan(spec.K, q, 1.0 - epsilon) + bump
    x3 = _shift_plan(spec.K, 3 * q, 1.0 - epsilon) + bump
    return BlockPoint.from_blocks(
        [_vec(x1), _vec(_shift_plan(spec.K, 2 * q)), _vec(x3)]
    )


def error_bound_probe(
    K: int, epsilons: tuple[float, ...] | list[float] = DEFAULT_PROBE_EPSILONS
) -> list[ProbeRow]:
    """Penalty and distance of the perturbed triple for each epsilon.

    dist_upper is the Frobenius distance to the optimal triple over the
    stacked blocks, an upper bound on the distance to the solution set.
    The closed forms are p = K*eps^2 and dist = 2*sqrt(K)*eps, so the
    ratio dist/p = 2/(sqrt(K)*eps) grows without bound as eps shrinks:
    no constant can bound distance by a multiple of the penalty.
    """
    z_star = mmot_optimal_solution(K)
    rows = []
    for eps in epsilons:
        eps = float(eps)
        z_eps = mmot_perturbed(K, eps)
        p = eval_penalty(z_eps)
        dist = float(np.linalg.norm(z_star.blocks - z_eps.blocks))
        rows.append(
            ProbeRow(
                epsilon=eps,
                p_value=p,
                dist_upper=dist,
                ratio=dist / p,
                predicted_p=K * eps * eps,
                predicted_dist=2.0 * math.sqrt(K) * eps,
            )
        )
    return rows


def random_instance(
    n: int, m: int, seed: int, vertex_budget: int = RANDOM_VERTEX_BUDGET
) -> Instance:
    """Seeded desk-scale instance with weighted-simplex blocks.

    Block i is {x >= 0 : <w_i, x> = 1} with weights in [0.5, 2], so its m
    vertices are the scaled standard-basis points e_k / w_ik and tuples
    with pairwise disjoint supports exist whenever n <= m. Half the blocks
    also carry one strictly redundant inequality to exercise slack
    handling. Linear parts and pairwise couplings are uniform in [-1, 1].
    """
    if n < 2 or m < 2:
        raise DomainError("need n >= 2 and m >= 2")
    if m > vertex_budget:
        raise BudgetExceededError(
            f"each block would have {m} vertices, over the budget of {vertex_budget}"
        )
    rng = np.random.default_rng(seed)
    polyhedra = []
    for _ in range(n):
        w = rng.uniform(0.5, 2.0, m)
        ineq_matrix = None
        ineq_rhs = None
        if rng.uniform() < 0.5:
            u = rng.uniform(0.0, 1.0, m)
            # Redundant by construction: max of u.x over the block is
            # attained at a vertex e_k / w_k.
            bound = float(np.max(u / w))
            ineq_matrix = u[None, :]
            ineq_rhs = np.array([bound + 0.5])
        polyhedra.append(
            Polyhedron(
                dim=m,
                eq_matrix=w[None, :],
                eq_rhs=np.array([1.0]),
                ineq_matrix=ineq_matrix,
                ineq_rhs=ineq_rhs,
            )
        )
    linear = rng.uniform(-1.0, 1.0, (n, m))
    pairwise = {
        (i, j): rng.uniform(-1.0, 1.0, (m, m))
        for i in range(n)
        for j in range(i + 1, n)
    }
    objective = MultiAffineObjective(
        n_blocks=n, block_dim=m, linear=linear, pairwise=pairwise
    )
    warnings = ()
    if n > m:
        warnings = (
            "more blocks than coordinates: pairwise disjoint supports are "
            "impossible, so no complementary point exists",
        )
    return Instance(
        objective=objective, polyhedra=tuple(polyhedra), warnings=warnings
    )
