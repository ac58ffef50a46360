"""Exact-penalty toolkit for multi-affine programs with complementarity
constraints between blocks.

The package models problems of the form

    minimize f(x_1, ..., x_n) subject to x_i in a polytope in the
    nonnegative orthant and <x_i, x_j> = 0 for every pair i < j,

replaces the complementarity constraints by the separable penalty
beta * sum_{i<j} <x_i, x_j>, solves the penalized problem by blockwise
extreme-point descent, and certifies on desk-scale instances that the
penalty is exact beyond a finite threshold while no Lipschitz error bound
ties distance to the penalty value.
"""

from .errors import (
    BudgetExceededError,
    DomainError,
    ExactPenError,
    LatticeInfeasibleError,
    LpError,
    SchemaError,
    ShapeError,
)
from .exactness import (
    DEFAULT_BETA_GRID,
    BetaRecord,
    CertificationRecord,
    ExactnessReport,
    LatticeOptima,
    brute_force_mpgcc_opt,
    brute_force_penalty_opt,
    certify_exactness,
    find_beta_bar,
    lattice_tables,
)
from .instances import (
    DEFAULT_PROBE_EPSILONS,
    MmotSpec,
    ProbeRow,
    coulomb_cost,
    error_bound_probe,
    mmot_instance,
    mmot_optimal_solution,
    mmot_perturbed,
    random_instance,
)
from .lp import (
    LpSolution,
    StandardFormLP,
    VertexSet,
    enumerate_vertices,
    is_vertex,
    solve_lp,
    to_standard_form,
)
from .model import (
    DEFAULT_TOL,
    BlockPoint,
    Instance,
    Monomial,
    MultiAffineObjective,
    Polyhedron,
    check_membership,
    complementarity_residual,
    eval_objective,
    eval_penalized,
    eval_penalty,
    partial_linearization,
)
from .serialize import (
    build_report,
    emit_instance,
    emit_report,
    instance_sha256,
    parse_instance,
)
from .solver import (
    SolveOptions,
    SolveReport,
    bcd_solve,
    extreme_point_rounding,
    multi_start,
    penalty_continuation,
)

__version__ = "0.1.0"

__all__ = [
    "BetaRecord",
    "BlockPoint",
    "BudgetExceededError",
    "CertificationRecord",
    "DEFAULT_BETA_GRID",
    "DEFAULT_PROBE_EPSILONS",
    "DEFAULT_TOL",
    "DomainError",
    "ExactPenError",
    "ExactnessReport",
    "Instance",
    "LatticeInfeasibleError",
    "LatticeOptima",
    "LpError",
    "LpSolution",
    "MmotSpec",
    "Monomial",
    "MultiAffineObjective",
    "Polyhedron",
    "ProbeRow",
    "SchemaError",
    "ShapeError",
    "SolveOptions",
    "SolveReport",
    "StandardFormLP",
    "VertexSet",
    "bcd_solve",
    "brute_force_mpgcc_opt",
    "brute_force_penalty_opt",
    "build_report",
    "certify_exactness",
    "check_membership",
    "complementarity_residual",
    "coulomb_cost",
    "emit_instance",
    "emit_report",
    "enumerate_vertices",
    "error_bound_probe",
    "eval_objective",
    "eval_penalized",
    "eval_penalty",
    "extreme_point_rounding",
    "find_beta_bar",
    "instance_sha256",
    "is_vertex",
    "lattice_tables",
    "mmot_instance",
    "mmot_optimal_solution",
    "mmot_perturbed",
    "multi_start",
    "parse_instance",
    "partial_linearization",
    "penalty_continuation",
    "random_instance",
    "solve_lp",
    "to_standard_form",
]
