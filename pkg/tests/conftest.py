import numpy as np
import pytest
from hypothesis import settings

import exactpen as ep

settings.register_profile("suite", max_examples=50, deadline=None)
settings.load_profile("suite")


def simplex(m: int) -> ep.Polyhedron:
    return ep.Polyhedron(dim=m, eq_matrix=np.ones((1, m)), eq_rhs=np.array([1.0]))


def feasible_point(inst: ep.Instance, rng: np.random.Generator) -> ep.BlockPoint:
    """Random convex combination of each block's vertices."""
    blocks = []
    for poly in inst.polyhedra:
        vs = ep.enumerate_vertices(poly)
        weights = rng.dirichlet(np.ones(len(vs)))
        blocks.append(np.vstack(vs.vertices).T @ weights)
    return ep.BlockPoint.from_blocks(blocks)


@pytest.fixture
def two_simplex_instance() -> ep.Instance:
    """n=2 blocks on the unit simplex in R^3 with f = -<x_1, x_2>."""
    obj = ep.MultiAffineObjective(
        n_blocks=2, block_dim=3, pairwise={(0, 1): -np.eye(3)}
    )
    return ep.Instance(objective=obj, polyhedra=(simplex(3), simplex(3)))


@pytest.fixture(scope="session")
def mmot4() -> ep.Instance:
    return ep.mmot_instance(4)


@pytest.fixture(scope="session")
def mmot4_vertices(mmot4) -> list:
    vs = ep.enumerate_vertices(mmot4.polyhedra[0])
    return [vs, vs, vs]
