import math

import numpy as np
import pytest

import exactpen as ep


def _as_matrix(x, K):
    return x.reshape(K, K, order="F")


class TestCoulombCost:
    def test_k4_values(self):
        C = ep.coulomb_cost(4)
        assert C[0, 1] == pytest.approx(4.0)
        assert C[0, 2] == pytest.approx(2.0)
        assert C[0, 3] == pytest.approx(4.0 / 3.0)
        assert C[0, 0] == 0.0

    def test_k8_far_entry(self):
        assert ep.coulomb_cost(8)[0, 7] == pytest.approx(8.0 / 7.0)

    def test_structure(self):
        for K in (2, 5, 8):
            C = ep.coulomb_cost(K)
            assert np.array_equal(C, C.T)
            assert np.all(np.diag(C) == 0.0)
            off = ~np.eye(K, dtype=bool)
            assert np.all(C[off] > 0.0)
            row = C[0]
            assert np.all(np.diff(row[1:]) < 0.0)  # decreasing in distance

    def test_k_too_small(self):
        with pytest.raises(ep.DomainError):
            ep.coulomb_cost(1)


class TestMmotInstance:
    def test_k2_forced_vertex(self):
        inst = ep.mmot_instance(2)
        vs = ep.enumerate_vertices(inst.polyhedra[0])
        assert len(vs) == 1
        assert np.allclose(_as_matrix(vs.vertices[0], 2), [[0.0, 1.0], [1.0, 0.0]])

    def test_dimensions(self, mmot4):
        assert mmot4.n_blocks == 3
        assert mmot4.block_dim == 16
        spec = ep.MmotSpec(4)
        assert spec.h * spec.K == pytest.approx(1.0)
        assert spec.block_dim == 16

    def test_constraints_encode_plans(self, mmot4):
        poly = mmot4.polyhedra[0]
        x = ep.mmot_optimal_solution(4).block(0)
        X = _as_matrix(x, 4)
        assert np.allclose(X.sum(axis=1), 1.0)
        assert np.allclose(X.sum(axis=0), 1.0)
        assert np.trace(X) == 0.0
        assert ep.check_membership(poly, x)
        shifted = x.copy()
        shifted[0] += 0.5
        assert not ep.check_membership(poly, shifted)

    def test_kronecker_identity(self, mmot4):
        rng = np.random.default_rng(8)
        C = ep.coulomb_cost(4)
        Q = mmot4.objective.pairwise[(0, 1)]
        for _ in range(20):
            X, Y = rng.uniform(size=(4, 4)), rng.uniform(size=(4, 4))
            x, y = X.flatten(order="F"), Y.flatten(order="F")
            assert float(x @ Q @ y) == pytest.approx(
                float(np.sum(X * (Y @ C))), rel=1e-12
            )

    def test_k_too_small(self):
        with pytest.raises(ep.DomainError):
            ep.mmot_instance(1)


class TestOptimalSolution:
    def test_blocks_are_derangement_permutations(self):
        for K in (4, 8):
            z = ep.mmot_optimal_solution(K)
            for i in range(3):
                X = _as_matrix(z.block(i), K)
                assert set(np.unique(X)) <= {0.0, 1.0}
                assert np.all(X.sum(axis=0) == 1.0)
                assert np.all(X.sum(axis=1) == 1.0)
                assert np.all(np.diag(X) == 0.0)
                assert X.sum() == K

    def test_entrywise_offsets(self):
        K = 8
        z = ep.mmot_optimal_solution(K)
        X1, X2, X3 = (_as_matrix(z.block(i), K) for i in range(3))
        for i in range(K):
            for j in range(K):
                assert X1[i, j] == (1.0 if (i - j == 3 * K // 4 or j - i == K // 4) else 0.0)
                assert X2[i, j] == (1.0 if abs(i - j) == K // 2 else 0.0)
                assert X3[i, j] == (1.0 if (i - j == K // 4 or j - i == 3 * K // 4) else 0.0)

    def test_complementary_and_vertices(self, mmot4):
        z = ep.mmot_optimal_solution(4)
        p, ok = ep.complementarity_residual(z)
        assert p == 0.0 and ok
        for i in range(3):
            assert ep.is_vertex(mmot4.polyhedra[i], z.block(i))

    def test_requires_divisibility(self):
        with pytest.raises(ep.DomainError):
            ep.mmot_optimal_solution(6)


class TestPerturbedSolution:
    def test_penalty_value(self):
        z = ep.mmot_perturbed(8, 0.1)
        assert ep.eval_penalty(z) == pytest.approx(0.08, abs=1e-15)

    def test_converges_to_optimum(self):
        z_star = ep.mmot_optimal_solution(8)
        gap = [
            np.max(np.abs(ep.mmot_perturbed(8, eps).blocks - z_star.blocks))
            for eps in (0.1, 0.01, 1e-6)
        ]
        assert gap == sorted(gap, reverse=True)
        assert gap[-1] <= 1e-6 + 1e-15

    def test_feasible_members(self):
        z = ep.mmot_perturbed(8, 0.1)
        inst = ep.mmot_instance(8)
        for i in range(3):
            assert ep.check_membership(inst.polyhedra[i], z.block(i))

    def test_middle_block_unchanged(self):
        z = ep.mmot_perturbed(8, 0.3)
        z_star = ep.mmot_optimal_solution(8)
        assert np.array_equal(z.block(1), z_star.block(1))

    def test_parameter_domain(self):
        with pytest.raises(ep.DomainError):
            ep.mmot_perturbed(4, 0.1)  # needs K > 4
        with pytest.raises(ep.DomainError):
            ep.mmot_perturbed(10, 0.1)  # needs 4 | K
        with pytest.raises(ep.DomainError):
            ep.mmot_perturbed(8, 0.0)
        with pytest.raises(ep.DomainError):
            ep.mmot_perturbed(8, 1.0)


class TestErrorBoundProbe:
    def test_closed_form_identities(self):
        for K in (8, 12):
            for row in ep.error_bound_probe(K, (0.1, 0.01, 0.001)):
                assert row.p_value == pytest.approx(row.predicted_p, abs=1e-12)
                assert row.dist_upper == pytest.approx(row.predicted_dist, abs=1e-9)
                assert row.ratio == pytest.approx(
                    2.0 / (math.sqrt(K) * row.epsilon), abs=1e-9
                )

    def test_k12_penalty_value(self):
        row = ep.error_bound_probe(12, (0.01,))[0]
        assert row.p_value == pytest.approx(0.0012, abs=1e-15)

    def test_ratio_scaling(self):
        rows = ep.error_bound_probe(8, (0.1, 0.001))
        assert rows[1].ratio == pytest.approx(100.0 * rows[0].ratio, rel=1e-9)

    def test_ratio_increases_as_epsilon_shrinks(self):
        rows = ep.error_bound_probe(8)
        by_desc_eps = sorted(rows, key=lambda r: -r.epsilon)
        ratios = [r.ratio for r in by_desc_eps]
        assert all(b > a for a, b in zip(ratios, ratios[1:]))


class TestRandomInstance:
    def test_deterministic(self):
        a = ep.random_instance(2, 3, seed=7)
        b = ep.random_instance(2, 3, seed=7)
        assert np.array_equal(a.objective.linear, b.objective.linear)
        for key in a.objective.pairwise:
            assert np.array_equal(a.objective.pairwise[key], b.objective.pairwise[key])
        for pa, pb in zip(a.polyhedra, b.polyhedra):
            assert np.array_equal(pa.eq_matrix, pb.eq_matrix)
            assert np.array_equal(pa.ineq_matrix, pb.ineq_matrix)

    def test_complementary_lattice_nonempty(self):
        for seed in (0, 1, 2, 3):
            inst = ep.random_instance(2, 3, seed=seed)
            opt = ep.brute_force_mpgcc_opt(inst)
            assert len(opt.argmin) >= 1

    def test_warning_when_blocks_exceed_dim(self):
        inst = ep.random_instance(3, 2, seed=1)
        assert len(inst.warnings) == 1
        assert "complementary" in inst.warnings[0]

    def test_vertices_are_scaled_basis_points(self):
        inst = ep.random_instance(2, 4, seed=5)
        for poly in inst.polyhedra:
            vs = ep.enumerate_vertices(poly)
            assert len(vs) == 4
            for v in vs.vertices:
                assert np.count_nonzero(np.abs(v) > 1e-9) == 1

    def test_parameter_validation(self):
        with pytest.raises(ep.DomainError):
            ep.random_instance(1, 3, seed=0)
        with pytest.raises(ep.BudgetExceededError):
            ep.random_instance(2, 50, seed=0, vertex_budget=10)
