import json
import math
from pathlib import Path

import numpy as np
import pytest

import exactpen as ep

DATA = Path(__file__).parent / "data"


def _assert_instances_equal(a: ep.Instance, b: ep.Instance):
    assert a.objective.constant == b.objective.constant
    assert np.array_equal(a.objective.linear, b.objective.linear)
    assert a.objective.pairwise.keys() == b.objective.pairwise.keys()
    for key in a.objective.pairwise:
        assert np.array_equal(a.objective.pairwise[key], b.objective.pairwise[key])
    assert a.objective.higher_terms == b.objective.higher_terms
    assert a.warnings == b.warnings
    for pa, pb in zip(a.polyhedra, b.polyhedra):
        assert np.array_equal(pa.eq_matrix, pb.eq_matrix)
        assert np.array_equal(pa.eq_rhs, pb.eq_rhs)
        assert np.array_equal(pa.ineq_matrix, pb.ineq_matrix)
        assert np.array_equal(pa.ineq_rhs, pb.ineq_rhs)
        assert pa.nonneg == pb.nonneg


class TestRoundTrip:
    def test_shipped_transport_document_is_canonical(self):
        text = (DATA / "mmot_k4.json").read_text()
        inst = ep.parse_instance(text)
        assert ep.emit_instance(inst) == text
        _assert_instances_equal(inst, ep.mmot_instance(4))

    def test_random_instances(self):
        for seed in range(6):
            inst = ep.random_instance(2 + seed % 2, 3, seed=seed)
            again = ep.parse_instance(ep.emit_instance(inst))
            _assert_instances_equal(inst, again)
            assert ep.emit_instance(again) == ep.emit_instance(inst)

    def test_higher_terms_and_constants(self):
        term = ep.Monomial(-0.125, ((0, 1), (1, 0), (2, 2)))
        obj = ep.MultiAffineObjective(
            n_blocks=3,
            block_dim=3,
            constant=0.1 + 0.2,  # deliberately not exactly 0.3
            linear=np.full((3, 3), 1.0 / 3.0),
            higher_terms=(term,),
        )
        poly = ep.Polyhedron(dim=3, eq_matrix=np.ones((1, 3)), eq_rhs=np.ones(1))
        inst = ep.Instance(objective=obj, polyhedra=(poly, poly, poly))
        again = ep.parse_instance(ep.emit_instance(inst))
        _assert_instances_equal(inst, again)
        assert again.objective.constant == 0.1 + 0.2

    def test_float_fidelity(self):
        values = [1.0 / 3.0, math.pi, 1e-17, 6.02e23, 0.1 + 0.2]
        obj = ep.MultiAffineObjective(
            n_blocks=2, block_dim=5, linear=np.array([values, values[::-1]])
        )
        poly = ep.Polyhedron(dim=5, eq_matrix=np.ones((1, 5)), eq_rhs=np.ones(1))
        inst = ep.Instance(objective=obj, polyhedra=(poly, poly))
        again = ep.parse_instance(ep.emit_instance(inst))
        assert np.array_equal(again.objective.linear, inst.objective.linear)

    def test_sparse_and_dense_pairwise_forms(self, mmot4):
        doc = json.loads(ep.emit_instance(mmot4))
        entry = doc["objective"]["pairwise"][0]
        assert "triplets" in entry  # kron(C, I) is sparse enough
        dense_obj = ep.MultiAffineObjective(
            n_blocks=2, block_dim=2, pairwise={(0, 1): np.full((2, 2), 2.0)}
        )
        poly = ep.Polyhedron(dim=2, eq_matrix=np.ones((1, 2)), eq_rhs=np.ones(1))
        dense_inst = ep.Instance(objective=dense_obj, polyhedra=(poly, poly))
        dense_doc = json.loads(ep.emit_instance(dense_inst))
        assert "dense" in dense_doc["objective"]["pairwise"][0]
        _assert_instances_equal(
            dense_inst, ep.parse_instance(ep.emit_instance(dense_inst))
        )


def _base_document():
    return {
        "schema_version": "1",
        "objective": {
            "constant": 0.0,
            "linear": [[0.0, 0.0], [0.0, 0.0]],
            "pairwise": [],
            "higher_terms": [],
        },
        "polyhedra": [
            {"eq": {"matrix": [[1.0, 1.0]], "rhs": [1.0]}, "nonneg": True},
            {"eq": {"matrix": [[1.0, 1.0]], "rhs": [1.0]}, "nonneg": True},
        ],
        "warnings": [],
    }


class TestValidation:
    def test_invalid_json_reports_location(self):
        with pytest.raises(ep.SchemaError, match=r"line 2"):
            ep.parse_instance('{\n  "schema_version": }')

    def test_missing_field_path(self):
        doc = _base_document()
        del doc["objective"]["linear"]
        with pytest.raises(ep.SchemaError, match=r"\$\.objective"):
            ep.parse_instance(json.dumps(doc))

    def test_pair_key_order_rejected(self):
        doc = _base_document()
        doc["objective"]["pairwise"] = [
            {"i": 1, "j": 1, "dense": [[0.0, 0.0], [0.0, 0.0]]}
        ]
        with pytest.raises(ep.SchemaError, match="i < j"):
            ep.parse_instance(json.dumps(doc))

    def test_duplicate_pair_rejected(self):
        doc = _base_document()
        entry = {"i": 0, "j": 1, "dense": [[0.0, 0.0], [0.0, 0.0]]}
        doc["objective"]["pairwise"] = [entry, dict(entry)]
        with pytest.raises(ep.SchemaError, match="duplicate"):
            ep.parse_instance(json.dumps(doc))

    def test_monomial_repeated_block_rejected(self):
        doc = _base_document()
        doc["objective"]["higher_terms"] = [
            {"coeff": 1.0, "factors": [[0, 0], [0, 1], [1, 0]]}
        ]
        with pytest.raises(ep.SchemaError):
            ep.parse_instance(json.dumps(doc))

    def test_nonneg_false_rejected(self):
        doc = _base_document()
        doc["polyhedra"][0]["nonneg"] = False
        with pytest.raises(ep.SchemaError):
            ep.parse_instance(json.dumps(doc))

    def test_polyhedron_count_mismatch(self):
        doc = _base_document()
        doc["polyhedra"] = doc["polyhedra"][:1]
        with pytest.raises(ep.SchemaError, match="polyhedra"):
            ep.parse_instance(json.dumps(doc))

    def test_dimension_mismatch(self):
        doc = _base_document()
        doc["polyhedra"][0]["eq"]["matrix"] = [[1.0, 1.0, 1.0]]
        with pytest.raises(ep.SchemaError):
            ep.parse_instance(json.dumps(doc))

    def test_bad_triplet_rejected(self):
        doc = _base_document()
        doc["objective"]["pairwise"] = [{"i": 0, "j": 1, "triplets": [[0, 5, 1.0]]}]
        with pytest.raises(ep.SchemaError, match="out of range"):
            ep.parse_instance(json.dumps(doc))

    def test_unsupported_schema_version(self):
        doc = _base_document()
        doc["schema_version"] = "99"
        with pytest.raises(ep.SchemaError, match="version"):
            ep.parse_instance(json.dumps(doc))


class TestReports:
    def test_kind_validated(self, mmot4):
        with pytest.raises(ep.SchemaError):
            ep.build_report("frobnicate", mmot4, {}, {})

    def test_instance_hash_stable(self, mmot4):
        h1 = ep.instance_sha256(mmot4)
        h2 = ep.instance_sha256(ep.mmot_instance(4))
        assert h1 == h2
        assert len(h1) == 64
        assert h1 != ep.instance_sha256(ep.mmot_instance(8))

    def test_report_payload_deterministic(self, two_simplex_instance):
        def make():
            rep = ep.bcd_solve(
                two_simplex_instance,
                ep.SolveOptions(beta=2.0),
                ep.BlockPoint(np.full((2, 3), 1.0 / 3.0)),
            )
            doc = ep.build_report(
                "solve",
                two_simplex_instance,
                {"beta": 2.0},
                rep,
                {"total_s": 0.0},
            )
            return ep.emit_report(doc)

        assert make() == make()

    def test_report_structure(self, two_simplex_instance):
        rep = ep.certify_exactness(two_simplex_instance, 2.0, samples=5, seed=0)
        doc = ep.build_report("certify", two_simplex_instance, {"beta": 2.0}, rep)
        parsed = json.loads(ep.emit_report(doc))
        assert parsed["kind"] == "certify"
        assert parsed["inputs"]["instance_sha256"] == ep.instance_sha256(
            two_simplex_instance
        )
        assert parsed["payload"]["vertex_level_equal"] is True
        assert parsed["payload"]["feasible"]["value"] == 0.0
        assert "timings" in parsed
