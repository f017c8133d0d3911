import json

import numpy as np
import pytest

from inclined import (
    BranchProjectionSpec,
    canonical_json,
    derive_seed,
    digest_vectors,
    find_inclined_vector,
    toy_stage,
)
from inclined.serialize import (
    branch_spec_from_obj,
    branch_spec_to_obj,
    inclination_from_obj,
    inclination_to_obj,
    stage_from_obj,
    stage_to_obj,
    vector_from_obj,
    vector_to_obj,
    vectors_from_obj,
)


def test_canonical_json_is_sorted_and_compact():
    assert canonical_json({"b": 1, "a": [2, {"d": 3, "c": 4}]}) == '{"a":[2,{"c":4,"d":3}],"b":1}'


def test_canonical_json_rejects_nan():
    with pytest.raises(ValueError):
        canonical_json({"x": float("nan")})


def test_derive_seed_is_deterministic_and_tag_sensitive():
    assert derive_seed(7, "level", 1) == derive_seed(7, "level", 1)
    assert derive_seed(7, "level", 1) != derive_seed(7, "level", 2)
    assert derive_seed(7, "level", 1) != derive_seed(8, "level", 1)
    assert 0 <= derive_seed(0) < 2 ** 64


def test_vector_round_trip():
    v = np.array([1.5 - 2.25j, 0.0 + 1e-17j, -3.0], dtype=complex)
    obj = vector_to_obj(v)
    assert obj["dim"] == 3
    np.testing.assert_array_equal(vector_from_obj(obj), v)
    # the canonical encoding round-trips through text exactly
    again = vector_from_obj(json.loads(canonical_json(obj)))
    np.testing.assert_array_equal(again, v)


def test_vector_from_obj_rejects_malformed_input():
    with pytest.raises(ValueError):
        vector_from_obj({"dim": 2, "entries": [[1, 0]]})
    with pytest.raises(ValueError):
        vector_from_obj([1, 2, 3])
    with pytest.raises(ValueError):
        vector_from_obj({"dim": 1, "entries": [[float("inf"), 0]]})


def test_vectors_from_obj_requires_nonempty_list():
    with pytest.raises(ValueError):
        vectors_from_obj([])


def test_digest_is_content_addressed():
    a = [np.array([1.0, 2.0 + 1j])]
    b = [np.array([1.0, 2.0 + 1j])]
    c = [np.array([1.0, 2.0 - 1j])]
    assert digest_vectors(a) == digest_vectors(b)
    assert digest_vectors(a) != digest_vectors(c)


def test_stage_round_trip():
    stage = toy_stage([4, 4, 2])
    again = stage_from_obj(stage_to_obj(stage))
    assert again == stage


def test_index_space_round_trip():
    from inclined import TensorIndexSpace
    from inclined.serialize import space_from_obj, space_to_obj

    sp = TensorIndexSpace(("a", "b", "c"), 3)
    obj = space_to_obj(sp)
    assert obj == {"axes": ["a", "b", "c"], "alphabet_size": 3}
    assert space_from_obj(json.loads(canonical_json(obj))) == sp


def test_projection_spec_wire_round_trip():
    from inclined import AxisProjectionSpec, ProductProjectionSpec, TensorIndexSpace, apply_axis, apply_product
    from inclined.serialize import projection_spec_from_obj, projection_spec_to_obj

    rng = np.random.default_rng(3)
    sp = TensorIndexSpace(("a", "b"), 3)
    v = rng.standard_normal(3) + 1j * rng.standard_normal(3)
    axis_spec = AxisProjectionSpec(sp, "b", v)
    decoded = projection_spec_from_obj(json.loads(canonical_json(projection_spec_to_obj(axis_spec))))
    x = rng.standard_normal(9) + 1j * rng.standard_normal(9)
    np.testing.assert_allclose(apply_product(decoded, x), apply_axis(axis_spec, x), atol=1e-12)

    prod = ProductProjectionSpec(sp, {"a": v, "b": rng.standard_normal(3) + 0j})
    decoded = projection_spec_from_obj(json.loads(canonical_json(projection_spec_to_obj(prod))))
    np.testing.assert_allclose(apply_product(decoded, x), apply_product(prod, x), atol=1e-12)


def test_branch_spec_round_trip():
    stage = toy_stage([3, 2])
    rng = np.random.default_rng(1)
    dirs = tuple(rng.standard_normal(lv.d) + 1j * rng.standard_normal(lv.d) for lv in stage.levels)
    spec = BranchProjectionSpec(stage=stage, branch="01", directions=dirs)
    again = branch_spec_from_obj(json.loads(canonical_json(branch_spec_to_obj(spec))))
    assert again.branch == spec.branch
    assert again.stage == spec.stage
    for u, v in zip(again.directions, spec.directions):
        np.testing.assert_array_equal(u, v)


def test_branch_spec_from_obj_rejects_wrong_sigma():
    stage = toy_stage([2])
    spec = BranchProjectionSpec(
        stage=stage, branch="0", directions=(np.array([1, 0], dtype=complex),))
    obj = branch_spec_to_obj(spec)
    obj["levels"][0]["sigma"] = "1"
    with pytest.raises(ValueError, match="prefix"):
        branch_spec_from_obj(obj)


def test_inclination_certificate_round_trip():
    rng = np.random.default_rng(2)
    family = [rng.standard_normal(8) + 1j * rng.standard_normal(8) for _ in range(5)]
    cert = find_inclined_vector(family, 0.9, 200, 3)
    again = inclination_from_obj(json.loads(canonical_json(inclination_to_obj(cert))))
    assert again.achieved == cert.achieved
    assert again.family_digest == cert.family_digest
    np.testing.assert_array_equal(again.candidate, cert.candidate)
