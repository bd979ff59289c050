from __future__ import annotations

import numpy as np
import pytest

from dance.errors import ValidationError
from dance.explain import class_pair_weights, compare_explanations, contributions, top_k_explanation
from dance.train import predict

from helpers import random_model
from oracles import top_n_by_abs_weight


def test_contributions_elementwise_product():
    rng = np.random.default_rng(1)
    model = random_model(rng, num_motion=1, num_object=1, num_scene=0, num_classes=2, feature_dim=3)
    model.w_classifier[0] = [0.5, 0.0]
    assert contributions(np.array([1.0, 2.0]), model, 0).tolist() == [0.5, 0.0]


def test_zero_activation_zero_contribution():
    rng = np.random.default_rng(2)
    model = random_model(rng)
    z = rng.normal(size=model.num_concepts)
    z[3] = 0.0
    assert contributions(z, model, 1)[3] == 0.0


def test_decomposition_identity():
    rng = np.random.default_rng(3)
    for _ in range(20):
        model = random_model(rng)
        x = rng.normal(size=model.feature_dim)
        pred = predict(model, x)
        for c in range(model.num_classes):
            total = contributions(pred.standardized, model, c).sum() + model.bias[c]
            assert abs(total - pred.logits[c]) < 1e-6


def test_dominant_concept_ranks_first():
    rng = np.random.default_rng(5)
    model = random_model(rng)
    x = rng.normal(size=model.feature_dim)
    pred = predict(model, x)
    cls = pred.predicted_class
    model.w_classifier[cls] = 0.01
    dominant = 4
    model.w_classifier[cls, dominant] = 100.0 / max(abs(pred.standardized[dominant]), 1e-6) * np.sign(
        pred.standardized[dominant] or 1.0
    )
    explanation = top_k_explanation(x, model, k=3)
    assert explanation.items[0].concept_index == dominant


def test_equal_contributions_tie_break_lower_index():
    rng = np.random.default_rng(7)
    model = random_model(rng, num_motion=2, num_object=0, num_scene=0, num_classes=2, feature_dim=4)
    model.act_mean[:] = 0.0
    model.act_std[:] = 1.0
    model.w_motion[0] = model.w_motion[1]  # identical activations
    model.w_classifier[:] = 1.0            # identical weights
    model.bias[:] = 0.0
    x = rng.normal(size=4)
    explanation = top_k_explanation(x, model, k=2)
    assert [i.concept_index for i in explanation.items] == [0, 1]


def test_items_sorted_by_abs_contribution():
    rng = np.random.default_rng(9)
    model = random_model(rng)
    x = rng.normal(size=model.feature_dim)
    explanation = top_k_explanation(x, model, k=model.num_concepts)
    mags = [abs(i.contribution) for i in explanation.items]
    assert mags == sorted(mags, reverse=True)


def test_k_clamped_with_warning(caplog):
    rng = np.random.default_rng(11)
    model = random_model(rng)
    explanation = top_k_explanation(rng.normal(size=model.feature_dim), model, k=model.num_concepts + 10)
    assert len(explanation.items) == model.num_concepts


def test_kind_partition_from_index_ranges():
    rng = np.random.default_rng(13)
    model = random_model(rng, num_motion=2, num_object=2, num_scene=1, with_medoids=True)
    explanation = top_k_explanation(rng.normal(size=model.feature_dim), model, k=5)
    kinds = {i.concept_index: i.kind for i in explanation.items}
    assert kinds[0] == "motion" and kinds[1] == "motion"
    assert kinds[2] == "object" and kinds[3] == "object"
    assert kinds[4] == "scene"
    motion_items = [i for i in explanation.items if i.kind == "motion"]
    assert all(i.medoid is not None and "coords" in i.medoid for i in motion_items)


def test_permutation_consistency_of_explanations():
    # permuting concept order (weights, stats, names together) must preserve
    # the (kind, name, contribution) multiset of the items
    rng = np.random.default_rng(17)
    model = random_model(rng, num_motion=3, num_object=0, num_scene=0, num_classes=3)
    x = rng.normal(size=model.feature_dim)
    base = top_k_explanation(x, model, k=3)

    perm = np.array([2, 0, 1])
    permuted = model.copy()
    permuted.w_motion = model.w_motion[perm]
    permuted.act_mean = model.act_mean[perm]
    permuted.act_std = model.act_std[perm]
    permuted.w_classifier = model.w_classifier[:, perm]
    permuted.concept_space.motion_names = [model.concept_space.motion_names[i] for i in perm]
    other = top_k_explanation(x, permuted, k=3)

    def multiset(e):
        return sorted((i.kind, i.name, round(i.contribution, 10)) for i in e.items)

    assert multiset(base) == multiset(other)


# -- class pair weights -----------------------------------------------------------

def test_disjoint_supports_share_nothing():
    rng = np.random.default_rng(19)
    model = random_model(rng, num_motion=2, num_object=2, num_scene=0, num_classes=2)
    model.w_classifier[:] = 0.0
    model.w_classifier[0, :2] = [1.0, 0.5]
    model.w_classifier[1, 2:] = [0.8, 0.6]
    data = class_pair_weights(model, 0, 1, top_n=2)
    assert all(not n["shared"] for n in data.concept_nodes)


def test_identical_rows_share_everything():
    rng = np.random.default_rng(23)
    model = random_model(rng, num_classes=3)
    model.w_classifier[1] = model.w_classifier[0]
    data = class_pair_weights(model, 0, 1, top_n=3)
    assert all(n["shared"] for n in data.concept_nodes)


def test_same_class_twice_rejected():
    rng = np.random.default_rng(29)
    model = random_model(rng)
    with pytest.raises(ValidationError):
        class_pair_weights(model, 1, 1)


def test_invalid_class_rejected():
    rng = np.random.default_rng(30)
    model = random_model(rng)
    with pytest.raises(ValidationError):
        class_pair_weights(model, 0, model.num_classes)


def test_nodes_and_edges_match_brute_force_top_n():
    rng = np.random.default_rng(31)
    for _ in range(10):
        model = random_model(rng, num_motion=4, num_object=3, num_scene=3, num_classes=5)
        a, b = 1, 3
        top_n = int(rng.integers(1, 6))
        data = class_pair_weights(model, a, b, top_n=top_n)
        exp_a = top_n_by_abs_weight(model.w_classifier[a], top_n)
        exp_b = top_n_by_abs_weight(model.w_classifier[b], top_n)
        expected_nodes = sorted(set(exp_a) | set(exp_b))
        assert [n["concept_index"] for n in data.concept_nodes] == expected_nodes
        assert {(e["concept_index"], e["class_index"]) for e in data.edges} == {
            (i, c) for i in expected_nodes for c in (a, b)
        }
        for e in data.edges:
            assert e["weight"] == pytest.approx(model.w_classifier[e["class_index"], e["concept_index"]])


def test_sankey_independent_of_inputs():
    rng = np.random.default_rng(37)
    model = random_model(rng)
    before = class_pair_weights(model, 0, 1, top_n=3).to_dict()
    predict(model, rng.normal(size=model.feature_dim))  # unrelated inference
    after = class_pair_weights(model, 0, 1, top_n=3).to_dict()
    assert before == after


# -- paired comparison ---------------------------------------------------------------

def test_identical_inputs_zero_deltas():
    rng = np.random.default_rng(41)
    model = random_model(rng)
    x = rng.normal(size=model.feature_dim)
    pair = compare_explanations(x, x.copy(), model, k=3)
    assert not pair.prediction_changed
    assert np.allclose(pair.contribution_deltas, 0.0)


def test_flipping_pair_sets_flag():
    rng = np.random.default_rng(43)
    model = random_model(rng)
    x = rng.normal(size=model.feature_dim)
    # find a second input with a different argmax
    for _ in range(100):
        x2 = rng.normal(size=model.feature_dim)
        if predict(model, x2).predicted_class != predict(model, x).predicted_class:
            break
    pair = compare_explanations(x, x2, model)
    assert pair.prediction_changed


def test_deltas_match_recomputed_contributions():
    rng = np.random.default_rng(47)
    model = random_model(rng)
    x1 = rng.normal(size=model.feature_dim)
    x2 = rng.normal(size=model.feature_dim)
    pair = compare_explanations(x1, x2, model)
    cls = pair.forward.predicted_class
    expected = contributions(predict(model, x1).standardized, model, cls) - contributions(
        predict(model, x2).standardized, model, cls
    )
    assert np.allclose(pair.contribution_deltas, expected, atol=1e-12)
