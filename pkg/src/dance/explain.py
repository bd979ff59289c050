"""Structured explanations: concept contributions, top-k items, class-pair weights.

A concept's contribution to a class is the product of its standardized
activation and the classifier weight tying it to that class, so the class
logit decomposes exactly as bias + sum of contributions.  Contributions are
computed on standardized activations because those are what the classifier
consumes; this is what makes the decomposition identity exact.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .intervene import deactivate_concepts
from .model import DanceModel
from .train import Prediction, predict

log = logging.getLogger(__name__)

DEFAULT_TOP_K = 3


def contributions(z_std: np.ndarray, model: DanceModel, class_index: int) -> np.ndarray:
    """Per-concept contribution vector toward one class logit."""
    if not 0 <= class_index < model.num_classes:
        raise ValidationError(f"class index {class_index} outside 0..{model.num_classes - 1}")
    return np.asarray(z_std, dtype=np.float64) * model.w_classifier[class_index]


@dataclass
class ExplanationItem:
    concept_index: int
    kind: str
    name: str
    activation: float      # standardized activation consumed by the classifier
    weight: float
    contribution: float
    medoid: dict | None = None

    def to_dict(self) -> dict:
        return {
            "concept_index": self.concept_index,
            "kind": self.kind,
            "name": self.name,
            "activation": self.activation,
            "weight": self.weight,
            "contribution": self.contribution,
            "medoid": self.medoid,
        }


@dataclass
class Explanation:
    video_id: str
    predicted_class: int
    predicted_class_name: str
    class_distribution: list[float]
    logits: list[float]
    bias: float                       # bias of the predicted class
    items: list[ExplanationItem]
    deactivated: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "video_id": self.video_id,
            "predicted_class": self.predicted_class,
            "predicted_class_name": self.predicted_class_name,
            "class_distribution": self.class_distribution,
            "logits": self.logits,
            "bias": self.bias,
            "items": [item.to_dict() for item in self.items],
            "deactivated": self.deactivated,
        }


def _ranked_items(model: DanceModel, z_std: np.ndarray, class_index: int, k: int) -> list[ExplanationItem]:
    contrib = contributions(z_std, model, class_index)
    order = sorted(range(model.num_concepts), key=lambda i: (-abs(contrib[i]), i))
    items = []
    for idx in order[:k]:
        medoid = model.concept_space.medoid_of(idx)
        items.append(
            ExplanationItem(
                concept_index=idx,
                kind=model.concept_space.kind_of(idx),
                name=model.concept_space.name_of(idx),
                activation=float(z_std[idx]),
                weight=float(model.w_classifier[class_index, idx]),
                contribution=float(contrib[idx]),
                medoid=None
                if medoid is None
                else {
                    "video_id": medoid.video_id,
                    "clip_index": medoid.clip_index,
                    "coords": medoid.coords.tolist(),
                },
            )
        )
    return items


def top_k_explanation(
    x: np.ndarray,
    model: DanceModel,
    k: int = DEFAULT_TOP_K,
    video_id: str = "",
    deactivated: list[int] | None = None,
) -> Explanation:
    """Predict and explain one input, optionally with concepts deactivated.

    Items are the k concepts with the largest |contribution| toward the
    predicted class, ties broken by lower concept index.
    """
    if k < 1:
        raise ValidationError(f"k must be >= 1, got {k}")
    if k > model.num_concepts:
        log.warning("k=%d exceeds %d concepts; clamping", k, model.num_concepts)
        k = model.num_concepts
    pred = predict(model, x)
    z_std = pred.standardized
    if deactivated:
        z_std = deactivate_concepts(z_std, deactivated)
        logits = model.w_classifier @ z_std + model.bias
        shifted = np.exp(logits - logits.max())
        probs = shifted / shifted.sum()
        pred = Prediction(probs=probs, logits=logits, activations=pred.activations, standardized=z_std)
    cls = pred.predicted_class
    return Explanation(
        video_id=video_id,
        predicted_class=cls,
        predicted_class_name=model.class_names[cls],
        class_distribution=[float(p) for p in pred.probs],
        logits=[float(v) for v in pred.logits],
        bias=float(model.bias[cls]),
        items=_ranked_items(model, z_std, cls, k),
        deactivated=sorted(deactivated) if deactivated else [],
    )


# ---------------------------------------------------------------------------
# model-level explanation (class-pair weight diagram)
# ---------------------------------------------------------------------------

@dataclass
class SankeyData:
    class_a: int
    class_b: int
    concept_nodes: list[dict]   # {concept_index, kind, name, shared}
    edges: list[dict]           # {concept_index, class_index, weight}

    def to_dict(self) -> dict:
        return {
            "class_a": self.class_a,
            "class_b": self.class_b,
            "concept_nodes": self.concept_nodes,
            "edges": self.edges,
        }


def _top_by_weight(row: np.ndarray, top_n: int) -> list[int]:
    return sorted(range(len(row)), key=lambda i: (-abs(row[i]), i))[:top_n]


def class_pair_weights(model: DanceModel, class_a: int, class_b: int, top_n: int = 5) -> SankeyData:
    """Weight-diagram data for a pair of classes.

    Selects the union of each class's top_n concepts by |weight|; a concept is
    shared when it appears in both top sets.  Edges carry the raw classifier
    weight to each of the two classes.  Depends only on classifier weights,
    never on any input video.
    """
    for c in (class_a, class_b):
        if not 0 <= c < model.num_classes:
            raise ValidationError(f"class index {c} outside 0..{model.num_classes - 1}")
    if class_a == class_b:
        raise ValidationError("class_pair_weights needs two distinct classes")
    top_a = set(_top_by_weight(model.w_classifier[class_a], top_n))
    top_b = set(_top_by_weight(model.w_classifier[class_b], top_n))
    selected = sorted(top_a | top_b)
    nodes = [
        {
            "concept_index": idx,
            "kind": model.concept_space.kind_of(idx),
            "name": model.concept_space.name_of(idx),
            "shared": idx in top_a and idx in top_b,
        }
        for idx in selected
    ]
    edges = [
        {"concept_index": idx, "class_index": cls, "weight": float(model.w_classifier[cls, idx])}
        for idx in selected
        for cls in (class_a, class_b)
    ]
    return SankeyData(class_a=class_a, class_b=class_b, concept_nodes=nodes, edges=edges)


# ---------------------------------------------------------------------------
# paired comparison (e.g. a clip and its time-reversed variant)
# ---------------------------------------------------------------------------

@dataclass
class ExplanationPair:
    forward: Explanation
    backward: Explanation
    prediction_changed: bool
    contribution_deltas: list[float]   # toward the forward prediction's class

    def to_dict(self) -> dict:
        return {
            "forward": self.forward.to_dict(),
            "backward": self.backward.to_dict(),
            "prediction_changed": self.prediction_changed,
            "contribution_deltas": self.contribution_deltas,
        }


def compare_explanations(
    x_fwd: np.ndarray, x_bwd: np.ndarray, model: DanceModel, k: int = DEFAULT_TOP_K
) -> ExplanationPair:
    """Explain two feature vectors of the same video variant pair and diff them.

    The per-concept deltas are measured toward the forward prediction's class
    so both terms share a weight row.
    """
    fwd = top_k_explanation(x_fwd, model, k=k, video_id="forward")
    bwd = top_k_explanation(x_bwd, model, k=k, video_id="backward")
    z_fwd = predict(model, x_fwd).standardized
    z_bwd = predict(model, x_bwd).standardized
    deltas = contributions(z_fwd, model, fwd.predicted_class) - contributions(z_bwd, model, fwd.predicted_class)
    return ExplanationPair(
        forward=fwd,
        backward=bwd,
        prediction_changed=fwd.predicted_class != bwd.predicted_class,
        contribution_deltas=[float(d) for d in deltas],
    )
