"""Human-in-the-loop edits: concept deactivation, weight edits, evaluation.

Edits never mutate a model in place; they return a new version with an
appended audit entry so a UI can diff and revert.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import datetime, timezone

import numpy as np

from .errors import ValidationError
from .manifest import DatasetManifest
from .model import DanceModel
from .train import predict_batch


def deactivate_concepts(
    z_std: np.ndarray,
    indices: list[int] | tuple[int, ...],
    mode: str = "standardized",
    act_mean: np.ndarray | None = None,
    act_std: np.ndarray | None = None,
) -> np.ndarray:
    """Remove concepts from the evidence vector.

    standardized mode zeroes the standardized activation (no deviation from
    the dataset average); raw mode zeroes the underlying raw activation, which
    lands at -mean/std in standardized space and needs the model's
    standardization stats.
    """
    z = np.asarray(z_std, dtype=np.float64).copy()
    for idx in indices:
        if not 0 <= idx < z.shape[-1]:
            raise ValidationError(f"concept index {idx} outside 0..{z.shape[-1] - 1}")
    idx = list(indices)
    if mode == "standardized":
        z[..., idx] = 0.0
    elif mode == "raw":
        if act_mean is None or act_std is None:
            raise ValidationError("raw mode needs act_mean and act_std")
        z[..., idx] = -act_mean[idx] / act_std[idx]
    else:
        raise ValidationError(f"unknown deactivation mode {mode!r}")
    return z


def edit_class_weight(
    model: DanceModel,
    class_index: int,
    concept_index: int,
    new_value: float,
    timestamp: str | None = None,
) -> DanceModel:
    """Return a new model version with one classifier weight replaced.

    The original model is untouched; the edit (including the old value) is
    appended to the copy's edit log.
    """
    if not 0 <= class_index < model.num_classes:
        raise ValidationError(f"class index {class_index} outside 0..{model.num_classes - 1}")
    if not 0 <= concept_index < model.num_concepts:
        raise ValidationError(f"concept index {concept_index} outside 0..{model.num_concepts - 1}")
    if not np.isfinite(new_value):
        raise ValidationError(f"new weight must be finite, got {new_value}")
    edited = model.copy()
    old = float(edited.w_classifier[class_index, concept_index])
    edited.w_classifier[class_index, concept_index] = float(new_value)
    edited.edit_log.append(
        {
            "time": timestamp or datetime.now(timezone.utc).isoformat(),
            "kind": "class_weight",
            "class_index": class_index,
            "concept_index": concept_index,
            "old": old,
            "new": float(new_value),
        }
    )
    return edited


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

@dataclass
class EvalResult:
    accuracy: float
    per_class_accuracy: list[float | None]   # None for classes absent from the split
    confusion: np.ndarray                    # K x K, row = true class
    video_ids: list[str]
    predictions: np.ndarray
    labels: np.ndarray

    def to_dict(self) -> dict:
        return {
            "accuracy": self.accuracy,
            "per_class_accuracy": self.per_class_accuracy,
            "confusion": self.confusion.tolist(),
            "num_videos": len(self.video_ids),
        }


def evaluate(model: DanceModel, manifest: DatasetManifest, split: str) -> EvalResult:
    """Top-1 accuracy, per-class accuracy, and confusion matrix over a split."""
    records = manifest.split(split)
    if not records:
        raise ValidationError(f"split {split!r} is empty")
    if len(manifest.class_names) != model.num_classes:
        raise ValidationError(
            f"manifest has {len(manifest.class_names)} classes, model has {model.num_classes}"
        )
    features = manifest.load_features(records)
    labels = np.array([r.label for r in records], dtype=np.int64)
    preds = predict_batch(model, features)

    k = model.num_classes
    confusion = np.zeros((k, k), dtype=np.int64)
    for t, p in zip(labels, preds):
        confusion[t, p] += 1
    support = confusion.sum(axis=1)
    per_class = [
        float(confusion[c, c] / support[c]) if support[c] else None for c in range(k)
    ]
    return EvalResult(
        accuracy=float((preds == labels).mean()),
        per_class_accuracy=per_class,
        confusion=confusion,
        video_ids=[r.id for r in records],
        predictions=preds,
        labels=labels,
    )


@dataclass
class InterventionReport:
    fixed: int                 # wrong before, right after
    broken: int                # right before, wrong after
    accuracy_before: float
    accuracy_after: float
    flips: list[dict] = field(default_factory=list)

    @property
    def net_delta(self) -> float:
        return self.accuracy_after - self.accuracy_before

    def to_dict(self) -> dict:
        return {
            "fixed": self.fixed,
            "broken": self.broken,
            "accuracy_before": self.accuracy_before,
            "accuracy_after": self.accuracy_after,
            "net_delta": self.net_delta,
            "flips": self.flips,
        }


def intervention_report(
    model_before: DanceModel,
    model_after: DanceModel,
    manifest: DatasetManifest,
    split: str,
) -> InterventionReport:
    """Compare two model versions sample by sample over a split."""
    if model_before.num_concepts != model_after.num_concepts or model_before.num_classes != model_after.num_classes:
        raise ValidationError("models differ in dimensions; cannot compare")
    if model_before.concept_space.names() != model_after.concept_space.names():
        raise ValidationError("models have different concept spaces; cannot compare")

    before = evaluate(model_before, manifest, split)
    after = evaluate(model_after, manifest, split)

    fixed = broken = 0
    flips: list[dict] = []
    for vid, label, pb, pa in zip(before.video_ids, before.labels, before.predictions, after.predictions):
        if pb == pa:
            continue
        was_right, is_right = pb == label, pa == label
        if not was_right and is_right:
            fixed += 1
        elif was_right and not is_right:
            broken += 1
        flips.append({"video_id": vid, "label": int(label), "before": int(pb), "after": int(pa)})
    return InterventionReport(
        fixed=fixed,
        broken=broken,
        accuracy_before=before.accuracy,
        accuracy_after=after.accuracy,
        flips=flips,
    )
