"""Trained model container and its on-disk layout.

A model directory holds ``model.json`` (dimensions, hyperparameters,
standardization statistics, concept vocabulary, edit log) plus one DTF1
tensor per weight block.  Saving is deterministic: stable JSON key order and
no timestamps outside the edit log.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .concepts import ConceptSpace
from .errors import IoError, ValidationError
from .tensorio import read_tensor, write_tensor

ACT_STD_FLOOR = 1e-6

_WEIGHT_FILES = {
    "w_motion": "W_motion.dtf",
    "w_object": "W_object.dtf",
    "w_scene": "W_scene.dtf",
    "w_classifier": "W_classifier.dtf",
    "bias": "bias.dtf",
}


@dataclass
class DanceModel:
    """Concept-layer weights, standardization stats, and the sparse classifier."""

    w_motion: np.ndarray      # M_m x D
    w_object: np.ndarray      # M_o x D
    w_scene: np.ndarray       # M_s x D
    act_mean: np.ndarray      # M = M_m + M_o + M_s
    act_std: np.ndarray       # M, floored at ACT_STD_FLOOR
    w_classifier: np.ndarray  # K x M
    bias: np.ndarray          # K
    concept_space: ConceptSpace
    class_names: list[str]
    hyperparams: dict = field(default_factory=dict)
    edit_log: list[dict] = field(default_factory=list)

    def __post_init__(self) -> None:
        d = self.w_motion.shape[1] if self.w_motion.size else self.feature_dim
        for name in ("w_motion", "w_object", "w_scene"):
            block = getattr(self, name)
            if block.ndim != 2 or (block.size and block.shape[1] != d):
                raise ValidationError(f"{name} must be M x D with D={d}, got {block.shape}")
        m = self.w_motion.shape[0] + self.w_object.shape[0] + self.w_scene.shape[0]
        if self.act_mean.shape != (m,) or self.act_std.shape != (m,):
            raise ValidationError(f"standardization stats must have length {m}")
        if np.any(self.act_std < ACT_STD_FLOOR):
            raise ValidationError(f"act_std entries must be >= {ACT_STD_FLOOR}")
        if self.w_classifier.shape != (len(self.class_names), m):
            raise ValidationError(
                f"classifier must be K x M = {len(self.class_names)} x {m}, got {self.w_classifier.shape}"
            )
        if self.bias.shape != (len(self.class_names),):
            raise ValidationError(f"bias must have length {len(self.class_names)}")
        if self.concept_space.total != m:
            raise ValidationError(
                f"concept space lists {self.concept_space.total} concepts, weights have {m}"
            )

    @property
    def feature_dim(self) -> int:
        return self.w_motion.shape[1]

    @property
    def num_concepts(self) -> int:
        return self.act_mean.shape[0]

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    def concept_weights(self) -> np.ndarray:
        """Stacked M x D concept layer [motion; object; scene]."""
        return np.concatenate([self.w_motion, self.w_object, self.w_scene], axis=0)

    def copy(self) -> "DanceModel":
        return DanceModel(
            w_motion=self.w_motion.copy(),
            w_object=self.w_object.copy(),
            w_scene=self.w_scene.copy(),
            act_mean=self.act_mean.copy(),
            act_std=self.act_std.copy(),
            w_classifier=self.w_classifier.copy(),
            bias=self.bias.copy(),
            concept_space=self.concept_space,
            class_names=list(self.class_names),
            hyperparams=dict(self.hyperparams),
            edit_log=[dict(e) for e in self.edit_log],
        )

    # -- persistence -----------------------------------------------------

    def save(self, model_dir: str | Path) -> None:
        model_dir = Path(model_dir)
        model_dir.mkdir(parents=True, exist_ok=True)
        doc = {
            "dims": {
                "feature_dim": self.feature_dim,
                "num_motion": self.w_motion.shape[0],
                "num_object": self.w_object.shape[0],
                "num_scene": self.w_scene.shape[0],
                "num_classes": self.num_classes,
            },
            "class_names": self.class_names,
            "hyperparams": self.hyperparams,
            "act_mean": self.act_mean.tolist(),
            "act_std": self.act_std.tolist(),
            "edit_log": self.edit_log,
            "concepts": self.concept_space.to_dict(),
        }
        with open(model_dir / "model.json", "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")
        for attr, fname in _WEIGHT_FILES.items():
            write_tensor(model_dir / fname, getattr(self, attr))

    @classmethod
    def load(cls, model_dir: str | Path) -> "DanceModel":
        model_dir = Path(model_dir)
        meta_path = model_dir / "model.json"
        if not meta_path.is_file():
            raise IoError(f"no model.json under {model_dir}")
        with open(meta_path) as fh:
            doc = json.load(fh)
        weights = {
            attr: read_tensor(model_dir / fname).astype(np.float64)
            for attr, fname in _WEIGHT_FILES.items()
        }
        return cls(
            w_motion=weights["w_motion"],
            w_object=weights["w_object"],
            w_scene=weights["w_scene"],
            act_mean=np.asarray(doc["act_mean"], dtype=np.float64),
            act_std=np.asarray(doc["act_std"], dtype=np.float64),
            w_classifier=weights["w_classifier"],
            bias=weights["bias"],
            concept_space=ConceptSpace.from_dict(doc["concepts"]),
            class_names=list(doc["class_names"]),
            hyperparams=dict(doc.get("hyperparams", {})),
            edit_log=list(doc.get("edit_log", [])),
        )
