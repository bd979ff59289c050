"""ConceptSpace: the ordered, partitioned concept vocabulary of a model.

Concept indices are global and partitioned by kind: motion concepts occupy
[0, M_m), object concepts [M_m, M_m + M_o), scene concepts the rest.  Motion
concepts carry medoid pose sequences for rendering; context concepts are
plain text.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .manifest import PoseSequence

KINDS = ("motion", "object", "scene")


@dataclass
class ConceptSpace:
    motion_names: list[str]
    object_names: list[str]
    scene_names: list[str]
    medoids: list[PoseSequence] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.medoids and len(self.medoids) != len(self.motion_names):
            raise ValidationError(
                f"{len(self.medoids)} medoids for {len(self.motion_names)} motion concepts"
            )

    @property
    def num_motion(self) -> int:
        return len(self.motion_names)

    @property
    def num_object(self) -> int:
        return len(self.object_names)

    @property
    def num_scene(self) -> int:
        return len(self.scene_names)

    @property
    def total(self) -> int:
        return self.num_motion + self.num_object + self.num_scene

    def kind_of(self, index: int) -> str:
        if not 0 <= index < self.total:
            raise ValidationError(f"concept index {index} outside 0..{self.total - 1}")
        if index < self.num_motion:
            return "motion"
        if index < self.num_motion + self.num_object:
            return "object"
        return "scene"

    def name_of(self, index: int) -> str:
        kind = self.kind_of(index)
        if kind == "motion":
            return self.motion_names[index]
        if kind == "object":
            return self.object_names[index - self.num_motion]
        return self.scene_names[index - self.num_motion - self.num_object]

    def medoid_of(self, index: int) -> PoseSequence | None:
        if self.kind_of(index) == "motion" and self.medoids:
            return self.medoids[index]
        return None

    def names(self) -> list[str]:
        return self.motion_names + self.object_names + self.scene_names

    def to_dict(self) -> dict:
        return {
            "motion": {
                "names": self.motion_names,
                "medoids": [_pose_to_dict(m) for m in self.medoids],
            },
            "object": {"names": self.object_names},
            "scene": {"names": self.scene_names},
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "ConceptSpace":
        return cls(
            motion_names=list(doc["motion"]["names"]),
            object_names=list(doc["object"]["names"]),
            scene_names=list(doc["scene"]["names"]),
            medoids=[_pose_from_dict(m) for m in doc["motion"].get("medoids", [])],
        )


def _pose_to_dict(seq: PoseSequence) -> dict:
    return {
        "video_id": seq.video_id,
        "clip_index": seq.clip_index,
        "coords": seq.coords.tolist(),
        "conf": seq.conf.tolist(),
    }


def _pose_from_dict(doc: dict) -> PoseSequence:
    return PoseSequence(
        coords=np.asarray(doc["coords"], dtype=np.float64),
        conf=np.asarray(doc["conf"], dtype=np.float64),
        video_id=doc["video_id"],
        clip_index=int(doc["clip_index"]),
    )


def default_motion_names(count: int) -> list[str]:
    width = max(2, len(str(max(count - 1, 0))))
    return [f"motion_{k:0{width}d}" for k in range(count)]
