"""Shared builders for small models and datasets used across tests."""

from __future__ import annotations

from pathlib import Path

import numpy as np

from dance.concepts import ConceptSpace, default_motion_names
from dance.manifest import DatasetManifest, PoseSequence, load_manifest
from dance.model import ACT_STD_FLOOR, DanceModel
from dance.tensorio import write_tensor


def random_pose(rng: np.random.Generator, length=8, joints=5, video_id="v0", clip_index=0) -> PoseSequence:
    return PoseSequence(
        coords=rng.uniform(0, 100, size=(length, joints, 2)),
        conf=rng.uniform(0.5, 1.0, size=(length, joints)),
        video_id=video_id,
        clip_index=clip_index,
    )


def random_model(
    rng: np.random.Generator,
    num_motion=3,
    num_object=2,
    num_scene=2,
    num_classes=4,
    feature_dim=6,
    with_medoids=False,
) -> DanceModel:
    m = num_motion + num_object + num_scene
    medoids = []
    if with_medoids:
        medoids = [random_pose(rng, video_id=f"m{k}", clip_index=k) for k in range(num_motion)]
    return DanceModel(
        w_motion=rng.normal(size=(num_motion, feature_dim)),
        w_object=rng.normal(size=(num_object, feature_dim)),
        w_scene=rng.normal(size=(num_scene, feature_dim)),
        act_mean=rng.normal(size=m),
        act_std=np.maximum(rng.uniform(0.5, 2.0, size=m), ACT_STD_FLOOR),
        w_classifier=rng.normal(size=(num_classes, m)),
        bias=rng.normal(size=num_classes),
        concept_space=ConceptSpace(
            motion_names=default_motion_names(num_motion),
            object_names=[f"object_{i:02d}" for i in range(num_object)],
            scene_names=[f"scene_{i:02d}" for i in range(num_scene)],
            medoids=medoids,
        ),
        class_names=[f"class_{c}" for c in range(num_classes)],
        hyperparams={"lam": 1e-4, "alpha": 0.99},
    )


def write_manifest_dataset(
    tmp_path: Path,
    features: np.ndarray,
    labels: list[int],
    class_names: list[str],
    vlm: np.ndarray | None = None,
    splits: dict | None = None,
) -> DatasetManifest:
    """Write a minimal dataset (features + vlm + manifest) under tmp_path."""
    import json

    n, _ = features.shape
    if vlm is None:
        vlm = np.tile(np.eye(1, 4)[0], (n, 1))
    (tmp_path / "features").mkdir(parents=True, exist_ok=True)
    (tmp_path / "vlm").mkdir(exist_ok=True)
    videos = []
    ids = [f"v{i:03d}" for i in range(n)]
    for i, vid in enumerate(ids):
        write_tensor(tmp_path / "features" / f"{vid}.dtf", features[i])
        write_tensor(tmp_path / "vlm" / f"{vid}.dtf", vlm[i])
        videos.append(
            {
                "id": vid,
                "feature_path": f"features/{vid}.dtf",
                "vlm_embedding_path": f"vlm/{vid}.dtf",
                "label": int(labels[i]),
            }
        )
    doc = {
        "class_names": class_names,
        "videos": videos,
        "splits": splits if splits is not None else {"all": ids},
    }
    with open(tmp_path / "manifest.json", "w") as fh:
        json.dump(doc, fh, indent=2)
    return load_manifest(tmp_path / "manifest.json")
