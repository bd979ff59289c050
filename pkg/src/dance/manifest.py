"""Dataset manifest: on-disk schema, loading and validation.

A manifest is a JSON document binding together the pre-extracted artifacts
for each video:

    {
      "class_names": ["...", ...],
      "videos": [
        {"id": "v0", "feature_path": "features/v0.dtf", "pose_dir": "poses/v0",
         "vlm_embedding_path": "vlm/v0.dtf", "label": 3, "frames_path": null},
        ...
      ],
      "splits": {"train": ["v0", ...], "test": [...]}
    }

Relative paths are resolved against the manifest's directory.  Pose
directories hold zero or more DTF1 files of shape L x J x 3 with channels
(x, y, confidence); the clip index is parsed from a ``clip_###`` file stem,
falling back to position in sorted filename order.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import IoError, ValidationError
from .tensorio import read_tensor, tensor_dims

_CLIP_STEM = re.compile(r"clip[_-]?(\d+)$")


@dataclass(frozen=True)
class PoseSequence:
    """One key clip's keypoint trajectory.

    coords: L x J x 2 pixel coordinates, conf: L x J in [0, 1].
    """

    coords: np.ndarray
    conf: np.ndarray
    video_id: str
    clip_index: int

    def __post_init__(self) -> None:
        if self.coords.ndim != 3 or self.coords.shape[2] != 2:
            raise ValidationError(f"pose coords must be L x J x 2, got {self.coords.shape}")
        if self.conf.shape != self.coords.shape[:2]:
            raise ValidationError(
                f"conf shape {self.conf.shape} does not match coords {self.coords.shape[:2]}"
            )
        if not np.all(np.isfinite(self.coords)):
            raise ValidationError(f"{self.video_id}/{self.clip_index}: non-finite coordinates")
        if np.any(self.conf < 0) or np.any(self.conf > 1):
            raise ValidationError(f"{self.video_id}/{self.clip_index}: confidences outside [0, 1]")

    def flatten(self) -> np.ndarray:
        """Row-major L*J*2 vector used for clustering."""
        return self.coords.reshape(-1).astype(np.float64)


@dataclass(frozen=True)
class VideoRecord:
    id: str
    feature_path: Path
    vlm_embedding_path: Path
    label: int
    pose_dir: Path | None = None
    frames_path: Path | None = None


@dataclass
class DatasetManifest:
    """Loaded, validated manifest. Immutable after load; safe to share."""

    videos: list[VideoRecord]
    class_names: list[str]
    splits: dict[str, list[str]]
    root: Path
    feature_dim: int
    vlm_dim: int
    index_by_id: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.index_by_id:
            self.index_by_id = {v.id: i for i, v in enumerate(self.videos)}

    @property
    def num_classes(self) -> int:
        return len(self.class_names)

    def video(self, video_id: str) -> VideoRecord:
        try:
            return self.videos[self.index_by_id[video_id]]
        except KeyError:
            raise ValidationError(f"unknown video id {video_id!r}") from None

    def split(self, name: str) -> list[VideoRecord]:
        if name not in self.splits:
            raise ValidationError(f"unknown split {name!r}; have {sorted(self.splits)}")
        return [self.video(vid) for vid in self.splits[name]]

    def load_features(self, records: list[VideoRecord]) -> np.ndarray:
        """Stack the feature vectors of *records* into an N x D matrix."""
        return np.stack([read_tensor(r.feature_path).astype(np.float64) for r in records])

    def load_vlm_embeddings(self, records: list[VideoRecord]) -> np.ndarray:
        return np.stack([read_tensor(r.vlm_embedding_path).astype(np.float64) for r in records])

    def load_poses(self, record: VideoRecord) -> list[PoseSequence]:
        """Load all pose sequences of one video, ordered by clip index."""
        if record.pose_dir is None or not record.pose_dir.is_dir():
            return []
        seqs = []
        for pos, path in enumerate(sorted(record.pose_dir.glob("*.dtf"))):
            m = _CLIP_STEM.search(path.stem)
            clip_index = int(m.group(1)) if m else pos
            raw = read_tensor(path)
            if raw.ndim != 3 or raw.shape[2] != 3:
                raise ValidationError(f"{path}: pose file must be L x J x 3")
            seqs.append(
                PoseSequence(
                    coords=raw[:, :, :2].astype(np.float64),
                    conf=np.clip(raw[:, :, 2].astype(np.float64), 0.0, 1.0),
                    video_id=record.id,
                    clip_index=clip_index,
                )
            )
        return seqs


def _resolve(root: Path, rel: str | None) -> Path | None:
    if rel is None:
        return None
    p = Path(rel)
    return p if p.is_absolute() else root / p


def load_manifest(path: str | Path) -> DatasetManifest:
    """Load and validate a manifest JSON file.

    Raises:
        IoError: the manifest or a referenced file is missing.
        ValidationError: duplicate ids, bad labels, inconsistent dimensions,
            or splits naming unknown videos.
    """
    path = Path(path)
    if not path.is_file():
        raise IoError(f"manifest not found: {path}")
    with open(path) as fh:
        doc = json.load(fh)

    class_names = doc.get("class_names")
    if not isinstance(class_names, list) or not class_names:
        raise ValidationError("manifest needs a non-empty class_names list")
    root = path.parent

    videos: list[VideoRecord] = []
    seen: set[str] = set()
    for raw in doc.get("videos", []):
        vid = raw["id"]
        if vid in seen:
            raise ValidationError(f"duplicate video id {vid!r}")
        seen.add(vid)
        label = int(raw["label"])
        if not 0 <= label < len(class_names):
            raise ValidationError(f"video {vid!r}: label {label} outside 0..{len(class_names) - 1}")
        feature_path = _resolve(root, raw["feature_path"])
        vlm_path = _resolve(root, raw["vlm_embedding_path"])
        for p in (feature_path, vlm_path):
            if not p.is_file():
                raise IoError(f"video {vid!r}: missing file {p}")
        pose_dir = _resolve(root, raw.get("pose_dir"))
        if pose_dir is not None and not pose_dir.is_dir():
            raise IoError(f"video {vid!r}: pose_dir {pose_dir} is not a directory")
        frames_path = _resolve(root, raw.get("frames_path"))
        if frames_path is not None and not frames_path.is_file():
            raise IoError(f"video {vid!r}: missing frames file {frames_path}")
        videos.append(
            VideoRecord(
                id=vid,
                feature_path=feature_path,
                vlm_embedding_path=vlm_path,
                label=label,
                pose_dir=pose_dir,
                frames_path=frames_path,
            )
        )
    if not videos:
        raise ValidationError("manifest lists no videos")

    feature_dim = _consistent_dim(videos, "feature_path", lambda v: v.feature_path)
    vlm_dim = _consistent_dim(videos, "vlm_embedding_path", lambda v: v.vlm_embedding_path)

    splits = {name: list(ids) for name, ids in doc.get("splits", {}).items()}
    known = {v.id for v in videos}
    for name, ids in splits.items():
        unknown = [i for i in ids if i not in known]
        if unknown:
            raise ValidationError(f"split {name!r} references unknown videos {unknown}")

    return DatasetManifest(
        videos=videos,
        class_names=list(class_names),
        splits=splits,
        root=root,
        feature_dim=feature_dim,
        vlm_dim=vlm_dim,
    )


def _consistent_dim(videos, what, getter) -> int:
    dim = None
    ref_id = None
    for v in videos:
        dims = tensor_dims(getter(v))
        if len(dims) != 1:
            raise ValidationError(f"video {v.id!r}: {what} must be a 1-d vector, got dims {dims}")
        if dim is None:
            dim, ref_id = dims[0], v.id
        elif dims[0] != dim:
            raise ValidationError(
                f"video {v.id!r}: {what} dimension {dims[0]} differs from {dim} (first seen on {ref_id!r})"
            )
    return int(dim)


def save_manifest(path: str | Path, doc: dict) -> None:
    """Write a manifest dict as deterministic JSON (stable key order)."""
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
