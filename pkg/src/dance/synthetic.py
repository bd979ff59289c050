"""Synthetic dataset generator with planted concepts.

Builds a complete on-disk dataset (features, pose clips, dual-encoder
embeddings, candidate concept lists, text embeddings, manifest) whose
generative process is the exact inverse of the discovery pipeline:

* every class owns a distinct subset of planted concepts (an exclusive
  motion concept and an exclusive object concept, plus shared extras);
* motion motifs are unreliable per video (a video may skip one), while
  context concepts are always present for their class, with occasional
  distractor context thrown in; a sparse classifier trained on this data
  therefore prefers the clean context evidence and leaves motion weights
  near zero, which a context-destroying domain shift can then expose and a
  motion-weight intervention can repair;
* features are a fixed random linear map of the video's own planted concept
  vector plus gaussian noise, with the object/scene columns amplified;
* pose clips are jittered copies of per-concept prototype trajectories, one
  clip per motion motif the video actually contains;
* video embeddings are built in an orthonormal concept basis with a padding
  dimension so that unit-norm similarity against the concept text embeddings
  returns the planted soft labels.

Everything is a pure function of the config (including the seed): writing
the same config twice produces byte-identical files.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .manifest import DatasetManifest, load_manifest, save_manifest
from .tensorio import read_tensor, write_tensor

# planted soft labels: per-video values keep the context heads honest (the
# within-class variation is only explained by the context feature columns)
CONTEXT_SOFT_RANGE = (0.40, 0.60)      # present object/scene concepts
DISTRACTOR_SOFT_RANGE = (0.10, 0.25)   # occasional off-class context concept


@dataclass
class SyntheticConfig:
    num_classes: int = 5
    num_motion: int = 8
    num_object: int = 6
    num_scene: int = 4
    num_videos: int = 200
    feature_dim: int = 32
    noise: float = 0.01
    seed: int = 0
    clip_len: int = 16
    num_joints: int = 17
    train_fraction: float = 0.75
    context_scale: float = 2.0
    motion_scale: float = 0.5
    pose_jitter: float = 0.5
    # per-video presence probabilities of the class's motion motifs
    motion_presence_primary: float = 0.75
    motion_presence_shared: float = 0.6
    # chance of an extra off-class object/scene appearing in a video
    distractor_prob: float = 0.5


@dataclass
class SyntheticTruth:
    """Planted ground truth returned alongside the manifest for oracle checks."""

    concept_matrix: np.ndarray            # N x M planted concept vectors
    labels: np.ndarray                    # N class indices
    video_ids: list[str]
    class_concepts: list[list[int]]       # global concept indices per class
    defining_concepts: list[list[int]]    # concepts exclusive to one class
    class_motion: list[list[int]]         # motion-local indices per class
    clip_concepts: dict[tuple[str, int], int] = field(default_factory=dict)
    mixing_matrix: np.ndarray | None = None   # B, D x M
    num_motion: int = 0
    num_object: int = 0
    num_scene: int = 0

    def context_slice(self) -> slice:
        return slice(self.num_motion, self.num_motion + self.num_object + self.num_scene)

    def save(self, path: str | Path) -> None:
        doc = {
            "labels": self.labels.tolist(),
            "video_ids": self.video_ids,
            "class_concepts": self.class_concepts,
            "defining_concepts": self.defining_concepts,
            "class_motion": self.class_motion,
            "clip_concepts": [[vid, ci, k] for (vid, ci), k in sorted(self.clip_concepts.items())],
            "num_motion": self.num_motion,
            "num_object": self.num_object,
            "num_scene": self.num_scene,
        }
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, dataset_dir: str | Path) -> "SyntheticTruth":
        dataset_dir = Path(dataset_dir)
        with open(dataset_dir / "truth.json") as fh:
            doc = json.load(fh)
        return cls(
            concept_matrix=read_tensor(dataset_dir / "truth_concepts.dtf").astype(np.float64),
            labels=np.asarray(doc["labels"], dtype=np.int64),
            video_ids=list(doc["video_ids"]),
            class_concepts=[list(c) for c in doc["class_concepts"]],
            defining_concepts=[list(c) for c in doc["defining_concepts"]],
            class_motion=[list(c) for c in doc["class_motion"]],
            clip_concepts={(vid, int(ci)): int(k) for vid, ci, k in doc["clip_concepts"]},
            mixing_matrix=read_tensor(dataset_dir / "mixing_matrix.dtf").astype(np.float64),
            num_motion=int(doc["num_motion"]),
            num_object=int(doc["num_object"]),
            num_scene=int(doc["num_scene"]),
        )


def _class_assignments(cfg: SyntheticConfig):
    """Assign each class its planted concepts (distinct subsets by construction)."""
    k, mm, mo, ms = cfg.num_classes, cfg.num_motion, cfg.num_object, cfg.num_scene
    if mm < k or mo < k or ms < 1:
        raise ConfigError(
            f"need num_motion >= {k}, num_object >= {k}, num_scene >= 1; "
            f"got {mm}/{mo}/{ms} for {k} classes"
        )
    class_motion = []
    for c in range(k):
        own = [c]
        if mm > k:
            own.append(k + (c % (mm - k)))   # shared motion concept
        class_motion.append(own)
    class_object = [[c] for c in range(k)]
    class_scene = [[c % ms] for c in range(k)]
    return class_motion, class_object, class_scene


def _prototype_trajectories(cfg: SyntheticConfig, rng: np.random.Generator) -> np.ndarray:
    """One smooth, shape-distinct trajectory per motion concept (M_m x L x J x 2)."""
    protos = np.empty((cfg.num_motion, cfg.clip_len, cfg.num_joints, 2))
    t = np.arange(cfg.clip_len)[:, None, None]
    for k in range(cfg.num_motion):
        base = rng.uniform(0.0, 100.0, size=(cfg.num_joints, 2))
        amp = rng.uniform(5.0, 15.0)
        freq = rng.uniform(0.5, 2.0)
        phase = rng.uniform(0.0, 2.0 * np.pi, size=(cfg.num_joints, 2))
        protos[k] = base[None] + amp * np.sin(2.0 * np.pi * freq * t / cfg.clip_len + phase[None])
    return protos


def generate_synthetic_dataset(out_dir: str | Path, cfg: SyntheticConfig) -> tuple[DatasetManifest, SyntheticTruth]:
    """Write a synthetic dataset under *out_dir* and return (manifest, truth)."""
    out_dir = Path(out_dir)
    rng = np.random.default_rng(cfg.seed)
    k = cfg.num_classes
    m_total = cfg.num_motion + cfg.num_object + cfg.num_scene

    class_motion, class_object, class_scene = _class_assignments(cfg)
    class_concepts: list[list[int]] = []
    for c in range(k):
        globals_ = (
            list(class_motion[c])
            + [cfg.num_motion + j for j in class_object[c]]
            + [cfg.num_motion + cfg.num_object + j for j in class_scene[c]]
        )
        class_concepts.append(globals_)
    defining = [
        [g for g in class_concepts[c] if sum(g in other for other in class_concepts) == 1]
        for c in range(k)
    ]

    # fixed random linear map from concepts to features; the context block is
    # amplified and the motion block damped so context dominates the features
    mixing = rng.normal(size=(cfg.feature_dim, m_total)) / np.sqrt(m_total)
    mixing[:, : cfg.num_motion] *= cfg.motion_scale
    mixing[:, cfg.num_motion :] *= cfg.context_scale

    protos = _prototype_trajectories(cfg, rng)

    class_names = [f"class_{c}" for c in range(k)]
    emb_dim = cfg.num_object + cfg.num_scene + k + 1   # concepts + pad + class names
    pad_dim = cfg.num_object + cfg.num_scene

    for sub in ("features", "vlm", "poses"):
        (out_dir / sub).mkdir(parents=True, exist_ok=True)

    video_ids, labels, videos_doc = [], [], []
    concept_matrix = np.zeros((cfg.num_videos, m_total))
    clip_concepts: dict[tuple[str, int], int] = {}

    for i in range(cfg.num_videos):
        vid = f"v{i:04d}"
        label = i % k
        video_ids.append(vid)
        labels.append(label)

        # the video's own planted vector: motion motifs are unreliable,
        # class context is always present, plus an occasional distractor
        present_motion = []
        for pos, concept in enumerate(class_motion[label]):
            p = cfg.motion_presence_primary if pos == 0 else cfg.motion_presence_shared
            if rng.random() < p:
                present_motion.append(concept)
        c_vec = np.zeros(m_total)
        c_vec[present_motion] = 1.0
        for j in class_object[label]:
            c_vec[cfg.num_motion + j] = rng.uniform(*CONTEXT_SOFT_RANGE)
        for j in class_scene[label]:
            c_vec[cfg.num_motion + cfg.num_object + j] = rng.uniform(*CONTEXT_SOFT_RANGE)
        if rng.random() < cfg.distractor_prob:
            off_class = [j for j in range(cfg.num_object) if j not in class_object[label]]
            c_vec[cfg.num_motion + off_class[int(rng.integers(len(off_class)))]] = rng.uniform(*DISTRACTOR_SOFT_RANGE)
        if rng.random() < cfg.distractor_prob:
            off_scene = [j for j in range(cfg.num_scene) if j not in class_scene[label]]
            if off_scene:
                c_vec[cfg.num_motion + cfg.num_object + off_scene[int(rng.integers(len(off_scene)))]] = rng.uniform(
                    *DISTRACTOR_SOFT_RANGE
                )
        concept_matrix[i] = c_vec

        features = mixing @ c_vec
        if cfg.noise > 0:
            features = features + rng.normal(0.0, cfg.noise, size=cfg.feature_dim)
        write_tensor(out_dir / "features" / f"{vid}.dtf", features)

        # unit-norm embedding whose similarity with the concept basis equals c
        vlm = np.zeros(emb_dim)
        vlm[: cfg.num_object] = c_vec[cfg.num_motion : cfg.num_motion + cfg.num_object]
        vlm[cfg.num_object : pad_dim] = c_vec[cfg.num_motion + cfg.num_object :]
        vlm[pad_dim] = np.sqrt(max(1.0 - float(np.sum(vlm**2)), 0.0))
        if cfg.noise > 0:
            vlm = vlm + rng.normal(0.0, cfg.noise * 0.1, size=emb_dim)
        write_tensor(out_dir / "vlm" / f"{vid}.dtf", vlm)

        pose_dir = out_dir / "poses" / vid
        pose_dir.mkdir(exist_ok=True)
        for s, concept in enumerate(present_motion):
            shift = rng.uniform(0.0, 200.0, size=2)
            coords = protos[concept] + shift[None, None, :]
            coords = coords + rng.normal(0.0, cfg.pose_jitter, size=coords.shape)
            conf = rng.uniform(0.7, 1.0, size=(cfg.clip_len, cfg.num_joints))
            write_tensor(pose_dir / f"clip_{s:03d}.dtf", np.concatenate([coords, conf[..., None]], axis=2))
            clip_concepts[(vid, s)] = concept

        videos_doc.append(
            {
                "id": vid,
                "feature_path": f"features/{vid}.dtf",
                "pose_dir": f"poses/{vid}",
                "vlm_embedding_path": f"vlm/{vid}.dtf",
                "label": label,
            }
        )

    n_train = int(round(cfg.num_videos * cfg.train_fraction))
    splits = {"train": video_ids[:n_train], "test": video_ids[n_train:]}
    save_manifest(
        out_dir / "manifest.json",
        {"class_names": class_names, "videos": videos_doc, "splits": splits},
    )

    _write_candidates_and_text_embeddings(out_dir, cfg, class_names, class_object, class_scene, emb_dim, pad_dim)

    truth = SyntheticTruth(
        concept_matrix=concept_matrix,
        labels=np.asarray(labels, dtype=np.int64),
        video_ids=video_ids,
        class_concepts=class_concepts,
        defining_concepts=defining,
        class_motion=class_motion,
        clip_concepts=clip_concepts,
        mixing_matrix=mixing,
        num_motion=cfg.num_motion,
        num_object=cfg.num_object,
        num_scene=cfg.num_scene,
    )
    write_tensor(out_dir / "truth_concepts.dtf", concept_matrix)
    write_tensor(out_dir / "mixing_matrix.dtf", mixing)
    truth.save(out_dir / "truth.json")
    return load_manifest(out_dir / "manifest.json"), truth


def _write_candidates_and_text_embeddings(out_dir, cfg, class_names, class_object, class_scene, emb_dim, pad_dim):
    """Candidate lists plus text-embedding files matching the CLI row convention.

    Rows of each text embedding file = candidate phrases in union order,
    followed by the class names.  Concepts are orthonormal basis vectors;
    class names occupy their own dimensions so no candidate collides with a
    class name under cosine similarity.
    """
    object_names = [f"object concept {j:02d}" for j in range(cfg.num_object)]
    scene_names = [f"scene concept {j:02d}" for j in range(cfg.num_scene)]

    obj_candidates = {name: [object_names[j] for j in class_object[c]] for c, name in enumerate(class_names)}
    unused = [j for j in range(cfg.num_object) if not any(j in class_object[c] for c in range(len(class_names)))]
    obj_candidates[class_names[-1]] = obj_candidates[class_names[-1]] + [object_names[j] for j in unused]
    scene_candidates = {name: [scene_names[j] for j in class_scene[c]] for c, name in enumerate(class_names)}

    def union_order(cands: dict[str, list[str]]) -> list[str]:
        seen, ordered = set(), []
        for cls in cands:
            for phrase in cands[cls]:
                if phrase not in seen:
                    seen.add(phrase)
                    ordered.append(phrase)
        return ordered

    def basis_row(dim_index: int) -> np.ndarray:
        row = np.zeros(emb_dim)
        row[dim_index] = 1.0
        return row

    for kind, cands, names, offset in (
        ("object", obj_candidates, object_names, 0),
        ("scene", scene_candidates, scene_names, cfg.num_object),
    ):
        with open(out_dir / f"candidates_{kind}.json", "w") as fh:
            json.dump(cands, fh, indent=2)
            fh.write("\n")
        ordered = union_order(cands)
        rows = [basis_row(offset + names.index(phrase)) for phrase in ordered]
        rows += [basis_row(pad_dim + 1 + c) for c in range(len(class_names))]
        write_tensor(out_dir / f"text_emb_{kind}.dtf", np.stack(rows))


def corrupt_context_features(dataset_dir: str | Path, split: str = "test") -> Path:
    """Rewrite a split's features as if the context block of the mixing map were zero.

    Simulates a domain shift that destroys object/scene evidence while
    preserving motion evidence.  Writes corrupted feature files plus a new
    manifest (``manifest_corrupted.json``) in the dataset directory and
    returns the manifest path.
    """
    dataset_dir = Path(dataset_dir)
    truth = SyntheticTruth.load(dataset_dir)
    with open(dataset_dir / "manifest.json") as fh:
        doc = json.load(fh)

    ctx = truth.context_slice()
    b_ctx = truth.mixing_matrix[:, ctx]
    target = set(doc["splits"][split])
    out_features = dataset_dir / "features_corrupted"
    out_features.mkdir(exist_ok=True)

    row_of = {vid: i for i, vid in enumerate(truth.video_ids)}
    for record in doc["videos"]:
        vid = record["id"]
        if vid not in target:
            continue
        x = read_tensor(dataset_dir / record["feature_path"]).astype(np.float64)
        x = x - b_ctx @ truth.concept_matrix[row_of[vid], ctx]
        write_tensor(out_features / f"{vid}.dtf", x)
        record["feature_path"] = f"features_corrupted/{vid}.dtf"

    out_manifest = dataset_dir / "manifest_corrupted.json"
    save_manifest(out_manifest, doc)
    return out_manifest
