"""Stage orchestration shared by the CLI and library callers.

Each stage reads file artifacts, writes file artifacts, and records a
content hash of its inputs and parameters; a rerun with unchanged inputs is
skipped.  The CLI subcommands call the same stage functions, so CLI results
are identical to direct library calls.
"""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np

from .concepts import ConceptSpace, default_motion_names
from .context import (
    DEFAULT_CLASS_SIM,
    DEFAULT_DUP_SIM,
    DEFAULT_MAX_WORDS,
    canonical_phrase,
    filter_concepts,
    pseudo_labels,
)
from .errors import ConfigError, ValidationError
from .intervene import evaluate
from .keyclip import detect_keyframes, extract_key_clips, luminance_diff_signal
from .manifest import DatasetManifest, load_manifest
from .model import DanceModel
from .motion import discover_motion_concepts
from .tensorio import read_tensor, write_tensor
from .train import TrainConfig, standardize_activations, train_classifier, train_context_head, train_motion_head

log = logging.getLogger(__name__)


@dataclass
class PipelineConfig:
    manifest: str
    out_dir: str
    # key clips
    clip_len: int = 16
    max_clips: int = 5
    smooth_window: int = 5
    threshold_k: float = 1.0
    # motion discovery
    target_motion: int = 8
    metric: str = "cosine"
    conf_min: float = 0.3
    jump_max: float = 0.5
    # context labeling
    object_candidates: str | None = None
    object_text_emb: str | None = None
    scene_candidates: str | None = None
    scene_text_emb: str | None = None
    max_words: int = DEFAULT_MAX_WORDS
    dup_sim: float = DEFAULT_DUP_SIM
    class_sim: float = DEFAULT_CLASS_SIM
    clamp: bool = False
    # training
    lam: float = 1e-4
    alpha: float = 0.99
    learning_rate: float = 1.0
    momentum: float = 0.9
    epochs: int = 400
    seed: int = 0
    cosine_cubed_axis: str = "per_concept"
    train_split: str = "train"
    eval_split: str = "test"

    @classmethod
    def from_file(cls, path: str | Path, overrides: dict | None = None) -> "PipelineConfig":
        with open(path) as fh:
            doc = json.load(fh)
        doc.update({k: v for k, v in (overrides or {}).items() if v is not None})
        unknown = set(doc) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**doc)


# ---------------------------------------------------------------------------
# content-hash stage skipping
# ---------------------------------------------------------------------------

def _digest(params: dict, input_files: list[Path]) -> str:
    h = hashlib.sha256()
    h.update(json.dumps(params, sort_keys=True, default=str).encode())
    for path in input_files:
        h.update(str(path).encode())
        h.update(hashlib.sha256(Path(path).read_bytes()).digest())
    return h.hexdigest()


def _stage_is_fresh(stamp: Path, digest: str, outputs: list[Path]) -> bool:
    return stamp.is_file() and stamp.read_text().strip() == digest and all(p.exists() for p in outputs)


def _stamp(stamp: Path, digest: str) -> None:
    stamp.parent.mkdir(parents=True, exist_ok=True)
    stamp.write_text(digest + "\n")


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------

def stage_keyclips(manifest: DatasetManifest, cfg: PipelineConfig, out_path: str | Path) -> dict:
    """Detect keyframes for every video that ships a luminance frame stack."""
    out: dict[str, list[dict]] = {}
    for record in manifest.videos:
        if record.frames_path is None:
            continue
        frames = read_tensor(record.frames_path)
        signal = luminance_diff_signal(frames)
        keyframes = detect_keyframes(
            signal,
            smooth_window=cfg.smooth_window,
            threshold_k=cfg.threshold_k,
            max_keyframes=cfg.max_clips,
        )
        clips = extract_key_clips(keyframes, cfg.clip_len, frames.shape[0], record.id)
        out[record.id] = [c.to_dict() for c in clips]
    with open(out_path, "w") as fh:
        json.dump(out, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out


def stage_discover_motion(
    manifest: DatasetManifest,
    cfg: PipelineConfig,
    out_json: str | Path,
    out_labels: str | Path,
) -> dict:
    records = manifest.split(cfg.train_split)
    discovery = discover_motion_concepts(
        manifest,
        records,
        target_m=cfg.target_motion,
        metric=cfg.metric,
        conf_min=cfg.conf_min,
        jump_max=cfg.jump_max,
    )
    doc = {
        "count": discovery.concept_set.count,
        "video_ids": [r.id for r in records],
        "hierarchy_counts": discovery.hierarchy_counts,
        "medoids": [
            {
                "video_id": m.video_id,
                "clip_index": m.clip_index,
                "coords": m.coords.tolist(),
                "conf": m.conf.tolist(),
            }
            for m in discovery.concept_set.medoids
        ],
        "members": [[[vid, ci] for vid, ci in mem] for mem in discovery.concept_set.members],
    }
    with open(out_json, "w") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")
    write_tensor(out_labels, discovery.labels)
    return doc


def embedder_from_rows(candidates: dict[str, list[str]], class_names: list[str], rows: np.ndarray):
    """Build a phrase -> embedding lookup from a text-embedding tensor.

    Row convention: one row per candidate phrase in union order (lowercased,
    whitespace-trimmed, exact duplicates collapsed, input order preserved),
    followed by one row per class name.
    """
    ordered: list[str] = []
    seen: set[str] = set()
    for cls in candidates:
        for raw in candidates[cls]:
            phrase = canonical_phrase(raw)
            if phrase and phrase not in seen:
                seen.add(phrase)
                ordered.append(phrase)
    expected = len(ordered) + len(class_names)
    if rows.shape[0] != expected:
        raise ValidationError(
            f"text embedding has {rows.shape[0]} rows, expected {expected} "
            f"({len(ordered)} candidates + {len(class_names)} class names)"
        )
    table = {phrase: rows[i] for i, phrase in enumerate(ordered)}
    for c, name in enumerate(class_names):
        table[canonical_phrase(name)] = rows[len(ordered) + c]

    def embed(phrase: str) -> np.ndarray:
        key = canonical_phrase(phrase)
        if key not in table:
            raise ValidationError(f"no embedding row for phrase {key!r}")
        return table[key]

    return embed


def stage_label_context(
    manifest: DatasetManifest,
    cfg: PipelineConfig,
    kind: str,
    candidates_path: str | Path,
    text_emb_path: str | Path,
    out_labels: str | Path,
    out_names: str | Path,
) -> list[str]:
    with open(candidates_path) as fh:
        candidates = json.load(fh)
    rows = read_tensor(text_emb_path).astype(np.float64)
    embed = embedder_from_rows(candidates, manifest.class_names, rows)
    concepts = filter_concepts(
        candidates,
        manifest.class_names,
        embed,
        kind=kind,
        max_words=cfg.max_words,
        dup_sim=cfg.dup_sim,
        class_sim=cfg.class_sim,
    )
    records = manifest.split(cfg.train_split)
    vlm = manifest.load_vlm_embeddings(records)
    labels = pseudo_labels(concepts, vlm, clamp=cfg.clamp)
    write_tensor(out_labels, labels)
    with open(out_names, "w") as fh:
        json.dump({"kind": kind, "names": concepts.names}, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return concepts.names


def stage_train(
    manifest: DatasetManifest,
    cfg: PipelineConfig,
    motion_labels_path: str | Path,
    object_labels_path: str | Path,
    scene_labels_path: str | Path,
    model_dir: str | Path,
    motion_concepts_path: str | Path | None = None,
    object_names_path: str | Path | None = None,
    scene_names_path: str | Path | None = None,
) -> DanceModel:
    """Train the three concept heads and the sparse classifier; save the model."""
    records = manifest.split(cfg.train_split)
    features = manifest.load_features(records)
    c_motion = read_tensor(motion_labels_path).astype(np.float64)
    c_object = read_tensor(object_labels_path).astype(np.float64)
    c_scene = read_tensor(scene_labels_path).astype(np.float64)
    for name, mat in (("motion", c_motion), ("object", c_object), ("scene", c_scene)):
        if mat.shape[0] != len(records):
            raise ValidationError(
                f"{name} labels have {mat.shape[0]} rows, split {cfg.train_split!r} has {len(records)}"
            )

    tc = TrainConfig(
        learning_rate=cfg.learning_rate,
        momentum=cfg.momentum,
        epochs=cfg.epochs,
        lam=cfg.lam,
        alpha=cfg.alpha,
        seed=cfg.seed,
        cosine_cubed_axis=cfg.cosine_cubed_axis,
    )
    motion_head = train_motion_head(features, c_motion, tc)
    object_head = train_context_head(features, c_object, tc)
    scene_head = train_context_head(features, c_scene, tc)

    acts = np.concatenate(
        [features @ motion_head.weights.T, features @ object_head.weights.T, features @ scene_head.weights.T],
        axis=1,
    )
    mean, std, z_std = standardize_activations(acts)
    y = np.array([r.label for r in records], dtype=np.int64)
    classifier = train_classifier(z_std, y, cfg.lam, cfg.alpha, tc, num_classes=manifest.num_classes)

    concept_space = _build_concept_space(
        c_motion.shape[1], motion_concepts_path, object_names_path, scene_names_path, c_object.shape[1], c_scene.shape[1]
    )
    model = DanceModel(
        w_motion=motion_head.weights,
        w_object=object_head.weights,
        w_scene=scene_head.weights,
        act_mean=mean,
        act_std=std,
        w_classifier=classifier.weights,
        bias=classifier.bias,
        concept_space=concept_space,
        class_names=manifest.class_names,
        hyperparams={
            "lam": cfg.lam,
            "alpha": cfg.alpha,
            "learning_rate": cfg.learning_rate,
            "momentum": cfg.momentum,
            "epochs": cfg.epochs,
            "seed": cfg.seed,
            "cosine_cubed_axis": cfg.cosine_cubed_axis,
            "train_split": cfg.train_split,
            "final_losses": {
                "motion": motion_head.final_loss,
                "object": object_head.final_loss,
                "scene": scene_head.final_loss,
                "classifier": classifier.objective_history[-1],
            },
        },
    )
    model.save(model_dir)
    return model


def _build_concept_space(
    num_motion: int,
    motion_concepts_path,
    object_names_path,
    scene_names_path,
    num_object: int,
    num_scene: int,
) -> ConceptSpace:
    from .concepts import _pose_from_dict  # local import to keep module API tidy

    motion_names = default_motion_names(num_motion)
    medoids = []
    if motion_concepts_path is not None:
        with open(motion_concepts_path) as fh:
            doc = json.load(fh)
        if doc["count"] != num_motion:
            raise ValidationError(f"motion concepts file lists {doc['count']}, labels have {num_motion}")
        medoids = [_pose_from_dict(m) for m in doc.get("medoids", [])]

    def _names(path, fallback_prefix, count):
        if path is None:
            return [f"{fallback_prefix}_{i:02d}" for i in range(count)]
        with open(path) as fh:
            names = json.load(fh)["names"]
        if len(names) != count:
            raise ValidationError(f"{path} lists {len(names)} names, labels have {count} columns")
        return names

    return ConceptSpace(
        motion_names=motion_names,
        object_names=_names(object_names_path, "object", num_object),
        scene_names=_names(scene_names_path, "scene", num_scene),
        medoids=medoids,
    )


# ---------------------------------------------------------------------------
# full pipeline
# ---------------------------------------------------------------------------

def run_pipeline(cfg: PipelineConfig) -> dict:
    """Execute all stages in dependency order with content-hash skipping."""
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest_path = Path(cfg.manifest)
    manifest = load_manifest(manifest_path)
    params = asdict(cfg)
    summary: dict = {"stages": {}}

    def run_stage(name: str, inputs: list[Path], outputs: list[Path], fn) -> None:
        digest = _digest({**params, "stage": name}, inputs)
        stamp = out_dir / f".{name}.hash"
        if _stage_is_fresh(stamp, digest, outputs):
            summary["stages"][name] = "skipped"
            return
        try:
            fn()
        except Exception as exc:
            raise ConfigError(f"stage {name!r} failed: {exc}") from exc
        _stamp(stamp, digest)
        summary["stages"][name] = "ran"

    # key clips only when frame stacks exist
    if any(v.frames_path is not None for v in manifest.videos):
        clips_out = out_dir / "clips.json"
        frame_files = [v.frames_path for v in manifest.videos if v.frames_path is not None]
        run_stage(
            "keyclips",
            [manifest_path, *frame_files],
            [clips_out],
            lambda: stage_keyclips(manifest, cfg, clips_out),
        )

    motion_json = out_dir / "motion_concepts.json"
    motion_labels = out_dir / "c_motion.dtf"
    pose_files = sorted(
        p for v in manifest.split(cfg.train_split) if v.pose_dir is not None for p in v.pose_dir.glob("*.dtf")
    )
    run_stage(
        "discover-motion",
        [manifest_path, *pose_files],
        [motion_json, motion_labels],
        lambda: stage_discover_motion(manifest, cfg, motion_json, motion_labels),
    )

    for kind, cand, emb in (
        ("object", cfg.object_candidates, cfg.object_text_emb),
        ("scene", cfg.scene_candidates, cfg.scene_text_emb),
    ):
        if cand is None or emb is None:
            raise ConfigError(f"pipeline config is missing --{kind}-candidates / --{kind}-text-emb")
        labels_out = out_dir / f"c_{kind}.dtf"
        names_out = out_dir / f"concepts_{kind}.json"
        run_stage(
            f"label-{kind}",
            [manifest_path, Path(cand), Path(emb)],
            [labels_out, names_out],
            lambda kind=kind, cand=cand, emb=emb, lo=labels_out, no=names_out: stage_label_context(
                manifest, cfg, kind, cand, emb, lo, no
            ),
        )

    model_dir = out_dir / "model"
    run_stage(
        "train",
        [manifest_path, motion_labels, out_dir / "c_object.dtf", out_dir / "c_scene.dtf"],
        [model_dir / "model.json"],
        lambda: stage_train(
            manifest,
            cfg,
            motion_labels,
            out_dir / "c_object.dtf",
            out_dir / "c_scene.dtf",
            model_dir,
            motion_concepts_path=motion_json,
            object_names_path=out_dir / "concepts_object.json",
            scene_names_path=out_dir / "concepts_scene.json",
        ),
    )

    metrics_path = out_dir / "metrics.json"

    def _evaluate() -> None:
        model = DanceModel.load(model_dir)
        result = evaluate(model, manifest, cfg.eval_split)
        with open(metrics_path, "w") as fh:
            json.dump(result.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    run_stage("evaluate", [manifest_path, model_dir / "model.json"], [metrics_path], _evaluate)

    with open(metrics_path) as fh:
        summary["metrics"] = json.load(fh)
    summary["model_dir"] = str(model_dir)
    return summary
