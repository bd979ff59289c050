"""Command-line entry point wiring the pipeline stages.

Every subcommand is a thin shell over the library functions in
``dance.pipeline`` and friends, so CLI results match direct library calls.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import DanceError
from .explain import class_pair_weights, top_k_explanation
from .intervene import edit_class_weight, evaluate, intervention_report
from .manifest import load_manifest
from .model import DanceModel
from .pipeline import (
    PipelineConfig,
    run_pipeline,
    stage_discover_motion,
    stage_keyclips,
    stage_label_context,
    stage_train,
)
from .synthetic import SyntheticConfig, generate_synthetic_dataset
from .tensorio import read_tensor


def _add_common_motion_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--target-M", type=int, default=8, dest="target_motion", help="desired motion concept count")
    p.add_argument("--metric", choices=["cosine", "euclidean"], default="cosine")
    p.add_argument("--conf-min", type=float, default=0.3, help="min mean joint confidence")
    p.add_argument("--jump-max", type=float, default=0.5, help="max per-step joint jump (bbox-diagonal fraction)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dance", description="Concept-bottleneck video action recognition engine")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset with planted concepts")
    p.add_argument("--out", required=True)
    p.add_argument("--classes", type=int, default=5)
    p.add_argument("--motion", type=int, default=8)
    p.add_argument("--objects", type=int, default=6)
    p.add_argument("--scenes", type=int, default=4)
    p.add_argument("--videos", type=int, default=200)
    p.add_argument("--feature-dim", type=int, default=32)
    p.add_argument("--noise", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("keyclips", help="detect keyframes and emit key-clip windows")
    p.add_argument("--manifest", required=True)
    p.add_argument("--L", type=int, default=16, dest="clip_len", help="clip length in frames")
    p.add_argument("--max-clips", type=int, default=5)
    p.add_argument("--smooth-window", type=int, default=5)
    p.add_argument("--threshold-k", type=float, default=1.0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("discover-motion", help="cluster pose sequences into motion concepts")
    p.add_argument("--manifest", required=True)
    p.add_argument("--clips", default=None, help="key-clip windows JSON (bookkeeping only; poses are pre-extracted)")
    _add_common_motion_flags(p)
    p.add_argument("--split", default="train")
    p.add_argument("--out", required=True, help="motion concepts JSON (medoids + members)")
    p.add_argument("--labels-out", default=None, help="label matrix DTF1 (default: <out>_labels.dtf)")

    p = sub.add_parser("label-context", help="filter concept candidates and compute pseudo labels")
    p.add_argument("--kind", choices=["object", "scene"], required=True)
    p.add_argument("--candidates", required=True, help='JSON {"class": ["concept", ...]}')
    p.add_argument("--embeds", required=True, help="DTF1 text embeddings: candidate union order, then class names")
    p.add_argument("--manifest", required=True)
    p.add_argument("--split", default="train")
    p.add_argument("--max-words", type=int, default=4)
    p.add_argument("--dup-sim", type=float, default=0.9)
    p.add_argument("--class-sim", type=float, default=0.85)
    p.add_argument("--clamp", action="store_true", help="clamp negative similarities to 0")
    p.add_argument("--out", required=True, help="pseudo label matrix DTF1")
    p.add_argument("--names-out", default=None, help="surviving concept names JSON (default: <out>.concepts.json)")

    p = sub.add_parser("train", help="train concept heads and the sparse classifier")
    p.add_argument("--manifest", required=True)
    p.add_argument("--motion-labels", required=True)
    p.add_argument("--object-labels", required=True)
    p.add_argument("--scene-labels", required=True)
    p.add_argument("--motion-concepts", default=None, help="motion concepts JSON from discover-motion")
    p.add_argument("--object-names", default=None)
    p.add_argument("--scene-names", default=None)
    p.add_argument("--lambda", type=float, default=1e-4, dest="lam")
    p.add_argument("--alpha", type=float, default=0.99)
    p.add_argument("--lr", type=float, default=1.0)
    p.add_argument("--momentum", type=float, default=0.9)
    p.add_argument("--epochs", type=int, default=400)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--axis", choices=["per_concept", "per_sample"], default="per_concept")
    p.add_argument("--split", default="train")
    p.add_argument("--out", required=True, help="model directory")

    p = sub.add_parser("evaluate", help="accuracy and confusion matrix over a split")
    p.add_argument("--model", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--split", default="test")
    p.add_argument("--out", default=None, help="write metrics JSON here (default: stdout)")

    p = sub.add_parser("explain", help="top-k concept explanation for one video")
    p.add_argument("--model", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--video", required=True)
    p.add_argument("--top", type=int, default=3)
    p.add_argument("--deactivate", default=None, help="comma-separated concept indices to zero")
    p.add_argument("--json", action="store_true", dest="as_json")

    p = sub.add_parser("edit", help="set one class-to-concept weight, producing a new model version")
    p.add_argument("--model", required=True)
    p.add_argument("--class", type=int, required=True, dest="class_index")
    p.add_argument("--concept", type=int, required=True)
    p.add_argument("--value", type=float, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("report", help="fixed/broken counts between two model versions")
    p.add_argument("--before", required=True)
    p.add_argument("--after", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--split", default="test")

    p = sub.add_parser("sankey", help="concept-to-class weight data for a class pair")
    p.add_argument("--model", required=True)
    p.add_argument("--class-a", type=int, required=True)
    p.add_argument("--class-b", type=int, required=True)
    p.add_argument("--top-n", type=int, default=5)

    p = sub.add_parser("serve", help="start the HTTP service for the dashboard")
    p.add_argument("--model", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8321)

    p = sub.add_parser("pipeline", help="run all stages in dependency order")
    p.add_argument("--config", default=None, help="JSON config; explicit flags win")
    p.add_argument("--manifest", default=None)
    p.add_argument("--out-dir", default=None)
    p.add_argument("--object-candidates", default=None)
    p.add_argument("--object-text-emb", default=None)
    p.add_argument("--scene-candidates", default=None)
    p.add_argument("--scene-text-emb", default=None)
    p.add_argument("--target-M", type=int, default=None, dest="target_motion")
    p.add_argument("--lambda", type=float, default=None, dest="lam")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--epochs", type=int, default=None)
    p.add_argument("--seed", type=int, default=None)

    return parser


def _cmd_synth(args) -> int:
    cfg = SyntheticConfig(
        num_classes=args.classes,
        num_motion=args.motion,
        num_object=args.objects,
        num_scene=args.scenes,
        num_videos=args.videos,
        feature_dim=args.feature_dim,
        noise=args.noise,
        seed=args.seed,
    )
    manifest, _ = generate_synthetic_dataset(args.out, cfg)
    print(f"wrote {len(manifest.videos)} videos under {args.out}")
    return 0


def _cmd_keyclips(args) -> int:
    manifest = load_manifest(args.manifest)
    cfg = PipelineConfig(
        manifest=args.manifest,
        out_dir=".",
        clip_len=args.clip_len,
        max_clips=args.max_clips,
        smooth_window=args.smooth_window,
        threshold_k=args.threshold_k,
    )
    clips = stage_keyclips(manifest, cfg, args.out)
    print(f"wrote key clips for {len(clips)} videos to {args.out}")
    return 0


def _cmd_discover_motion(args) -> int:
    manifest = load_manifest(args.manifest)
    cfg = PipelineConfig(
        manifest=args.manifest,
        out_dir=".",
        target_motion=args.target_motion,
        metric=args.metric,
        conf_min=args.conf_min,
        jump_max=args.jump_max,
        train_split=args.split,
    )
    labels_out = args.labels_out or str(Path(args.out).with_suffix("")) + "_labels.dtf"
    doc = stage_discover_motion(manifest, cfg, args.out, labels_out)
    print(f"discovered {doc['count']} motion concepts -> {args.out}, labels -> {labels_out}")
    return 0


def _cmd_label_context(args) -> int:
    manifest = load_manifest(args.manifest)
    cfg = PipelineConfig(
        manifest=args.manifest,
        out_dir=".",
        max_words=args.max_words,
        dup_sim=args.dup_sim,
        class_sim=args.class_sim,
        clamp=args.clamp,
        train_split=args.split,
    )
    names_out = args.names_out or str(Path(args.out).with_suffix("")) + ".concepts.json"
    names = stage_label_context(manifest, cfg, args.kind, args.candidates, args.embeds, args.out, names_out)
    print(f"kept {len(names)} {args.kind} concepts; labels -> {args.out}")
    return 0


def _cmd_train(args) -> int:
    manifest = load_manifest(args.manifest)
    cfg = PipelineConfig(
        manifest=args.manifest,
        out_dir=".",
        lam=args.lam,
        alpha=args.alpha,
        learning_rate=args.lr,
        momentum=args.momentum,
        epochs=args.epochs,
        seed=args.seed,
        cosine_cubed_axis=args.axis,
        train_split=args.split,
    )
    model = stage_train(
        manifest,
        cfg,
        args.motion_labels,
        args.object_labels,
        args.scene_labels,
        args.out,
        motion_concepts_path=args.motion_concepts,
        object_names_path=args.object_names,
        scene_names_path=args.scene_names,
    )
    print(f"trained model ({model.num_concepts} concepts, {model.num_classes} classes) -> {args.out}")
    return 0


def _cmd_evaluate(args) -> int:
    model = DanceModel.load(args.model)
    manifest = load_manifest(args.manifest)
    result = evaluate(model, manifest, args.split)
    payload = json.dumps(result.to_dict(), indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(payload + "\n")
    else:
        print(payload)
    print(f"top-1 accuracy on {args.split}: {result.accuracy:.4f}", file=sys.stderr)
    return 0


def _cmd_explain(args) -> int:
    model = DanceModel.load(args.model)
    manifest = load_manifest(args.manifest)
    record = manifest.video(args.video)
    x = read_tensor(record.feature_path).astype("float64")
    deactivated = [int(t) for t in args.deactivate.split(",")] if args.deactivate else None
    explanation = top_k_explanation(x, model, k=args.top, video_id=args.video, deactivated=deactivated)
    if args.as_json:
        print(json.dumps(explanation.to_dict(), indent=2))
    else:
        print(f"{args.video}: predicted {explanation.predicted_class_name} "
              f"(p={explanation.class_distribution[explanation.predicted_class]:.3f})")
        for item in explanation.items:
            print(f"  [{item.kind:6s}] {item.name:30s} contribution {item.contribution:+.4f}")
    return 0


def _cmd_edit(args) -> int:
    model = DanceModel.load(args.model)
    edited = edit_class_weight(model, args.class_index, args.concept, args.value)
    edited.save(args.out)
    print(f"edited W_A[{args.class_index}, {args.concept}] -> {args.value}; saved {args.out}")
    return 0


def _cmd_report(args) -> int:
    manifest = load_manifest(args.manifest)
    before = DanceModel.load(args.before)
    after = DanceModel.load(args.after)
    report = intervention_report(before, after, manifest, args.split)
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_sankey(args) -> int:
    model = DanceModel.load(args.model)
    data = class_pair_weights(model, args.class_a, args.class_b, top_n=args.top_n)
    print(json.dumps(data.to_dict(), indent=2))
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .server import create_app

    app = create_app(args.model, args.manifest)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_pipeline(args) -> int:
    overrides = {
        "manifest": args.manifest,
        "out_dir": args.out_dir,
        "object_candidates": args.object_candidates,
        "object_text_emb": args.object_text_emb,
        "scene_candidates": args.scene_candidates,
        "scene_text_emb": args.scene_text_emb,
        "target_motion": args.target_motion,
        "lam": args.lam,
        "alpha": args.alpha,
        "epochs": args.epochs,
        "seed": args.seed,
    }
    if args.config:
        cfg = PipelineConfig.from_file(args.config, overrides)
    else:
        required = {k: overrides[k] for k in ("manifest", "out_dir")}
        missing = [k for k, v in required.items() if v is None]
        if missing:
            raise DanceError(f"pipeline needs --config or flags for: {missing}")
        cfg = PipelineConfig(**{k: v for k, v in overrides.items() if v is not None})
    summary = run_pipeline(cfg)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


_COMMANDS = {
    "synth": _cmd_synth,
    "keyclips": _cmd_keyclips,
    "discover-motion": _cmd_discover_motion,
    "label-context": _cmd_label_context,
    "train": _cmd_train,
    "evaluate": _cmd_evaluate,
    "explain": _cmd_explain,
    "edit": _cmd_edit,
    "report": _cmd_report,
    "sankey": _cmd_sankey,
    "serve": _cmd_serve,
    "pipeline": _cmd_pipeline,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except DanceError as exc:
        print(f"error ({args.command}): {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
