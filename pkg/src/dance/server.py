"""HTTP service exposing explanations, interventions, and model versions.

Mutating endpoints never touch existing versions: an intervention creates a
new version (recorded with its parent) and returns its id, while reads
against any pinned version keep serving that exact model.  All responses
carry the version id they were computed from; errors use a structured
``{"code", "message"}`` body.
"""

from __future__ import annotations

import threading
from pathlib import Path

from fastapi import FastAPI, Query, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .errors import DanceError, ValidationError
from .explain import class_pair_weights, top_k_explanation
from .intervene import edit_class_weight, evaluate, intervention_report
from .manifest import DatasetManifest, load_manifest
from .model import DanceModel
from .tensorio import read_tensor


# 17-keypoint skeleton convention of the upstream pose estimator; served with
# the concept metadata so clients need no hardcoded copy.
SKELETON_EDGES = [
    [0, 1], [0, 2], [1, 3], [2, 4],
    [5, 6],
    [5, 7], [7, 9], [6, 8], [8, 10],
    [5, 11], [6, 12], [11, 12],
    [11, 13], [13, 15], [12, 14], [14, 16],
]


class ModelRegistry:
    """Single-writer store of model versions with parent lineage."""

    def __init__(self, base: DanceModel) -> None:
        self._lock = threading.Lock()
        self._versions: dict[str, DanceModel] = {"v1": base}
        self._parents: dict[str, str | None] = {"v1": None}
        self.active = "v1"

    def get(self, version: str | None) -> tuple[str, DanceModel]:
        vid = version or self.active
        if vid not in self._versions:
            raise KeyError(vid)
        return vid, self._versions[vid]

    def add(self, model: DanceModel, parent: str) -> str:
        with self._lock:
            vid = f"v{len(self._versions) + 1}"
            self._versions[vid] = model
            self._parents[vid] = parent
            return vid

    def listing(self) -> list[dict]:
        return [
            {
                "id": vid,
                "parent": self._parents[vid],
                "edits": len(self._versions[vid].edit_log),
            }
            for vid in sorted(self._versions, key=lambda v: int(v[1:]))
        ]


class ExplainRequest(BaseModel):
    video_id: str
    k: int = 3
    deactivated: list[int] = []
    version: str | None = None


class InterveneRequest(BaseModel):
    class_index: int
    concept_index: int
    value: float
    version: str | None = None


class EvaluateRequest(BaseModel):
    split: str = "test"
    version: str | None = None


class ReportRequest(BaseModel):
    before: str
    after: str
    split: str = "test"


def create_app(model_dir: str | Path, manifest_path: str | Path) -> FastAPI:
    model = DanceModel.load(model_dir)
    manifest: DatasetManifest = load_manifest(manifest_path)
    registry = ModelRegistry(model)

    app = FastAPI(title="dance", docs_url=None, redoc_url=None)
    app.state.registry = registry

    def error(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"code": code, "message": message})

    @app.exception_handler(DanceError)
    async def _dance_error(_request: Request, exc: DanceError):
        return error(400, "invalid_request", str(exc))

    @app.exception_handler(KeyError)
    async def _missing(_request: Request, exc: KeyError):
        return error(404, "not_found", f"unknown resource {exc}")

    @app.get("/model")
    def get_model(version: str | None = None):
        vid, m = registry.get(version)
        return {
            "version": vid,
            "active": registry.active,
            "feature_dim": m.feature_dim,
            "num_motion": m.w_motion.shape[0],
            "num_object": m.w_object.shape[0],
            "num_scene": m.w_scene.shape[0],
            "num_concepts": m.num_concepts,
            "num_classes": m.num_classes,
            "class_names": m.class_names,
            "lam": m.hyperparams.get("lam"),
            "alpha": m.hyperparams.get("alpha"),
        }

    @app.get("/concepts")
    def get_concepts(version: str | None = None):
        vid, m = registry.get(version)
        space = m.concept_space
        concepts = []
        for idx in range(space.total):
            medoid = space.medoid_of(idx)
            concepts.append(
                {
                    "index": idx,
                    "kind": space.kind_of(idx),
                    "name": space.name_of(idx),
                    "medoid": None
                    if medoid is None
                    else {
                        "video_id": medoid.video_id,
                        "clip_index": medoid.clip_index,
                        "coords": medoid.coords.tolist(),
                    },
                }
            )
        return {"version": vid, "concepts": concepts, "skeleton_edges": SKELETON_EDGES}

    @app.get("/videos")
    def get_videos(split: str = Query(...)):
        if split not in manifest.splits:
            return error(404, "not_found", f"unknown split {split!r}")
        records = manifest.split(split)
        return {
            "version": registry.active,
            "split": split,
            "videos": [{"id": r.id, "label": r.label, "class_name": manifest.class_names[r.label]} for r in records],
        }

    @app.post("/explain")
    def post_explain(req: ExplainRequest):
        vid, m = registry.get(req.version)
        if req.video_id not in manifest.index_by_id:
            return error(404, "not_found", f"unknown video {req.video_id!r}")
        record = manifest.video(req.video_id)
        x = read_tensor(record.feature_path).astype("float64")
        explanation = top_k_explanation(x, m, k=req.k, video_id=req.video_id, deactivated=req.deactivated or None)
        return {"version": vid, "explanation": explanation.to_dict()}

    @app.post("/intervene/class")
    def post_intervene(req: InterveneRequest):
        parent, m = registry.get(req.version)
        if not 0 <= req.class_index < m.num_classes:
            return error(404, "not_found", f"unknown class {req.class_index}")
        if not 0 <= req.concept_index < m.num_concepts:
            return error(404, "not_found", f"unknown concept {req.concept_index}")
        edited = edit_class_weight(m, req.class_index, req.concept_index, req.value)
        new_id = registry.add(edited, parent)
        return {"version": new_id, "parent": parent}

    @app.get("/sankey")
    def get_sankey(class_a: int, class_b: int, top_n: int = 5, version: str | None = None):
        vid, m = registry.get(version)
        for c in (class_a, class_b):
            if not 0 <= c < m.num_classes:
                return error(404, "not_found", f"unknown class {c}")
        try:
            data = class_pair_weights(m, class_a, class_b, top_n=top_n)
        except ValidationError as exc:
            return error(400, "invalid_request", str(exc))
        return {"version": vid, "sankey": data.to_dict()}

    @app.post("/evaluate")
    def post_evaluate(req: EvaluateRequest):
        vid, m = registry.get(req.version)
        if req.split not in manifest.splits:
            return error(404, "not_found", f"unknown split {req.split!r}")
        result = evaluate(m, manifest, req.split)
        return {"version": vid, "metrics": result.to_dict()}

    @app.post("/report")
    def post_report(req: ReportRequest):
        _, before = registry.get(req.before)
        _, after = registry.get(req.after)
        if req.split not in manifest.splits:
            return error(404, "not_found", f"unknown split {req.split!r}")
        report = intervention_report(before, after, manifest, req.split)
        return {"before": req.before, "after": req.after, "report": report.to_dict()}

    @app.get("/versions")
    def get_versions():
        return {"active": registry.active, "versions": registry.listing()}

    return app
