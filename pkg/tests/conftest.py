from __future__ import annotations

import pytest

from dance.pipeline import PipelineConfig, run_pipeline
from dance.synthetic import SyntheticConfig, generate_synthetic_dataset


@pytest.fixture(scope="session")
def small_dataset(tmp_path_factory):
    """A small planted dataset plus a finished pipeline run, shared by tests."""
    root = tmp_path_factory.mktemp("small")
    data = root / "data"
    cfg = SyntheticConfig(num_videos=40, seed=9)
    manifest, truth = generate_synthetic_dataset(data, cfg)
    pipeline_cfg = PipelineConfig(
        manifest=str(data / "manifest.json"),
        out_dir=str(root / "run"),
        target_motion=cfg.num_motion,
        seed=9,
        lam=2e-3,
        epochs=800,
        object_candidates=str(data / "candidates_object.json"),
        object_text_emb=str(data / "text_emb_object.dtf"),
        scene_candidates=str(data / "candidates_scene.json"),
        scene_text_emb=str(data / "text_emb_scene.dtf"),
    )
    summary = run_pipeline(pipeline_cfg)
    return {
        "root": root,
        "data": data,
        "manifest": manifest,
        "truth": truth,
        "config": pipeline_cfg,
        "summary": summary,
        "model_dir": summary["model_dir"],
    }
