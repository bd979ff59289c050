"""Object and scene (context) concepts: candidate filtering and soft pseudo labels.

Candidate phrases come from an external LLM queried per action class (the
engine ships the prompt templates below but never calls an LLM itself).
Filtering drops overlong phrases, near-duplicates, and phrases too close to a
class name.  Pseudo labels are cosine similarities between a video's
dual-encoder embedding and each concept's text embedding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EmptyConceptSet, ValidationError

DEFAULT_MAX_WORDS = 4
DEFAULT_DUP_SIM = 0.9
DEFAULT_CLASS_SIM = 0.85

# Templates for harvesting candidate concepts from an LLM, one query per
# action class.  Users run these externally and feed the answers back in as
# the candidates JSON.
PROMPT_TEMPLATES = {
    "object": (
        "For the <action class>, list the most important physical objects "
        "that commonly appear when this action occurs."
    ),
    "scene": (
        "List the most common places or background scenes where <action class> "
        "typically occurs. Do not include objects or equipment"
    ),
}

Embedder = Callable[[str], np.ndarray]


@dataclass
class ContextConceptSet:
    """Ordered, filtered concept vocabulary of one kind with unit-norm embeddings."""

    kind: str                 # "object" or "scene"
    names: list[str]
    embedding: np.ndarray     # M x D_e, rows unit L2 norm

    def __post_init__(self) -> None:
        if self.kind not in ("object", "scene"):
            raise ValidationError(f"kind must be object|scene, got {self.kind!r}")
        if len(self.names) != self.embedding.shape[0]:
            raise ValidationError(
                f"{len(self.names)} names vs {self.embedding.shape[0]} embedding rows"
            )
        if len(set(self.names)) != len(self.names):
            raise ValidationError("concept names must be unique")
        norms = np.linalg.norm(self.embedding, axis=1)
        if np.any(np.abs(norms - 1.0) > 1e-5):
            raise ValidationError("embedding rows must be unit norm")

    @property
    def count(self) -> int:
        return len(self.names)


def _unit(v: np.ndarray) -> np.ndarray:
    n = np.linalg.norm(v)
    return v / n if n > 0 else v


def canonical_phrase(raw: str) -> str:
    return " ".join(raw.lower().split())


def filter_concepts(
    candidates: dict[str, list[str]],
    class_names: list[str],
    embed: Embedder,
    kind: str,
    max_words: int = DEFAULT_MAX_WORDS,
    dup_sim: float = DEFAULT_DUP_SIM,
    class_sim: float = DEFAULT_CLASS_SIM,
) -> ContextConceptSet:
    """Filter per-class candidate phrases into a deduplicated concept set.

    Rules, applied in order over the union of candidates (lowercased,
    whitespace-trimmed, exact duplicates collapsed, input order preserved):

    1. drop phrases longer than *max_words* words;
    2. drop phrases whose embedding has cosine > *class_sim* with any class name;
    3. greedy dedup: drop a phrase whose cosine with any already-retained
       phrase exceeds *dup_sim*.

    Raises:
        EmptyConceptSet: nothing survives.
    """
    if not 0 < dup_sim <= 1 or not 0 < class_sim <= 1:
        raise ValidationError("dup_sim and class_sim must lie in (0, 1]")

    ordered: list[str] = []
    seen: set[str] = set()
    for cls in candidates:
        for raw in candidates[cls]:
            phrase = canonical_phrase(raw)
            if phrase and phrase not in seen:
                seen.add(phrase)
                ordered.append(phrase)

    class_vecs = [_unit(np.asarray(embed(canonical_phrase(c)), dtype=np.float64)) for c in class_names]

    survivors: list[str] = []
    survivor_vecs: list[np.ndarray] = []
    for phrase in ordered:
        if len(phrase.split()) > max_words:
            continue
        vec = _unit(np.asarray(embed(phrase), dtype=np.float64))
        if any(float(vec @ cv) > class_sim for cv in class_vecs):
            continue
        if any(float(vec @ sv) > dup_sim for sv in survivor_vecs):
            continue
        survivors.append(phrase)
        survivor_vecs.append(vec)

    if not survivors:
        raise EmptyConceptSet(f"no {kind} concepts survived filtering")
    return ContextConceptSet(kind=kind, names=survivors, embedding=np.stack(survivor_vecs))


def pseudo_labels(
    concepts: ContextConceptSet,
    video_embeddings: np.ndarray,
    clamp: bool = False,
) -> np.ndarray:
    """Soft concept labels: cosine of each video embedding with each concept row.

    Video embeddings are normalized to unit norm internally when they are not
    already.  With *clamp*, negative similarities are zeroed so the output
    lies in [0, 1]; otherwise it lies in [-1, 1].
    """
    v = np.asarray(video_embeddings, dtype=np.float64)
    if v.ndim != 2:
        raise ValidationError(f"video embeddings must be N x D_e, got shape {v.shape}")
    if v.shape[1] != concepts.embedding.shape[1]:
        raise ValidationError(
            f"embedding dim mismatch: videos {v.shape[1]} vs concepts {concepts.embedding.shape[1]}"
        )
    norms = np.linalg.norm(v, axis=1)
    needs = np.abs(norms - 1.0) > 1e-9
    if np.any(needs):
        safe = np.where(norms > 0, norms, 1.0)
        v = v / safe[:, None]
    labels = v @ concepts.embedding.T
    if clamp:
        labels = np.maximum(labels, 0.0)
    return labels
