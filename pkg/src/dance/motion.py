"""Motion-dynamics concept discovery from pose sequences.

Pose sequences are filtered for quality, normalized to a translation- and
scale-invariant frame, flattened, then clustered by repeatedly taking
connected components of the symmetrized first-nearest-neighbor graph
(recursing on cluster means).  Each cluster at the selected hierarchy level
becomes one motion-dynamics concept, represented by its medoid sequence.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateSequence, InputTooShort, ValidationError
from .manifest import DatasetManifest, PoseSequence, VideoRecord

log = logging.getLogger(__name__)

DEFAULT_CONF_MIN = 0.3
DEFAULT_JUMP_MAX = 0.5
DEFAULT_METRIC = "cosine"


# ---------------------------------------------------------------------------
# filtering / normalization
# ---------------------------------------------------------------------------

def _bbox_diagonal(coords: np.ndarray) -> float:
    """Diagonal of the bounding box spanned by every keypoint in *coords*."""
    mins = coords.reshape(-1, 2).min(axis=0)
    maxs = coords.reshape(-1, 2).max(axis=0)
    return float(np.hypot(*(maxs - mins)))


def passes_quality_filter(seq: PoseSequence, conf_min: float, jump_max: float) -> bool:
    """Quality predicate: confident joints and no large frame-to-frame jumps.

    The jump limit is expressed as a fraction of the sequence bounding-box
    diagonal per frame step.  Single-frame sequences trivially pass the jump
    check; a zero-diagonal (static point) sequence passes it only if it never
    moves at all.
    """
    if float(seq.conf.mean()) < conf_min:
        return False
    if seq.coords.shape[0] < 2:
        return True
    diag = _bbox_diagonal(seq.coords)
    steps = np.linalg.norm(np.diff(seq.coords, axis=0), axis=2)
    return float(steps.max()) <= jump_max * diag


def filter_pose_sequences(
    seqs: list[PoseSequence],
    conf_min: float = DEFAULT_CONF_MIN,
    jump_max: float = DEFAULT_JUMP_MAX,
) -> list[PoseSequence]:
    """Keep sequences passing the quality predicate, preserving order."""
    if not 0.0 <= conf_min <= 1.0:
        raise ValidationError(f"conf_min must be in [0, 1], got {conf_min}")
    if jump_max <= 0:
        raise ValidationError(f"jump_max must be > 0, got {jump_max}")
    return [s for s in seqs if passes_quality_filter(s, conf_min, jump_max)]


def normalize_pose_sequence(seq: PoseSequence) -> PoseSequence:
    """Center on the first frame's mean keypoint and scale by its bbox diagonal.

    The output is invariant to translating or uniformly rescaling the input.

    Raises:
        DegenerateSequence: the first frame has a zero bounding-box diagonal.
    """
    first = seq.coords[0]
    diag = _bbox_diagonal(first)
    if diag <= 0.0:
        raise DegenerateSequence(f"{seq.video_id}/{seq.clip_index}: zero bbox diagonal in first frame")
    center = first.mean(axis=0)
    return PoseSequence(
        coords=(seq.coords - center) / diag,
        conf=seq.conf,
        video_id=seq.video_id,
        clip_index=seq.clip_index,
    )


def reverse_pose_sequence(seq: PoseSequence) -> PoseSequence:
    """Time-reverse a sequence (an exact involution)."""
    return PoseSequence(
        coords=seq.coords[::-1].copy(),
        conf=seq.conf[::-1].copy(),
        video_id=seq.video_id,
        clip_index=seq.clip_index,
    )


# ---------------------------------------------------------------------------
# first-neighbor clustering
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Partition:
    labels: np.ndarray          # per-sample cluster id, 0..num_clusters-1
    num_clusters: int


@dataclass(frozen=True)
class FinchHierarchy:
    """Partitions from finest (level 0) to coarsest; strict coarsenings."""

    levels: list[Partition]

    def cluster_counts(self) -> list[int]:
        return [p.num_clusters for p in self.levels]


def pairwise_distances(x: np.ndarray, metric: str) -> np.ndarray:
    """Dense n x n distance matrix; cosine treats zero vectors as distance 1."""
    x = np.asarray(x, dtype=np.float64)
    if metric == "cosine":
        norms = np.linalg.norm(x, axis=1)
        safe = np.where(norms > 0, norms, 1.0)
        xn = x / safe[:, None]
        return 1.0 - xn @ xn.T
    if metric == "euclidean":
        sq = np.sum(x * x, axis=1)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (x @ x.T)
        return np.sqrt(np.maximum(d2, 0.0))
    raise ValidationError(f"unknown metric {metric!r}")


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[max(ra, rb)] = min(ra, rb)


def first_neighbor_partition(x: np.ndarray, metric: str) -> Partition:
    """Connected components of the symmetrized first-nearest-neighbor graph.

    Nearest-neighbor ties break to the lower index; component ids are assigned
    in order of first occurrence, so the result is deterministic.
    """
    n = x.shape[0]
    dist = pairwise_distances(x, metric)
    np.fill_diagonal(dist, np.inf)
    nn = np.argmin(dist, axis=1)  # first occurrence wins ties

    uf = _UnionFind(n)
    for i in range(n):
        uf.union(i, int(nn[i]))

    labels = np.empty(n, dtype=np.int64)
    remap: dict[int, int] = {}
    for i in range(n):
        root = uf.find(i)
        if root not in remap:
            remap[root] = len(remap)
        labels[i] = remap[root]
    return Partition(labels=labels, num_clusters=len(remap))


def _cluster_means(x: np.ndarray, labels: np.ndarray, k: int) -> np.ndarray:
    means = np.zeros((k, x.shape[1]), dtype=np.float64)
    counts = np.bincount(labels, minlength=k).astype(np.float64)
    np.add.at(means, labels, x)
    return means / counts[:, None]


def finch_cluster(vectors: np.ndarray, metric: str = DEFAULT_METRIC) -> FinchHierarchy:
    """Build the full partition hierarchy over flattened pose vectors.

    Level 0 clusters the points themselves; each subsequent level reclusters
    the previous level's cluster means, merging whole clusters until a single
    cluster remains (or no merge happens).

    Raises:
        InputTooShort: fewer than 2 vectors.
        ValidationError: non-finite input.
    """
    x = np.asarray(vectors, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise InputTooShort(f"clustering needs >= 2 vectors, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValidationError("clustering input contains non-finite values")

    levels = [first_neighbor_partition(x, metric)]
    while levels[-1].num_clusters > 1:
        prev = levels[-1]
        means = _cluster_means(x, prev.labels, prev.num_clusters)
        merged = first_neighbor_partition(means, metric)
        if merged.num_clusters >= prev.num_clusters:
            break
        labels = merged.labels[prev.labels]
        levels.append(Partition(labels=labels, num_clusters=merged.num_clusters))
    return FinchHierarchy(levels=levels)


def select_partition(hierarchy: FinchHierarchy, target_m: int) -> Partition:
    """Pick the level whose cluster count is closest to *target_m* (ties: finer)."""
    if not hierarchy.levels:
        raise ValidationError("empty hierarchy")
    best = min(range(len(hierarchy.levels)), key=lambda i: (abs(hierarchy.levels[i].num_clusters - target_m), i))
    return hierarchy.levels[best]


def cluster_medoid(members: np.ndarray, metric: str = DEFAULT_METRIC) -> int:
    """Index of the member minimizing summed distance to all other members.

    Ties break to the lowest index.
    """
    members = np.asarray(members, dtype=np.float64)
    if members.ndim != 2 or members.shape[0] == 0:
        raise ValidationError("medoid of an empty cluster is undefined")
    if members.shape[0] == 1:
        return 0
    sums = pairwise_distances(members, metric).sum(axis=1)
    return int(np.argmin(sums))


# ---------------------------------------------------------------------------
# assignment tensor and labels
# ---------------------------------------------------------------------------

@dataclass
class AssignmentTensor:
    """Binary N x S x M tensor: clip s of video i belongs to cluster k."""

    a: np.ndarray
    video_ids: list[str]
    index_by_id: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.index_by_id:
            self.index_by_id = {vid: i for i, vid in enumerate(self.video_ids)}


def build_assignment_tensor(
    partition: Partition,
    clip_keys: list[tuple[str, int]],
    video_ids: list[str],
    num_clips: int,
) -> AssignmentTensor:
    """Expand a flat partition into the per-(video, clip) assignment tensor.

    Args:
        partition: cluster id per clustered sequence.
        clip_keys: (video_id, clip_index) per clustered sequence, aligned with
            partition.labels; clip_index addresses the S axis directly.
        video_ids: ordered universe of videos (rows of the tensor).
        num_clips: S, the clip-axis extent.

    Rows for clips that were filtered out (or never existed) stay all-zero.
    """
    if len(clip_keys) != len(partition.labels):
        raise ValidationError("clip_keys and partition labels differ in length")
    index_by_id = {vid: i for i, vid in enumerate(video_ids)}
    a = np.zeros((len(video_ids), num_clips, partition.num_clusters), dtype=np.uint8)
    seen: set[tuple[str, int]] = set()
    for (video_id, clip_index), k in zip(clip_keys, partition.labels):
        if (video_id, clip_index) in seen:
            raise ValidationError(f"duplicate clip key ({video_id!r}, {clip_index})")
        seen.add((video_id, clip_index))
        if video_id not in index_by_id:
            raise ValidationError(f"clip references unknown video {video_id!r}")
        if not 0 <= clip_index < num_clips:
            raise ValidationError(f"clip index {clip_index} outside 0..{num_clips - 1}")
        a[index_by_id[video_id], clip_index, int(k)] = 1
    return AssignmentTensor(a=a, video_ids=list(video_ids))


def motion_labels(tensor: AssignmentTensor) -> np.ndarray:
    """Per-video binary concept labels: 1 iff any clip of the video is in cluster k."""
    return (tensor.a.sum(axis=1) >= 1).astype(np.uint8)


# ---------------------------------------------------------------------------
# end-to-end discovery
# ---------------------------------------------------------------------------

@dataclass
class MotionConceptSet:
    """Discovered motion concepts with medoid representatives.

    Medoid coordinates are stored in the normalized (centered, unit-diagonal)
    frame used for clustering, which is also the frame the UI renders.
    """

    count: int
    medoids: list[PoseSequence]
    members: list[list[tuple[str, int]]]


@dataclass
class MotionDiscovery:
    concept_set: MotionConceptSet
    labels: np.ndarray              # N x M_m binary, rows follow video_ids
    assignment: AssignmentTensor
    hierarchy_counts: list[int]


def discover_motion_concepts(
    manifest: DatasetManifest,
    records: list[VideoRecord],
    target_m: int,
    metric: str = DEFAULT_METRIC,
    conf_min: float = DEFAULT_CONF_MIN,
    jump_max: float = DEFAULT_JUMP_MAX,
) -> MotionDiscovery:
    """Run the full discovery chain over the pose sequences of *records*."""
    kept: list[PoseSequence] = []
    for record in records:
        for seq in filter_pose_sequences(manifest.load_poses(record), conf_min, jump_max):
            try:
                kept.append(normalize_pose_sequence(seq))
            except DegenerateSequence:
                log.warning("dropping degenerate pose sequence %s/%s", seq.video_id, seq.clip_index)
    if len(kept) < 2:
        raise InputTooShort(
            f"only {len(kept)} pose sequences survived filtering; cannot discover motion concepts"
        )

    vectors = np.stack([s.flatten() for s in kept])
    hierarchy = finch_cluster(vectors, metric=metric)
    partition = select_partition(hierarchy, target_m)

    video_ids = [r.id for r in records]
    clip_keys = [(s.video_id, s.clip_index) for s in kept]
    num_clips = max(ci for _, ci in clip_keys) + 1
    assignment = build_assignment_tensor(partition, clip_keys, video_ids, num_clips)
    labels = motion_labels(assignment)

    medoids: list[PoseSequence] = []
    members: list[list[tuple[str, int]]] = []
    for k in range(partition.num_clusters):
        idx = np.flatnonzero(partition.labels == k)
        medoid_local = cluster_medoid(vectors[idx], metric=metric)
        medoids.append(kept[idx[medoid_local]])
        members.append([clip_keys[j] for j in idx])

    concept_set = MotionConceptSet(count=partition.num_clusters, medoids=medoids, members=members)
    return MotionDiscovery(
        concept_set=concept_set,
        labels=labels,
        assignment=assignment,
        hierarchy_counts=hierarchy.cluster_counts(),
    )
