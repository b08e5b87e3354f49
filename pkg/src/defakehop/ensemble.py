"""Multi-region / multi-frame ensemble and scoring.

Per-frame descriptors (regions concatenated in fixed order) are stacked
with the 3 previous and 3 following frames of the same video; offsets
past a video boundary clamp to the nearest existing frame.  A depth-6
boosted forest scores frames; a video's score is the arithmetic mean of
its frame probabilities.
"""
from dataclasses import dataclass

import numpy as np

from .boosting import BoostParams, fit_boosted, predict_proba
from .errors import DataError, UndefinedMetricError

REGIONS = ("left_eye", "right_eye", "mouth")
FRAME_OFFSETS = range(-3, 4)


@dataclass
class FrameRecord:
    video_id: str
    frame_index: int
    descriptor: np.ndarray   # regions concatenated in REGIONS order
    label: int


@dataclass
class VideoScore:
    video_id: str
    frame_probs: list
    label: int

    @property
    def video_prob(self):
        return float(np.mean(self.frame_probs))


def group_frames(frames):
    """Frames grouped by video (insertion order) and sorted by index."""
    groups = {}
    for fr in frames:
        groups.setdefault(fr.video_id, []).append(fr)
    for vid, group in groups.items():
        group.sort(key=lambda fr: fr.frame_index)
    return groups


def build_ensemble_vectors(frames):
    """One vector per frame: offsets -3..+3 outer, region/channel inner.

    Windows never cross video boundaries; missing offsets clamp to the
    video's first/last frame.
    """
    groups = group_frames(frames)
    ordered, vectors = [], []
    for vid, group in groups.items():
        if not group:
            raise DataError(f"video {vid} has no frames")
        m = len(group)
        for t, fr in enumerate(group):
            parts = [group[min(max(t + o, 0), m - 1)].descriptor
                     for o in FRAME_OFFSETS]
            vectors.append(np.concatenate(parts))
            ordered.append(fr)
    return ordered, np.asarray(vectors)


def fit_final(vectors, labels, n_trees=100, max_depth=6, learning_rate=0.3,
              reg_lambda=1.0, min_child_weight=1.0):
    params = BoostParams(
        max_depth=max_depth,
        n_trees=n_trees,
        learning_rate=learning_rate,
        reg_lambda=reg_lambda,
        min_child_weight=min_child_weight,
    )
    return fit_boosted(vectors, labels, params)


def score_videos(model, frames):
    """Frame probabilities via the final classifier, averaged per video."""
    ordered, vectors = build_ensemble_vectors(frames)
    probs = predict_proba(model, vectors)
    scores = {}
    order = []
    for fr, p in zip(ordered, probs):
        if fr.video_id not in scores:
            scores[fr.video_id] = VideoScore(fr.video_id, [], fr.label)
            order.append(fr.video_id)
        scores[fr.video_id].frame_probs.append(float(p))
    return [scores[v] for v in order], ordered, probs


def auc(scores, labels):
    """Mann-Whitney AUC; ties count one half.

    Exactly equal to the O(n^2) pairwise comparison: computed from tied
    ranks, whose sums are half-integers and therefore exact in floats.
    """
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos = labels == 1
    n_pos = int(pos.sum())
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUC undefined: only one class present")
    order = np.argsort(scores, kind="mergesort")
    ranks = np.empty(len(scores), dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < len(scores):
        j = i
        while j + 1 < len(scores) and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        ranks[order[i:j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    pos_rank_sum = float(np.sum(ranks[pos]))
    u = pos_rank_sum - n_pos * (n_pos + 1) / 2.0
    return u / (n_pos * n_neg)
