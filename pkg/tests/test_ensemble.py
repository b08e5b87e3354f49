import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from defakehop.ensemble import (FRAME_OFFSETS, REGIONS, FrameRecord,
                                VideoScore, auc, build_ensemble_vectors,
                                fit_final, score_videos)
from defakehop.errors import UndefinedMetricError

from .oracles import pairwise_auc


def _frames(n_videos, frames_per_video, dim, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    for v in range(n_videos):
        label = v % 2
        for f in range(frames_per_video):
            out.append(FrameRecord(
                video_id=f"v{v}",
                frame_index=f,
                descriptor=rng.normal(size=dim) + label,
                label=label,
            ))
    return out


def test_vector_layout_offsets_outer():
    frames = _frames(2, 8, 4)
    ordered, vectors = build_ensemble_vectors(frames)
    assert vectors.shape == (16, 7 * 4)
    by_key = {(fr.video_id, fr.frame_index): fr for fr in frames}
    for row, fr in zip(vectors, ordered):
        m = 8
        for slot, o in enumerate(FRAME_OFFSETS):
            t = min(max(fr.frame_index + o, 0), m - 1)
            want = by_key[(fr.video_id, t)].descriptor
            np.testing.assert_array_equal(row[slot * 4:(slot + 1) * 4], want)


def test_window_clamps_at_video_edges():
    frames = _frames(1, 2, 3)
    _, vectors = build_ensemble_vectors(frames)
    first = frames[0].descriptor
    # frame 0: offsets -3..0 all clamp to frame 0
    for slot in range(4):
        np.testing.assert_array_equal(vectors[0, slot * 3:(slot + 1) * 3], first)


def test_windows_do_not_cross_videos():
    frames = _frames(3, 1, 2)
    _, vectors = build_ensemble_vectors(frames)
    for row, fr in zip(vectors, frames):
        np.testing.assert_array_equal(row, np.tile(fr.descriptor, 7))


def test_full_vector_dim():
    # 3 regions x 10 channels x 7 offsets at full caps
    frames = _frames(2, 7, 3 * 30)
    _, vectors = build_ensemble_vectors(frames)
    assert vectors.shape[1] == 630


def test_unsorted_frames_are_ordered_by_index():
    frames = _frames(1, 5, 2)
    shuffled = [frames[i] for i in (3, 0, 4, 1, 2)]
    ordered, _ = build_ensemble_vectors(shuffled)
    assert [fr.frame_index for fr in ordered] == [0, 1, 2, 3, 4]


def test_video_prob_is_frame_mean():
    vs = VideoScore("v", [0.2, 0.4, 0.9], 1)
    assert vs.video_prob == pytest.approx(np.mean([0.2, 0.4, 0.9]))


def test_score_videos_end_to_end():
    frames = _frames(6, 4, 5, seed=1)
    _, vectors = build_ensemble_vectors(frames)
    labels = np.asarray([fr.label for fr in frames], dtype=float)
    model = fit_final(vectors, labels, n_trees=20)
    videos, ordered, probs = score_videos(model, frames)
    assert len(videos) == 6
    assert len(ordered) == len(probs) == 24
    for vs in videos:
        assert len(vs.frame_probs) == 4
        assert vs.video_prob == pytest.approx(np.mean(vs.frame_probs))
    assert auc([v.video_prob for v in videos],
               [v.label for v in videos]) > 0.9


def test_auc_matches_pairwise_oracle():
    rng = np.random.default_rng(2)
    for trial in range(100):
        n = int(rng.integers(2, 40))
        labels = rng.integers(0, 2, size=n)
        if labels.min() == labels.max():
            labels[0] = 1 - labels[0]
        # quantized scores so ties actually happen
        scores = np.round(rng.normal(size=n) * 2) / 4
        assert auc(scores, labels) == pairwise_auc(scores, labels)


def test_auc_known_values():
    assert auc([0.1, 0.9], [0, 1]) == 1.0
    assert auc([0.9, 0.1], [0, 1]) == 0.0
    assert auc([0.5, 0.5], [0, 1]) == 0.5
    assert auc([0.1, 0.5, 0.5, 0.9], [0, 0, 1, 1]) == 0.875


def test_auc_single_class_undefined():
    with pytest.raises(UndefinedMetricError):
        auc([0.1, 0.9], [1, 1])


@settings(max_examples=50, deadline=None)
@given(st.lists(st.tuples(st.integers(-8, 8), st.booleans()),
                min_size=2, max_size=30))
def test_auc_pairwise_property(items):
    labels = [int(y) for _, y in items]
    if len(set(labels)) < 2:
        return
    scores = [s / 4.0 for s, _ in items]
    assert auc(scores, labels) == pairwise_auc(scores, labels)


def test_regions_constant():
    assert REGIONS == ("left_eye", "right_eye", "mouth")
    assert list(FRAME_OFFSETS) == [-3, -2, -1, 0, 1, 2, 3]
