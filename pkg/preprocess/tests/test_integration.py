"""The produced datasets must be directly consumable by the defakehop CLI."""
import json
import subprocess
import sys

import pytest

from preprocess.extract import extract_video
from preprocess.landmarks import ColorMarkerBackend

from .conftest import make_clip


def _defakehop(*args):
    return subprocess.run(
        [sys.executable, "-m", "defakehop.cli", *args],
        capture_output=True, text=True)


@pytest.fixture(scope="module")
def dataset(tmp_path_factory):
    """Four fixture clips (two real, two fake) extracted into one dataset."""
    root = tmp_path_factory.mktemp("integration")
    out = root / "data"
    backend = ColorMarkerBackend()
    clips = [
        ("real0", 0, "train"), ("fake0", 1, "train"),
        ("real1", 0, "test"), ("fake1", 1, "test"),
    ]
    for i, (vid, label, split) in enumerate(clips):
        clip = root / f"{vid}.avi"
        make_clip(clip, 8, fake=label == 1, seed=10 + i)
        extract_video(clip, out, vid, label, backend, split=split)
    return root, out


def test_primary_train_and_eval_consume_the_dataset(dataset):
    root, out = dataset
    model = root / "model.dfhm"
    res = _defakehop("train", "--manifest", str(out / "manifest.jsonl"),
                     "-o", str(model))
    assert res.returncode == 0, res.stderr + res.stdout
    assert model.exists()

    res = _defakehop("eval", "--model", str(model),
                     "--manifest", str(out / "manifest.jsonl"))
    assert res.returncode == 0, res.stderr + res.stdout
    metrics = json.loads(res.stdout.strip().splitlines()[-1])
    assert metrics["n_videos"] == 2
    assert metrics["n_frames"] == 16
    assert 0.0 <= metrics["video_auc"] <= 1.0


def test_primary_predict_scores_every_frame(dataset):
    root, out = dataset
    model = root / "model.dfhm"
    scores = root / "scores.jsonl"
    res = _defakehop("predict", "--model", str(model),
                     "--manifest", str(out / "manifest.jsonl"),
                     "-o", str(scores), "--per-frame")
    assert res.returncode == 0, res.stderr + res.stdout
    lines = [json.loads(l) for l in scores.read_text().splitlines()]
    assert sum("video_prob" in l for l in lines) == 2
    assert sum("frame_prob" in l for l in lines) == 16
