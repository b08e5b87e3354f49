"""Video to patch-dataset extraction."""
import os
from dataclasses import dataclass, field

import cv2
import numpy as np

from .align import REGIONS, AlignmentSpec, align_face, crop_region
from .dataset import append_manifest, manifest_line, save_pten
from .errors import DataError, InputError
from .landmarks import eye_centers


@dataclass
class ExtractionResult:
    video_id: str
    n_frames_read: int = 0
    n_frames_sampled: int = 0
    n_frames_written: int = 0
    skipped_frames: list = field(default_factory=list)
    manifest_path: str = ""


def _read_frames(video_path, sample_rate):
    cap = cv2.VideoCapture(str(video_path))
    if not cap.isOpened():
        cap.release()
        raise InputError(f"cannot open video {video_path}")
    index = 0
    try:
        while True:
            ok, frame = cap.read()
            if not ok:
                break
            if index % sample_rate == 0:
                yield index, frame
            index += 1
    finally:
        cap.release()


def _patch_from_face(face, region, spec):
    crop = crop_region(face, region, spec)
    # BGR capture order to RGB, normalized to [0, 1]
    return crop[:, :, ::-1].astype(np.float32) / 255.0


def extract_video(video_path, out_dir, video_id, label, backend,
                  sample_rate=1, split="train", spec=None, log=None):
    """Extract aligned region patches from one video.

    Writes PTEN files under out_dir/patches/ and appends to
    out_dir/manifest.jsonl.  Frames where the backend finds no face are
    skipped and reported; a video with no detectable face in any sampled
    frame is an error.
    """
    spec = spec or AlignmentSpec()
    log = log or (lambda msg: None)
    if sample_rate < 1:
        raise InputError("sample_rate must be >= 1")
    if label not in (0, 1):
        raise InputError("label must be 0 or 1")
    if split not in ("train", "test"):
        raise InputError("split must be train or test")
    patches_dir = os.path.join(out_dir, "patches")
    os.makedirs(patches_dir, exist_ok=True)

    result = ExtractionResult(video_id=video_id)
    lines = []
    last_index = -1
    for index, frame in _read_frames(video_path, sample_rate):
        last_index = index
        result.n_frames_sampled += 1
        landmarks = backend.detect(frame)
        if landmarks is None:
            result.skipped_frames.append(index)
            log(f"frame {index}: no face detected, skipped")
            continue
        left, right = eye_centers(landmarks)
        face = align_face(frame, left, right, spec)
        for region in REGIONS:
            rel = os.path.join(
                "patches", f"{video_id}_f{index:04d}_{region}.pten")
            save_pten(os.path.join(out_dir, rel),
                      _patch_from_face(face, region, spec))
            lines.append(manifest_line(video_id, index, region, label,
                                       rel, split))
        result.n_frames_written += 1
    result.n_frames_read = last_index + 1
    if result.n_frames_sampled == 0:
        raise InputError(f"video {video_path} has no frames")
    if result.n_frames_written == 0:
        raise DataError(
            f"no face detected in any of the {result.n_frames_sampled} "
            f"sampled frames of {video_path}")

    manifest_path = os.path.join(out_dir, "manifest.jsonl")
    append_manifest(manifest_path, lines, header={
        "generator": "preprocess extract",
        "landmark_backend": backend.name,
        "landmark_backend_version": backend.version,
        "alignment": {
            "face_size": spec.face_size,
            "patch_size": spec.patch_size,
            "left_eye": list(spec.left_eye),
            "right_eye": list(spec.right_eye),
            "mouth": list(spec.mouth),
        },
    })
    result.manifest_path = manifest_path
    return result
