"""Dataset manifests: JSON Lines, one patch entry per line.

Lines without a ``video_id`` key are treated as headers (provenance
metadata written by producers) and ignored.  Train/test splits are by
video, never by frame.
"""
import json
import os
from dataclasses import asdict, dataclass

import numpy as np

from .ensemble import REGIONS
from .errors import DataError, InputError
from .tensor import load_pten

PATCH_SHAPE = (32, 32, 3)


@dataclass
class ManifestEntry:
    video_id: str
    frame_index: int
    region: str
    label: int
    patch_path: str
    split: str

    def key(self):
        return (self.video_id, self.frame_index, self.region)


def write_manifest(path, entries, header=None):
    with open(path, "w", encoding="utf-8") as fh:
        if header:
            fh.write(json.dumps(header, sort_keys=True) + "\n")
        for e in entries:
            fh.write(json.dumps(asdict(e), sort_keys=True) + "\n")


def load_manifest(path):
    entries = []
    seen = set()
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read manifest {path}: {exc}") from exc
    with fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: invalid JSON") from exc
            if not isinstance(obj, dict):
                raise InputError(f"{path}:{lineno}: expected an object")
            if "video_id" not in obj:
                continue  # header line
            try:
                entry = ManifestEntry(
                    video_id=str(obj["video_id"]),
                    frame_index=int(obj["frame_index"]),
                    region=str(obj["region"]),
                    label=int(obj["label"]),
                    patch_path=str(obj["patch_path"]),
                    split=str(obj["split"]),
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise InputError(f"{path}:{lineno}: malformed entry: {exc}") from exc
            if entry.region not in REGIONS:
                raise InputError(f"{path}:{lineno}: unknown region {entry.region!r}")
            if entry.label not in (0, 1):
                raise InputError(f"{path}:{lineno}: label must be 0 or 1")
            if entry.split not in ("train", "test"):
                raise InputError(f"{path}:{lineno}: split must be train or test")
            if entry.key() in seen:
                raise InputError(
                    f"{path}:{lineno}: duplicate (video, frame, region) {entry.key()}"
                )
            seen.add(entry.key())
            entries.append(entry)
    if not entries:
        raise InputError(f"{path}: manifest has no entries")
    return entries


def _load_patch(base_dir, entry):
    path = entry.patch_path
    if not os.path.isabs(path):
        path = os.path.join(base_dir, path)
    if not os.path.exists(path):
        raise InputError(f"missing patch file: {path}")
    arr = load_pten(path)
    if arr.shape != PATCH_SHAPE:
        raise InputError(f"{path}: expected 32x32x3 patch, got {arr.shape}")
    return arr


@dataclass
class FrameGroup:
    video_id: str
    frame_index: int
    label: int
    patches: dict              # region -> (32, 32, 3) float array
    split: str


def load_frames(manifest_path, split, drop_incomplete=True):
    """Group manifest entries into frames with all three region patches.

    drop_incomplete drops frames missing a region (training behavior);
    otherwise incomplete frames are kept with the regions they have and
    the caller imputes the rest (inference behavior).
    """
    entries = [e for e in load_manifest(manifest_path) if e.split == split]
    if not entries:
        raise DataError(f"manifest has no entries in split {split!r}")
    base_dir = os.path.dirname(os.path.abspath(manifest_path))
    grouped = {}
    for e in entries:
        grouped.setdefault((e.video_id, e.frame_index), []).append(e)
    frames = []
    n_dropped = 0
    for (vid, fi) in sorted(grouped):
        group = grouped[(vid, fi)]
        labels = {e.label for e in group}
        if len(labels) != 1:
            raise InputError(f"conflicting labels for video {vid} frame {fi}")
        regions = {e.region for e in group}
        if drop_incomplete and regions != set(REGIONS):
            n_dropped += 1
            continue
        patches = {e.region: np.asarray(_load_patch(base_dir, e), dtype=np.float64)
                   for e in group}
        frames.append(FrameGroup(vid, fi, labels.pop(), patches, split))
    if not frames:
        raise DataError(f"no usable frames in split {split!r}")
    return frames, n_dropped
