"""Writers for the dataset format the classifier consumes: PTEN patch
files (raw little-endian float32 tensors) and the JSON Lines manifest.

These mirror the consumer's documented formats; the two packages share
no code.
"""
import json
import os
import struct

import numpy as np

PTEN_MAGIC = b"PTEN"
PTEN_VERSION = 1
PTEN_DTYPE_F32 = 0


def save_pten(path, arr):
    arr = np.ascontiguousarray(np.asarray(arr, dtype="<f4"))
    with open(path, "wb") as fh:
        fh.write(PTEN_MAGIC)
        fh.write(struct.pack("<BB", PTEN_VERSION, PTEN_DTYPE_F32))
        fh.write(struct.pack("<I", arr.ndim))
        fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
        fh.write(arr.tobytes())


def manifest_line(video_id, frame_index, region, label, patch_path, split):
    return json.dumps({
        "video_id": video_id,
        "frame_index": frame_index,
        "region": region,
        "label": label,
        "patch_path": patch_path,
        "split": split,
    }, sort_keys=True)


def append_manifest(path, lines, header=None):
    """Append entry lines, writing the header only on first creation."""
    fresh = not os.path.exists(path)
    with open(path, "a", encoding="utf-8") as fh:
        if fresh and header is not None:
            fh.write(json.dumps(header, sort_keys=True) + "\n")
        for line in lines:
            fh.write(line + "\n")
