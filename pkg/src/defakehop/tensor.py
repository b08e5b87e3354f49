"""Dense tensor plumbing: window extraction, max pooling, PTEN files.

Tensors are numpy arrays in (h, w, c) order, batches in (n, h, w, c).
Input patches entering the pipeline are 32x32x3 with values in [0, 1].
"""
import struct

import numpy as np

from .backend import kernels
from .errors import DimensionError, InputError

PTEN_MAGIC = b"PTEN"
PTEN_VERSION = 1
_DTYPE_F32 = 0


def _as_batch(t):
    t = np.asarray(t, dtype=np.float64)
    if t.ndim == 3:
        return np.ascontiguousarray(t[None]), True
    if t.ndim == 4:
        return np.ascontiguousarray(t), False
    raise DimensionError(f"expected a (h, w, c) or (n, h, w, c) tensor, got ndim={t.ndim}")


def extract_windows(t, kh, kw):
    """Sliding kh x kw blocks, stride 1, no padding, row-major flattening.

    Output grid is (h-kh+1) x (w-kw+1); each vector has kh*kw*c entries.
    """
    x, single = _as_batch(t)
    if kh > x.shape[1] or kw > x.shape[2]:
        raise DimensionError(
            f"kernel {kh}x{kw} larger than input {x.shape[1]}x{x.shape[2]}"
        )
    if kh < 1 or kw < 1:
        raise DimensionError("kernel dims must be >= 1")
    out = kernels.extract_windows(x, kh, kw)
    return out[0] if single else out


def max_pool(t):
    """2x2 non-overlapping per-channel max, ceil mode.

    Odd trailing rows/columns form partial windows, so the output is
    ceil(h/2) x ceil(w/2); this is what takes 13x13 -> 7x7 and 5x5 -> 3x3
    in the cascade.
    """
    x, single = _as_batch(t)
    out = kernels.max_pool2(x)
    return out[0] if single else out


def save_pten(path, arr):
    """Write a PTEN v1 file: magic, version u8, dtype u8 (0 = f32 LE),
    u32 rank, rank x u32 dims, row-major payload."""
    arr = np.ascontiguousarray(np.asarray(arr, dtype="<f4"))
    with open(path, "wb") as fh:
        fh.write(PTEN_MAGIC)
        fh.write(struct.pack("<BB", PTEN_VERSION, _DTYPE_F32))
        fh.write(struct.pack("<I", arr.ndim))
        fh.write(struct.pack(f"<{arr.ndim}I", *arr.shape))
        fh.write(arr.tobytes())


def load_pten(path):
    try:
        with open(path, "rb") as fh:
            data = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read PTEN file {path}: {exc}") from exc
    if len(data) < 10 or data[:4] != PTEN_MAGIC:
        raise InputError(f"{path}: not a PTEN file")
    version, dtype_code = struct.unpack_from("<BB", data, 4)
    if version != PTEN_VERSION:
        raise InputError(f"{path}: unsupported PTEN version {version}")
    if dtype_code != _DTYPE_F32:
        raise InputError(f"{path}: unsupported dtype code {dtype_code}")
    (rank,) = struct.unpack_from("<I", data, 6)
    header_end = 10 + 4 * rank
    if len(data) < header_end:
        raise InputError(f"{path}: truncated PTEN header")
    dims = struct.unpack_from(f"<{rank}I", data, 10)
    count = int(np.prod(dims, dtype=np.int64)) if rank else 1
    payload = data[header_end:]
    if len(payload) != 4 * count:
        raise InputError(
            f"{path}: payload length {len(payload)} != expected {4 * count}"
        )
    return np.frombuffer(payload, dtype="<f4").reshape(dims).copy()
