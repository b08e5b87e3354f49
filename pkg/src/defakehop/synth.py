"""Synthetic desk-scale dataset generator.

"Real" patches are seeded smooth random fields per (video, region)
identity plus per-frame noise; "fake" patches additionally carry a
localized high-frequency artifact (checkerboard plus random 4x4 blocks)
of configurable amplitude in the central window.  Labels are assigned at
the video level, splits are by video, and everything is byte-reproducible
from the seed.
"""
import os
from dataclasses import dataclass

import numpy as np

from .ensemble import REGIONS
from .errors import InputError
from .manifest import ManifestEntry, write_manifest
from .tensor import save_pten

# calibrated artifact amplitude for the synthetic acceptance benchmark
CALIBRATED_AMPLITUDE = 0.3


@dataclass
class SynthConfig:
    n_videos: int = 250
    n_test_videos: int = 50
    frames_per_video: int = 10
    artifact_amplitude: float = CALIBRATED_AMPLITUDE
    noise_sigma: float = 0.05
    seed: int = 0


def _bilinear_upsample(coarse, size):
    """(gh, gw, c) -> (size, size, c) bilinear interpolation."""
    gh, gw, _ = coarse.shape
    ys = np.linspace(0, gh - 1, size)
    xs = np.linspace(0, gw - 1, size)
    y0 = np.clip(ys.astype(int), 0, gh - 2)
    x0 = np.clip(xs.astype(int), 0, gw - 2)
    fy = (ys - y0)[:, None, None]
    fx = (xs - x0)[None, :, None]
    a = coarse[y0][:, x0]
    b = coarse[y0][:, x0 + 1]
    c = coarse[y0 + 1][:, x0]
    d = coarse[y0 + 1][:, x0 + 1]
    return (a * (1 - fy) * (1 - fx) + b * (1 - fy) * fx
            + c * fy * (1 - fx) + d * fy * fx)


_CHECKER = ((-1.0) ** (np.add.outer(np.arange(16), np.arange(16))))[:, :, None]


def _make_patch(cfg, video, region_idx, frame, fake):
    base_rng = np.random.default_rng(
        np.random.SeedSequence([cfg.seed, video, region_idx]))
    base = 0.5 + 0.12 * _bilinear_upsample(base_rng.normal(size=(5, 5, 3)), 32)
    frame_rng = np.random.default_rng(
        np.random.SeedSequence([cfg.seed, video, region_idx, frame]))
    patch = base + frame_rng.normal(0.0, cfg.noise_sigma, size=(32, 32, 3))
    if fake and cfg.artifact_amplitude > 0:
        blocks = frame_rng.integers(0, 2, size=(4, 4, 1)) * 2.0 - 1.0
        blocks = np.repeat(np.repeat(blocks, 4, axis=0), 4, axis=1)
        artifact = cfg.artifact_amplitude * (0.6 * blocks + 0.4 * _CHECKER)
        patch[8:24, 8:24, :] += artifact
    return np.clip(patch, 0.0, 1.0)


def generate(cfg, out_dir):
    """Write PTEN patches plus manifest.jsonl; returns the manifest path."""
    if cfg.n_videos < 2 or not 0 <= cfg.n_test_videos < cfg.n_videos:
        raise InputError("need n_videos >= 2 and 0 <= n_test_videos < n_videos")
    if cfg.frames_per_video < 1:
        raise InputError("frames_per_video must be >= 1")
    if cfg.artifact_amplitude < 0:
        raise InputError("artifact_amplitude must be >= 0")
    patches_dir = os.path.join(out_dir, "patches")
    try:
        os.makedirs(patches_dir, exist_ok=True)
    except OSError as exc:
        raise InputError(f"cannot create output dir {out_dir}: {exc}") from exc
    n_train = cfg.n_videos - cfg.n_test_videos
    entries = []
    for v in range(cfg.n_videos):
        label = v % 2
        split = "train" if v < n_train else "test"
        for f in range(cfg.frames_per_video):
            for ri, region in enumerate(REGIONS):
                patch = _make_patch(cfg, v, ri, f, fake=label == 1)
                rel = os.path.join("patches", f"v{v:04d}_f{f:03d}_{region}.pten")
                save_pten(os.path.join(out_dir, rel), patch)
                entries.append(ManifestEntry(
                    video_id=f"v{v:04d}",
                    frame_index=f,
                    region=region,
                    label=label,
                    patch_path=rel,
                    split=split,
                ))
    manifest_path = os.path.join(out_dir, "manifest.jsonl")
    header = {
        "generator": "defakehop gen-synth",
        "n_videos": cfg.n_videos,
        "n_test_videos": cfg.n_test_videos,
        "frames_per_video": cfg.frames_per_video,
        "artifact_amplitude": cfg.artifact_amplitude,
        "noise_sigma": cfg.noise_sigma,
        "seed": cfg.seed,
    }
    write_manifest(manifest_path, entries, header=header)
    return manifest_path
