"""Canonical face alignment.

Faces are similarity-aligned (rotation, scale, translation; no nonrigid
warp) so the eye centers land on fixed targets of a 128x128 canonical
face, then the three 32x32 region patches are cropped at fixed boxes.
The crop-box coordinates center each region on the canonical face; they
are a convention of this tool, not an upstream requirement.
"""
from dataclasses import dataclass

import cv2
import numpy as np

REGIONS = ("left_eye", "right_eye", "mouth")


@dataclass(frozen=True)
class AlignmentSpec:
    face_size: int = 128
    patch_size: int = 32
    left_eye: tuple = (44.0, 52.0)     # (x, y) targets on the canonical face
    right_eye: tuple = (84.0, 52.0)
    mouth: tuple = (64.0, 92.0)

    def __post_init__(self):
        for region in REGIONS:
            x0, y0 = self.crop_origin(region)
            if not (0 <= x0 and 0 <= y0
                    and x0 + self.patch_size <= self.face_size
                    and y0 + self.patch_size <= self.face_size):
                raise ValueError(f"{region} crop box leaves the canonical face")

    def center(self, region):
        return {"left_eye": self.left_eye, "right_eye": self.right_eye,
                "mouth": self.mouth}[region]

    def crop_origin(self, region):
        cx, cy = self.center(region)
        half = self.patch_size / 2
        return int(round(cx - half)), int(round(cy - half))


def similarity_from_eyes(src_left, src_right, spec):
    """2x3 affine (rotation+scale+translation) mapping the detected eye
    centers onto the spec targets."""
    sl = complex(*src_left)
    sr = complex(*src_right)
    tl = complex(*spec.left_eye)
    tr = complex(*spec.right_eye)
    if sr == sl:
        raise ValueError("eye centers coincide; cannot align")
    z = (tr - tl) / (sr - sl)
    t = tl - z * sl
    return np.array([
        [z.real, -z.imag, t.real],
        [z.imag, z.real, t.imag],
    ])


def align_face(frame, src_left, src_right, spec):
    """Warp a frame to the canonical 128x128 face."""
    m = similarity_from_eyes(src_left, src_right, spec)
    return cv2.warpAffine(frame, m, (spec.face_size, spec.face_size),
                          flags=cv2.INTER_LINEAR,
                          borderMode=cv2.BORDER_REPLICATE)


def crop_region(face, region, spec):
    x0, y0 = spec.crop_origin(region)
    return face[y0:y0 + spec.patch_size, x0:x0 + spec.patch_size]
