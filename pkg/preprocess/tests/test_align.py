import numpy as np
import pytest

from preprocess.align import (REGIONS, AlignmentSpec, align_face,
                              crop_region, similarity_from_eyes)


def _apply(m, p):
    return m[:, :2] @ np.asarray(p) + m[:, 2]


def test_similarity_maps_eyes_onto_targets():
    spec = AlignmentSpec()
    cases = [
        ((130, 100), (190, 100)),          # horizontal
        ((100, 120), (150, 80)),           # rotated
        ((10, 10), (20, 12)),              # small face, needs upscale
    ]
    for left, right in cases:
        m = similarity_from_eyes(left, right, spec)
        np.testing.assert_allclose(_apply(m, left), spec.left_eye, atol=1e-9)
        np.testing.assert_allclose(_apply(m, right), spec.right_eye, atol=1e-9)


def test_similarity_preserves_shape():
    # a similarity transform scales all distances by the same factor
    spec = AlignmentSpec()
    left, right = (100.0, 120.0), (150.0, 80.0)
    m = similarity_from_eyes(left, right, spec)
    rng = np.random.default_rng(0)
    pts = rng.uniform(0, 200, size=(10, 2))
    mapped = np.array([_apply(m, p) for p in pts])
    src_d = np.linalg.norm(pts[1:] - pts[0], axis=1)
    dst_d = np.linalg.norm(mapped[1:] - mapped[0], axis=1)
    ratio = np.linalg.norm(np.subtract(spec.right_eye, spec.left_eye)) \
        / np.linalg.norm(np.subtract(right, left))
    np.testing.assert_allclose(dst_d / src_d, ratio, rtol=1e-9)


def test_coincident_eyes_rejected():
    with pytest.raises(ValueError):
        similarity_from_eyes((50, 50), (50, 50), AlignmentSpec())


def test_crop_boxes_inside_face():
    spec = AlignmentSpec()
    for region in REGIONS:
        x0, y0 = spec.crop_origin(region)
        assert 0 <= x0 <= spec.face_size - spec.patch_size
        assert 0 <= y0 <= spec.face_size - spec.patch_size


def test_bad_spec_rejected():
    with pytest.raises(ValueError):
        AlignmentSpec(mouth=(64.0, 120.0))
    with pytest.raises(ValueError):
        AlignmentSpec(left_eye=(10.0, 52.0))


def test_align_and_crop_shapes():
    spec = AlignmentSpec()
    frame = np.zeros((240, 320, 3), np.uint8)
    face = align_face(frame, (130, 100), (190, 100), spec)
    assert face.shape == (128, 128, 3)
    for region in REGIONS:
        assert crop_region(face, region, spec).shape == (32, 32, 3)
