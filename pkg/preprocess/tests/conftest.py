import cv2
import numpy as np
import pytest

# base marker positions on the 320x240 fixture face (x, y)
LEFT_EYE = np.array([130.0, 100.0])
RIGHT_EYE = np.array([190.0, 100.0])
MOUTH = np.array([160.0, 150.0])


def draw_face_frame(left, right, mouth, fake=False, rng=None, blank=False):
    """One 240x320 BGR fixture frame with color landmark markers."""
    frame = np.full((240, 320, 3), 110, np.uint8)
    if blank:
        return frame
    center = ((left + right + mouth) / 3).astype(int)
    cv2.ellipse(frame, tuple(center), (70, 90), 0, 0, 360, (150, 170, 200), -1)
    if fake:
        # high-frequency block texture around each region, the kind of
        # artifact the classifier is meant to pick up
        blocks = rng.integers(0, 2, size=(15, 15)) * 70
        tex = np.repeat(np.repeat(blocks, 4, axis=0), 4, axis=1)
        for cx, cy in (left, right, mouth):
            x0, y0 = int(cx) - 30, int(cy) - 30
            region = frame[y0:y0 + 60, x0:x0 + 60].astype(np.int16)
            region += tex[:60, :60, None]
            frame[y0:y0 + 60, x0:x0 + 60] = np.clip(region, 0, 255)
    cv2.circle(frame, tuple(left.astype(int)), 4, (0, 255, 0), -1)
    cv2.circle(frame, tuple(right.astype(int)), 4, (255, 0, 0), -1)
    cv2.circle(frame, tuple(mouth.astype(int)), 4, (0, 0, 255), -1)
    return frame


def make_clip(path, n_frames, fake=False, seed=0, blank_frames=(),
              jitter=True):
    """Write a fixture clip (raw AVI, lossless) and return the marker
    positions per frame."""
    rng = np.random.default_rng(seed)
    writer = cv2.VideoWriter(str(path), 0, 10.0, (320, 240))
    positions = []
    for f in range(n_frames):
        if jitter:
            shift = rng.uniform(-5, 5, size=2)
            angle = rng.uniform(-0.15, 0.15)
        else:
            shift = np.zeros(2)
            angle = 0.0
        rot = np.array([[np.cos(angle), -np.sin(angle)],
                        [np.sin(angle), np.cos(angle)]])
        center = (LEFT_EYE + RIGHT_EYE + MOUTH) / 3 + shift
        pts = [center + rot @ (p - (LEFT_EYE + RIGHT_EYE + MOUTH) / 3)
               for p in (LEFT_EYE, RIGHT_EYE, MOUTH)]
        frame = draw_face_frame(*pts, fake=fake, rng=rng,
                                blank=f in blank_frames)
        writer.write(frame)
        positions.append(pts)
    writer.release()
    return positions


@pytest.fixture
def clip(tmp_path):
    path = tmp_path / "clip.avi"
    make_clip(path, 5, seed=1)
    return path
