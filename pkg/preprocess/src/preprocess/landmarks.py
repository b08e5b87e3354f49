"""Landmark backends.

A backend is anything with ``name``, ``version``, and
``detect(frame_bgr) -> (68, 2) float array or None``, following the
standard 68-point layout (36-41 left eye, 42-47 right eye, 48-67 mouth).
The manifest header records name and version so datasets stay traceable
to the detector that produced them.

The in-repo ColorMarkerBackend detects saturated color markers (green
left eye, blue right eye, red mouth) and synthesizes a 68-point set
around them.  It exists so the extraction pipeline can be exercised end
to end on generated fixture clips without shipping a face model; real
footage needs an external 68-point detector plugged in.
"""
import numpy as np

LEFT_EYE_IDX = slice(36, 42)
RIGHT_EYE_IDX = slice(42, 48)
MOUTH_IDX = slice(48, 68)


def eye_centers(landmarks):
    """(left, right) eye centers from a 68-point set."""
    pts = np.asarray(landmarks, dtype=np.float64)
    return pts[LEFT_EYE_IDX].mean(axis=0), pts[RIGHT_EYE_IDX].mean(axis=0)


def mouth_center(landmarks):
    return np.asarray(landmarks, dtype=np.float64)[MOUTH_IDX].mean(axis=0)


def _ring(center, radius, count):
    angles = 2 * np.pi * np.arange(count) / count
    return center + radius * np.stack([np.cos(angles), np.sin(angles)], axis=1)


class ColorMarkerBackend:
    name = "color-marker"
    version = "1"

    # marker color -> BGR channel that must dominate
    _CHANNELS = {"left_eye": 1, "right_eye": 0, "mouth": 2}

    def _centroid(self, frame, channel):
        strong = frame[:, :, channel].astype(np.int16)
        others = frame.astype(np.int16).sum(axis=2) - strong
        mask = (strong > 180) & (others < strong)
        if mask.sum() < 4:
            return None
        ys, xs = np.nonzero(mask)
        return np.array([xs.mean(), ys.mean()])

    def detect(self, frame_bgr):
        centers = {}
        for region, channel in self._CHANNELS.items():
            c = self._centroid(frame_bgr, channel)
            if c is None:
                return None
            centers[region] = c
        # synthesize a 68-point set whose region means hit the centers
        # (each ring of offsets sums to zero)
        pts = np.zeros((68, 2))
        face_center = (centers["left_eye"] + centers["right_eye"]
                       + centers["mouth"]) / 3.0
        pts[:36] = _ring(face_center, 30.0, 36)
        pts[LEFT_EYE_IDX] = _ring(centers["left_eye"], 3.0, 6)
        pts[RIGHT_EYE_IDX] = _ring(centers["right_eye"], 3.0, 6)
        pts[MOUTH_IDX] = _ring(centers["mouth"], 5.0, 20)
        return pts
