"""Video-to-dataset preprocessing for the defakehop classifier.

Extracts aligned 32x32 facial-region patches (left eye, right eye, mouth)
from video frames and emits the PTEN + JSONL manifest dataset format.
"""
from .align import AlignmentSpec, align_face, similarity_from_eyes
from .extract import ExtractionResult, extract_video
from .landmarks import ColorMarkerBackend, eye_centers, mouth_center

__version__ = "0.1.0"
__all__ = [
    "AlignmentSpec",
    "ColorMarkerBackend",
    "ExtractionResult",
    "align_face",
    "extract_video",
    "eye_centers",
    "mouth_center",
    "similarity_from_eyes",
]
