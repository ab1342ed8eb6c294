from kolflow.face_align.template import LandmarkTemplate, default_template
from kolflow.face_align.transform import SimilarityTransform, estimate_similarity
from kolflow.face_align.warp import AlignSession, reintegrate, warp_crop

__all__ = [
    "AlignSession",
    "LandmarkTemplate",
    "SimilarityTransform",
    "default_template",
    "estimate_similarity",
    "reintegrate",
    "warp_crop",
]
