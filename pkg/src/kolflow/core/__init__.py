from kolflow.core.artifacts import (
    EXTENSIONS,
    LANDMARK_COUNT,
    RASTER_TYPES,
    AlignSessionPayload,
    Artifact,
    ArtifactType,
    LandmarkSet,
    Raster,
    content_hash,
    decode_payload,
    encode_payload,
)
from kolflow.core.store import ArtifactRef, ArtifactStore

__all__ = [
    "EXTENSIONS",
    "LANDMARK_COUNT",
    "RASTER_TYPES",
    "AlignSessionPayload",
    "Artifact",
    "ArtifactRef",
    "ArtifactStore",
    "ArtifactType",
    "LandmarkSet",
    "Raster",
    "content_hash",
    "decode_payload",
    "encode_payload",
]
