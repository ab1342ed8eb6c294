"""Typed artifacts and their canonical encodings.

Artifacts are the immutable payloads flowing along pipeline edges. Each
artifact type has exactly one canonical byte encoding (PNG for rasters, UTF-8
for text specs, compact sorted-key JSON for landmark sets and align sessions).
Content hashes are computed over decoded content, so two PNG encodings of the
same pixels share one digest.
"""

from __future__ import annotations

import base64
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Optional

import numpy as np
from PIL import Image

from kolflow.errors import MalformedPayload

LANDMARK_COUNT = 68


class ArtifactType(str, Enum):
    PERSON_IMAGE = "PersonImage"
    GARMENT_REF = "GarmentRef"
    MAKEUP_REF = "MakeupRef"
    OBJECT_REF = "ObjectRef"
    BACKGROUND_SPEC = "BackgroundSpec"
    FACE_CROP = "FaceCrop"
    LANDMARK_SET = "LandmarkSet"
    ALIGN_SESSION = "AlignSession"

    @classmethod
    def parse(cls, tag: str) -> "ArtifactType":
        try:
            return cls(tag)
        except ValueError:
            raise MalformedPayload(f"unknown artifact type tag {tag!r}")


RASTER_TYPES = frozenset({
    ArtifactType.PERSON_IMAGE,
    ArtifactType.GARMENT_REF,
    ArtifactType.MAKEUP_REF,
    ArtifactType.OBJECT_REF,
    ArtifactType.FACE_CROP,
})

# On-disk / on-wire file extension per artifact type family.
EXTENSIONS = {
    **{t: "png" for t in RASTER_TYPES},
    ArtifactType.BACKGROUND_SPEC: "txt",
    ArtifactType.LANDMARK_SET: "landmarks.json",
    ArtifactType.ALIGN_SESSION: "align.json",
}


def _canonical_json_bytes(doc: Any) -> bytes:
    return json.dumps(
        doc, sort_keys=True, separators=(",", ":"), ensure_ascii=False, allow_nan=False
    ).encode("utf-8")


@dataclass(frozen=True)
class Raster:
    """Row-major 8-bit image, RGB or RGBA."""

    width: int
    height: int
    channels: str  # "RGB" | "RGBA"
    pixels: bytes

    def __post_init__(self):
        if self.channels not in ("RGB", "RGBA"):
            raise MalformedPayload(f"unsupported channel mode {self.channels!r}")
        if self.width < 1 or self.height < 1:
            raise MalformedPayload(
                f"raster dimensions must be >= 1, got {self.width}x{self.height}"
            )
        expected = self.width * self.height * self.channel_count
        if len(self.pixels) != expected:
            raise MalformedPayload(
                f"pixel buffer has {len(self.pixels)} bytes, expected {expected}"
            )

    @property
    def channel_count(self) -> int:
        return 3 if self.channels == "RGB" else 4

    def to_array(self) -> np.ndarray:
        arr = np.frombuffer(self.pixels, dtype=np.uint8)
        return arr.reshape(self.height, self.width, self.channel_count)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Raster":
        if arr.ndim != 3 or arr.shape[2] not in (3, 4):
            raise MalformedPayload(f"expected HxWx3 or HxWx4 array, got shape {arr.shape}")
        arr = np.ascontiguousarray(arr, dtype=np.uint8)
        channels = "RGB" if arr.shape[2] == 3 else "RGBA"
        return cls(width=arr.shape[1], height=arr.shape[0], channels=channels,
                   pixels=arr.tobytes())

    @classmethod
    def filled(cls, width: int, height: int, color: tuple[int, ...]) -> "Raster":
        channels = "RGB" if len(color) == 3 else "RGBA"
        arr = np.empty((height, width, len(color)), dtype=np.uint8)
        arr[:, :] = color
        return cls(width, height, channels, arr.tobytes())

    def hash_sequence(self) -> bytes:
        """Canonical byte sequence hashed for rasters.

        Three 8-byte big-endian integers (width, height, channel count)
        followed by the row-major pixel bytes.
        """
        return (
            self.width.to_bytes(8, "big")
            + self.height.to_bytes(8, "big")
            + self.channel_count.to_bytes(8, "big")
            + self.pixels
        )

    def encode_png(self) -> bytes:
        img = Image.frombytes(self.channels, (self.width, self.height), self.pixels)
        buf = io.BytesIO()
        img.save(buf, format="PNG", optimize=False, compress_level=6)
        return buf.getvalue()

    @classmethod
    def decode_png(cls, data: bytes) -> "Raster":
        try:
            img = Image.open(io.BytesIO(data))
            img.load()
        except Exception as exc:
            raise MalformedPayload(f"not a decodable PNG: {exc}")
        if img.format != "PNG":
            raise MalformedPayload(f"expected PNG payload, got {img.format}")
        if img.mode not in ("RGB", "RGBA"):
            img = img.convert("RGBA" if "A" in img.getbands() or img.mode == "P" else "RGB")
        return cls(width=img.width, height=img.height, channels=img.mode,
                   pixels=img.tobytes())


@dataclass(frozen=True)
class LandmarkSet:
    """Exactly 68 finite (x, y) points in image pixel units."""

    points: tuple[tuple[float, float], ...]

    def __post_init__(self):
        if len(self.points) != LANDMARK_COUNT:
            raise MalformedPayload(
                f"landmark set needs {LANDMARK_COUNT} points, got {len(self.points)}"
            )
        for x, y in self.points:
            if not (math.isfinite(x) and math.isfinite(y)):
                raise MalformedPayload("landmark coordinates must be finite")

    def to_array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=np.float64)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "LandmarkSet":
        arr = np.asarray(arr, dtype=np.float64)
        if arr.shape != (LANDMARK_COUNT, 2):
            raise MalformedPayload(f"expected ({LANDMARK_COUNT}, 2) array, got {arr.shape}")
        return cls(points=tuple((float(x), float(y)) for x, y in arr))

    def encode(self) -> bytes:
        # float repr round-trips exactly, keeping landmark hashes bit-stable
        return _canonical_json_bytes({"points": [[x, y] for x, y in self.points]})

    @classmethod
    def decode(cls, data: bytes) -> "LandmarkSet":
        doc = _decode_json(data)
        points = doc.get("points")
        if not isinstance(points, list):
            raise MalformedPayload("landmark document missing 'points' array")
        try:
            return cls(points=tuple((float(x), float(y)) for x, y in points))
        except (TypeError, ValueError):
            raise MalformedPayload("landmark points must be [x, y] number pairs")


def _decode_json(data: bytes) -> dict:
    try:
        doc = json.loads(data.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise MalformedPayload(f"payload is not valid UTF-8 JSON: {exc}")
    if not isinstance(doc, dict):
        raise MalformedPayload("payload must be a JSON object")
    return doc


def _raster_doc(raster: Raster) -> dict:
    return {
        "width": raster.width,
        "height": raster.height,
        "channels": raster.channels,
        "pixels_b64": base64.b64encode(raster.pixels).decode("ascii"),
    }


def _raster_from_doc(doc: dict) -> Raster:
    try:
        return Raster(
            width=int(doc["width"]),
            height=int(doc["height"]),
            channels=str(doc["channels"]),
            pixels=base64.b64decode(doc["pixels_b64"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedPayload(f"malformed embedded raster: {exc}")


@dataclass(frozen=True)
class AlignSessionPayload:
    """Persistable alignment state: transform parameters plus the original image.

    Embedding the original (as raw pixels, not PNG, for bit-stable hashing)
    makes reintegration self-contained downstream of any number of
    crop-refining services.
    """

    scale: float
    rotation: float
    tx: float
    ty: float
    crop_size: tuple[int, int]
    source_region: tuple[float, float, float, float]
    source_landmarks: LandmarkSet
    original: Raster

    def encode(self) -> bytes:
        return _canonical_json_bytes({
            "transform": {
                "scale": self.scale,
                "rotation": self.rotation,
                "tx": self.tx,
                "ty": self.ty,
            },
            "crop_size": list(self.crop_size),
            "source_region": list(self.source_region),
            "source_landmarks": [[x, y] for x, y in self.source_landmarks.points],
            "original": _raster_doc(self.original),
        })

    @classmethod
    def decode(cls, data: bytes) -> "AlignSessionPayload":
        doc = _decode_json(data)
        try:
            t = doc["transform"]
            return cls(
                scale=float(t["scale"]),
                rotation=float(t["rotation"]),
                tx=float(t["tx"]),
                ty=float(t["ty"]),
                crop_size=(int(doc["crop_size"][0]), int(doc["crop_size"][1])),
                source_region=tuple(float(v) for v in doc["source_region"]),
                source_landmarks=LandmarkSet(
                    points=tuple((float(x), float(y)) for x, y in doc["source_landmarks"])
                ),
                original=_raster_from_doc(doc["original"]),
            )
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise MalformedPayload(f"malformed align session: {exc}")


def content_hash(payload: bytes, artifact_type: ArtifactType) -> bytes:
    """SHA-256 digest of canonical content.

    Rasters hash their decoded pixel sequence (dimensions + raw pixels), so
    encoder-level PNG differences never change the digest. All other types
    hash the canonical payload bytes directly.
    """
    if artifact_type in RASTER_TYPES:
        raster = Raster.decode_png(payload)
        return hashlib.sha256(raster.hash_sequence()).digest()
    decode_payload(payload, artifact_type)  # raises MalformedPayload on bad input
    return hashlib.sha256(payload).digest()


def decode_payload(payload: bytes, artifact_type: ArtifactType):
    """Decode canonical payload bytes into the type's value object."""
    if artifact_type in RASTER_TYPES:
        return Raster.decode_png(payload)
    if artifact_type is ArtifactType.BACKGROUND_SPEC:
        try:
            return payload.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedPayload(f"background spec is not UTF-8: {exc}")
    if artifact_type is ArtifactType.LANDMARK_SET:
        return LandmarkSet.decode(payload)
    if artifact_type is ArtifactType.ALIGN_SESSION:
        return AlignSessionPayload.decode(payload)
    raise MalformedPayload(f"no decoder for {artifact_type}")


def encode_payload(value, artifact_type: ArtifactType) -> bytes:
    """Encode a value object into canonical payload bytes."""
    if artifact_type in RASTER_TYPES:
        if not isinstance(value, Raster):
            raise MalformedPayload(f"{artifact_type.value} payload must be a Raster")
        return value.encode_png()
    if artifact_type is ArtifactType.BACKGROUND_SPEC:
        if not isinstance(value, str):
            raise MalformedPayload("BackgroundSpec payload must be text")
        return value.encode("utf-8")
    if artifact_type is ArtifactType.LANDMARK_SET:
        if not isinstance(value, LandmarkSet):
            raise MalformedPayload("LandmarkSet payload must be a LandmarkSet")
        return value.encode()
    if artifact_type is ArtifactType.ALIGN_SESSION:
        if not isinstance(value, AlignSessionPayload):
            raise MalformedPayload("AlignSession payload must be an AlignSessionPayload")
        return value.encode()
    raise MalformedPayload(f"no encoder for {artifact_type}")


@dataclass(frozen=True)
class Artifact:
    """Immutable typed payload with a content digest."""

    artifact_type: ArtifactType
    payload: bytes
    content_hash: bytes = field(default=b"")
    producer: Optional[str] = None

    def __post_init__(self):
        expected = content_hash(self.payload, self.artifact_type)
        if self.content_hash == b"":
            object.__setattr__(self, "content_hash", expected)
        elif self.content_hash != expected:
            raise MalformedPayload(
                "declared content hash does not match payload",
            )

    @property
    def hash_hex(self) -> str:
        return self.content_hash.hex()

    @property
    def extension(self) -> str:
        return EXTENSIONS[self.artifact_type]

    def value(self):
        return decode_payload(self.payload, self.artifact_type)

    def with_producer(self, node_id: str) -> "Artifact":
        return Artifact(self.artifact_type, self.payload, self.content_hash, node_id)

    @classmethod
    def from_value(cls, value, artifact_type: ArtifactType,
                   producer: Optional[str] = None) -> "Artifact":
        return cls(artifact_type, encode_payload(value, artifact_type), producer=producer)
