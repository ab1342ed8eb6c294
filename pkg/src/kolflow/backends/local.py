"""Built-in local algorithms.

The four generative mocks are deterministic integer pixel transforms (all
divisions floor), so outputs are bit-reproducible across platforms and across
the local/remote boundary. The two alignment algorithms wrap the face_align
module. Additional algorithms can be registered at runtime (tests use this
for fault injection).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from kolflow import capabilities as caps
from kolflow.core.artifacts import (
    AlignSessionPayload,
    Artifact,
    ArtifactType,
    LandmarkSet,
    Raster,
    encode_payload,
)
from kolflow.errors import BadParams, MalformedInput, UnknownAlgorithm
from kolflow.face_align import (
    AlignSession,
    SimilarityTransform,
    default_template,
    estimate_similarity,
    reintegrate,
    warp_crop,
)

AlgorithmFn = Callable[[dict[str, object], dict[str, object]], dict[str, object]]


@dataclass(frozen=True)
class AlgorithmDescriptor:
    algorithm_id: str
    capability: str
    deterministic: bool = True
    parameters: Mapping[str, dict] = field(default_factory=dict)


_catalog: dict[str, tuple[AlgorithmDescriptor, AlgorithmFn]] = {}


def register_algorithm(descriptor: AlgorithmDescriptor, fn: AlgorithmFn) -> None:
    _catalog[descriptor.algorithm_id] = (descriptor, fn)


def unregister_algorithm(algorithm_id: str) -> None:
    _catalog.pop(algorithm_id, None)


def known_algorithms() -> frozenset[str]:
    return frozenset(_catalog)


def get_algorithm(algorithm_id: str) -> tuple[AlgorithmDescriptor, AlgorithmFn]:
    try:
        return _catalog[algorithm_id]
    except KeyError:
        raise UnknownAlgorithm(f"no built-in algorithm {algorithm_id!r}")


def fnv1a32(data: bytes) -> int:
    """32-bit FNV-1a."""
    h = 0x811C9DC5
    for byte in data:
        h ^= byte
        h = (h * 0x01000193) & 0xFFFFFFFF
    return h


def prompt_color(spec: str) -> tuple[int, int, int]:
    """Low 24 bits of FNV-1a over the UTF-8 spec, split big-endian into RGB."""
    low = fnv1a32(spec.encode("utf-8")) & 0xFFFFFF
    return ((low >> 16) & 0xFF, (low >> 8) & 0xFF, low & 0xFF)


def _nearest_scale(src: np.ndarray, width: int, height: int) -> np.ndarray:
    """Nearest-neighbor resample with floor index mapping."""
    sh, sw = src.shape[:2]
    ys = (np.arange(height) * sh) // height
    xs = (np.arange(width) * sw) // width
    return src[ys][:, xs]


def _split_alpha(raster: Raster) -> tuple[np.ndarray, np.ndarray | None]:
    arr = raster.to_array()
    if raster.channels == "RGBA":
        return arr[..., :3], arr[..., 3]
    return arr, None


def mock_tryon(person: Raster, garment: Raster) -> Raster:
    """Keep the top half, blend garment into the lower half: floor((p + g) / 2)."""
    if person.height < 2:
        raise MalformedInput("tryon needs a person image at least 2 pixels tall")
    rgb, alpha = _split_alpha(person)
    g_rgb, _ = _split_alpha(garment)

    split = person.height // 2
    lower_h = person.height - split
    g_scaled = _nearest_scale(g_rgb, person.width, lower_h)

    out = rgb.astype(np.uint16).copy()
    out[split:] = (out[split:] + g_scaled.astype(np.uint16)) // 2
    out = out.astype(np.uint8)
    if alpha is not None:
        out = np.dstack([out, alpha])
    return Raster.from_array(out)


def mock_makeup(person: Raster, makeup_ref: Raster) -> Raster:
    """80/20 tint toward the reference's per-channel floor mean."""
    rgb, alpha = _split_alpha(person)
    m_rgb, _ = _split_alpha(makeup_ref)
    mean = m_rgb.reshape(-1, 3).astype(np.uint64).sum(axis=0) // (m_rgb.shape[0] * m_rgb.shape[1])

    out = ((4 * rgb.astype(np.uint32) + mean.astype(np.uint32)) // 5).astype(np.uint8)
    if alpha is not None:
        out = np.dstack([out, alpha])
    return Raster.from_array(out)


def mock_background(person: Raster, spec: str) -> Raster:
    """Fill transparent pixels (RGBA) or a border frame (RGB) with the prompt color."""
    color = prompt_color(spec)
    arr = person.to_array().copy()
    if person.channels == "RGBA":
        mask = arr[..., 3] == 0
        arr[mask, 0], arr[mask, 1], arr[mask, 2] = color
        arr[mask, 3] = 255
        return Raster.from_array(arr)
    frame = max(1, min(person.height, person.width) // 8)
    arr[:frame] = color
    arr[-frame:] = color
    arr[:, :frame] = color
    arr[:, -frame:] = color
    return Raster.from_array(arr)


def mock_object(person: Raster, object_ref: Raster) -> Raster:
    """Composite the object, scaled to a quarter size, at the bottom-right corner."""
    if person.width < 4 or person.height < 4:
        raise MalformedInput("object interaction needs a person image at least 4x4")
    ow, oh = person.width // 4, person.height // 4
    x0, y0 = person.width - ow, person.height - oh

    obj = object_ref.to_array()
    if object_ref.channels == "RGB":
        obj = np.dstack([obj, np.full(obj.shape[:2], 255, dtype=np.uint8)])
    obj = _nearest_scale(obj, ow, oh)

    arr = person.to_array().copy()
    region = arr[y0:y0 + oh, x0:x0 + ow]
    a = obj[..., 3].astype(np.uint32)[..., None]
    rgb = (obj[..., :3].astype(np.uint32) * a
           + region[..., :3].astype(np.uint32) * (255 - a)) // 255
    region[..., :3] = rgb.astype(np.uint8)
    if person.channels == "RGBA":
        pa = region[..., 3].astype(np.uint32)
        region[..., 3] = (a[..., 0] + pa * (255 - a[..., 0]) // 255).astype(np.uint8)
    arr[y0:y0 + oh, x0:x0 + ow] = region
    return Raster.from_array(arr)


ALIGN_CROP_SIZE = (256, 256)


def _algo_tryon(inputs, params):
    return {"out": mock_tryon(inputs["person"], inputs["garment"])}


def _algo_makeup(inputs, params):
    return {"out": mock_makeup(inputs["person"], inputs["makeup_ref"])}


def _algo_background(inputs, params):
    return {"out": mock_background(inputs["person"], inputs["spec"])}


def _algo_object(inputs, params):
    return {"out": mock_object(inputs["person"], inputs["object_ref"])}


def _algo_extract_align(inputs, params):
    person: Raster = inputs["person"]
    landmarks: LandmarkSet = inputs["landmarks"]
    template = default_template(ALIGN_CROP_SIZE)
    transform, _residual = estimate_similarity(landmarks.to_array(), template.to_array())
    crop, session = warp_crop(person, transform, template.crop_size, landmarks)
    payload = AlignSessionPayload(
        scale=transform.scale,
        rotation=transform.rotation,
        tx=transform.tx,
        ty=transform.ty,
        crop_size=session.crop_size,
        source_region=session.source_region,
        source_landmarks=landmarks,
        original=person,
    )
    return {"out": crop, "session": payload}


def _algo_reintegrate(inputs, params):
    face: Raster = inputs["face"]
    payload: AlignSessionPayload = inputs["session"]
    session = AlignSession(
        transform=SimilarityTransform(payload.scale, payload.rotation,
                                      payload.tx, payload.ty),
        source_landmarks=payload.source_landmarks,
        crop_size=payload.crop_size,
        source_region=payload.source_region,
    )
    feather = float(params.get("feather", 8.0))
    return {"out": reintegrate(face, session, payload.original, feather=feather)}


register_algorithm(AlgorithmDescriptor("mock_tryon", caps.TRYON), _algo_tryon)
register_algorithm(AlgorithmDescriptor("mock_makeup", caps.MAKEUP), _algo_makeup)
register_algorithm(AlgorithmDescriptor("mock_background", caps.BACKGROUND), _algo_background)
register_algorithm(AlgorithmDescriptor("mock_object", caps.OBJECT_INTERACTION), _algo_object)
register_algorithm(
    AlgorithmDescriptor("face_extract_align", caps.FACE_EXTRACT_ALIGN), _algo_extract_align
)
register_algorithm(
    AlgorithmDescriptor(
        "face_reintegrate", caps.FACE_REINTEGRATE,
        parameters={"feather": {"type": "number", "default": 8.0}},
    ),
    _algo_reintegrate,
)


def invoke_local(
    algorithm_id: str,
    inputs: Mapping[str, Artifact],
    params: Mapping[str, object] | None = None,
) -> dict[str, Artifact]:
    """Invoke a built-in algorithm on typed artifacts.

    Inputs are checked against the capability's port signature; outputs are
    encoded per signature. An algorithm may return ready-made Artifacts, which
    pass through untouched (descriptor-level output checking happens at node
    invocation).
    """
    descriptor, fn = get_algorithm(algorithm_id)
    params = dict(params or {})
    for name in params:
        if name not in descriptor.parameters:
            raise BadParams(f"algorithm {algorithm_id} takes no parameter {name!r}")

    signature = caps.CAPABILITY_INPUTS[descriptor.capability]
    by_name = {p.name: p for p in signature}
    for port_name, artifact in inputs.items():
        port = by_name.get(port_name)
        if port is None:
            raise MalformedInput(
                f"{descriptor.capability} has no input port {port_name!r}"
            )
        if artifact.artifact_type is not port.artifact_type:
            raise MalformedInput(
                f"port {port_name!r} expects {port.artifact_type.value}, "
                f"got {artifact.artifact_type.value}"
            )
    for port in signature:
        if port.required and port.name not in inputs:
            raise MalformedInput(f"missing required input {port.name!r}")

    values = {name: art.value() for name, art in inputs.items()}
    results = fn(values, params)

    out_types = {p.name: p.artifact_type for p in caps.CAPABILITY_OUTPUTS[descriptor.capability]}
    artifacts: dict[str, Artifact] = {}
    for port_name, value in results.items():
        if isinstance(value, Artifact):
            artifacts[port_name] = value
            continue
        artifact_type = out_types.get(port_name)
        if artifact_type is None:
            raise MalformedInput(
                f"{descriptor.capability} declares no output port {port_name!r}"
            )
        artifacts[port_name] = Artifact(artifact_type, encode_payload(value, artifact_type))
    return artifacts
