"""Capability tags, per-capability port signatures, and default ordering rules."""

from __future__ import annotations

from dataclasses import dataclass

from kolflow.core.artifacts import ArtifactType

TRYON = "tryon"
MAKEUP = "makeup"
BACKGROUND = "background"
OBJECT_INTERACTION = "object_interaction"
FACE_EXTRACT_ALIGN = "face_extract_align"
FACE_REINTEGRATE = "face_reintegrate"

CAPABILITIES = frozenset({
    TRYON,
    MAKEUP,
    BACKGROUND,
    OBJECT_INTERACTION,
    FACE_EXTRACT_ALIGN,
    FACE_REINTEGRATE,
})


@dataclass(frozen=True)
class PortSpec:
    name: str
    artifact_type: ArtifactType
    required: bool = True


# Shared port signatures: every service of a capability exposes these ports.
# The aligned face crop travels as PersonImage so downstream generative
# services can refine it through ordinary type-equal edges; reintegration
# pulls the original image out of the align session artifact.
CAPABILITY_INPUTS: dict[str, tuple[PortSpec, ...]] = {
    TRYON: (
        PortSpec("person", ArtifactType.PERSON_IMAGE),
        PortSpec("garment", ArtifactType.GARMENT_REF),
    ),
    MAKEUP: (
        PortSpec("person", ArtifactType.PERSON_IMAGE),
        PortSpec("makeup_ref", ArtifactType.MAKEUP_REF),
    ),
    BACKGROUND: (
        PortSpec("person", ArtifactType.PERSON_IMAGE),
        PortSpec("spec", ArtifactType.BACKGROUND_SPEC),
    ),
    OBJECT_INTERACTION: (
        PortSpec("person", ArtifactType.PERSON_IMAGE),
        PortSpec("object_ref", ArtifactType.OBJECT_REF),
    ),
    FACE_EXTRACT_ALIGN: (
        PortSpec("person", ArtifactType.PERSON_IMAGE),
        PortSpec("landmarks", ArtifactType.LANDMARK_SET),
    ),
    FACE_REINTEGRATE: (
        PortSpec("face", ArtifactType.PERSON_IMAGE),
        PortSpec("session", ArtifactType.ALIGN_SESSION),
    ),
}

CAPABILITY_OUTPUTS: dict[str, tuple[PortSpec, ...]] = {
    TRYON: (PortSpec("out", ArtifactType.PERSON_IMAGE),),
    MAKEUP: (PortSpec("out", ArtifactType.PERSON_IMAGE),),
    BACKGROUND: (PortSpec("out", ArtifactType.PERSON_IMAGE),),
    OBJECT_INTERACTION: (PortSpec("out", ArtifactType.PERSON_IMAGE),),
    FACE_EXTRACT_ALIGN: (
        PortSpec("out", ArtifactType.PERSON_IMAGE),
        PortSpec("session", ArtifactType.ALIGN_SESSION),
    ),
    FACE_REINTEGRATE: (PortSpec("out", ArtifactType.PERSON_IMAGE),),
}

# Ordering generators; the registry expands these to their transitive closure
# so any co-occurring pair is ordered.
DEFAULT_BEFORE_RULES: tuple[tuple[str, str], ...] = (
    (TRYON, MAKEUP),
    (MAKEUP, BACKGROUND),
    (BACKGROUND, OBJECT_INTERACTION),
    (FACE_EXTRACT_ALIGN, MAKEUP),
    (MAKEUP, FACE_REINTEGRATE),
    (FACE_REINTEGRATE, BACKGROUND),
)

# Conventional role names for externally provided pipeline inputs.
ROLE_TYPES: dict[str, ArtifactType] = {
    "identity": ArtifactType.PERSON_IMAGE,
    "garment": ArtifactType.GARMENT_REF,
    "makeup_ref": ArtifactType.MAKEUP_REF,
    "background_spec": ArtifactType.BACKGROUND_SPEC,
    "object_ref": ArtifactType.OBJECT_REF,
    "landmarks": ArtifactType.LANDMARK_SET,
}
