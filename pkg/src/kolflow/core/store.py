"""Content-addressed artifact store.

Layout: ``<root>/<first-2-hex>/<full-hash-hex>.<ext>``. Writes go to a temp
file followed by an atomic rename, so concurrent writers of identical content
are safe and a crashed write never publishes a partial artifact.
"""

from __future__ import annotations

import os
import re
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from kolflow.core.artifacts import (
    EXTENSIONS,
    Artifact,
    ArtifactType,
    content_hash,
)
from kolflow.errors import (
    HashCollisionMismatch,
    HashMismatch,
    IoFailure,
    MalformedPayload,
    NotFound,
    TypeMismatch,
)

_REF_RE = re.compile(r"^([0-9a-f]{2})/([0-9a-f]{64})\.(png|txt|landmarks\.json|align\.json)$")


@dataclass(frozen=True)
class ArtifactRef:
    """Store-relative reference: hash plus extension."""

    hash_hex: str
    extension: str

    def __post_init__(self):
        if not _REF_RE.match(self.relpath):
            raise ValueError(f"malformed artifact ref {self.relpath!r}")

    @property
    def relpath(self) -> str:
        return f"{self.hash_hex[:2]}/{self.hash_hex}.{self.extension}"

    def __str__(self) -> str:
        return self.relpath

    @classmethod
    def parse(cls, text: str) -> "ArtifactRef":
        m = _REF_RE.match(text)
        if m is None:
            raise ValueError(f"malformed artifact ref {text!r}")
        return cls(hash_hex=m.group(2), extension=m.group(3))

    @staticmethod
    def looks_like_ref(text: str) -> bool:
        return _REF_RE.match(text) is not None


class ArtifactStore:
    """Filesystem-backed store addressed by content hash."""

    def __init__(self, root: str | Path):
        self.root = Path(root)

    def path_for(self, ref: ArtifactRef) -> Path:
        return self.root / ref.relpath

    def ref_for(self, artifact: Artifact) -> ArtifactRef:
        return ArtifactRef(hash_hex=artifact.hash_hex, extension=artifact.extension)

    def store(self, artifact: Artifact) -> ArtifactRef:
        """Persist an artifact; idempotent for identical decoded content."""
        ref = self.ref_for(artifact)
        target = self.path_for(ref)
        if target.exists():
            existing = target.read_bytes()
            if existing != artifact.payload:
                # same digest, different bytes: fine iff decoded content agrees
                # (PNG encoders are not byte-stable)
                if content_hash(existing, artifact.artifact_type) != artifact.content_hash:
                    raise HashCollisionMismatch(
                        f"store entry {ref} holds different content", ref=str(ref)
                    )
            return ref
        try:
            target.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp = tempfile.mkstemp(dir=target.parent, prefix=".tmp-")
            try:
                with os.fdopen(fd, "wb") as fh:
                    fh.write(artifact.payload)
                os.replace(tmp, target)
            except BaseException:
                if os.path.exists(tmp):
                    os.unlink(tmp)
                raise
        except OSError as exc:
            raise IoFailure(f"cannot write artifact {ref}: {exc}", ref=str(ref))
        return ref

    def load(self, ref: ArtifactRef | str, expected_type: ArtifactType) -> Artifact:
        """Load and verify an artifact; recomputes and checks the digest."""
        if isinstance(ref, str):
            try:
                ref = ArtifactRef.parse(ref)
            except ValueError as exc:
                raise NotFound(str(exc))
        if ref.extension != EXTENSIONS[expected_type]:
            raise TypeMismatch(
                f"ref {ref} does not hold a {expected_type.value} payload",
                ref=str(ref), expected=expected_type.value,
            )
        path = self.path_for(ref)
        if not path.exists():
            raise NotFound(f"no artifact at {ref}", ref=str(ref))
        try:
            payload = path.read_bytes()
        except OSError as exc:
            raise IoFailure(f"cannot read artifact {ref}: {exc}", ref=str(ref))
        try:
            digest = content_hash(payload, expected_type)
        except MalformedPayload:
            # stored bytes were canonical at write time; a failed decode now
            # means the file changed underneath us
            raise HashMismatch(
                f"artifact {ref} no longer decodes canonically", ref=str(ref)
            )
        if digest.hex() != ref.hash_hex:
            raise HashMismatch(
                f"artifact {ref} content does not match its digest", ref=str(ref)
            )
        return Artifact(expected_type, payload, digest)

    def exists(self, ref: ArtifactRef) -> bool:
        return self.path_for(ref).exists()

    def store_value(self, value, artifact_type: ArtifactType,
                    producer: Optional[str] = None) -> tuple[ArtifactRef, Artifact]:
        artifact = Artifact.from_value(value, artifact_type, producer=producer)
        return self.store(artifact), artifact
