"""Canonical landmark template.

A template pins 68 (x, y) points in crop coordinates for a given crop size.
Templates load from a JSON document with keys ``points`` and ``crop_size``;
a synthetic default covering the standard landmark groups ships built-in so
nothing depends on external data.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from kolflow.core.artifacts import LANDMARK_COUNT, LandmarkSet
from kolflow.errors import MalformedPayload


@dataclass(frozen=True)
class LandmarkTemplate:
    points: LandmarkSet
    crop_size: tuple[int, int]

    def __post_init__(self):
        cw, ch = self.crop_size
        for x, y in self.points.points:
            if not (0 <= x < cw and 0 <= y < ch):
                raise MalformedPayload(
                    f"template point ({x}, {y}) lies outside the {cw}x{ch} crop"
                )

    def to_array(self) -> np.ndarray:
        return self.points.to_array()

    def save(self, path: str | Path) -> None:
        doc = {
            "points": [[x, y] for x, y in self.points.points],
            "crop_size": list(self.crop_size),
        }
        Path(path).write_text(json.dumps(doc, indent=2))

    @classmethod
    def load(cls, path: str | Path) -> "LandmarkTemplate":
        try:
            doc = json.loads(Path(path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise MalformedPayload(f"cannot read template {path}: {exc}")
        try:
            points = LandmarkSet(points=tuple((float(x), float(y)) for x, y in doc["points"]))
            crop_size = (int(doc["crop_size"][0]), int(doc["crop_size"][1]))
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise MalformedPayload(f"malformed template document: {exc}")
        return cls(points=points, crop_size=crop_size)


def default_template(crop_size: tuple[int, int] = (256, 256)) -> LandmarkTemplate:
    """Synthetic 68-point layout: jaw arc, brows, nose, eyes, mouth."""
    cw, ch = crop_size
    sx, sy = cw / 256.0, ch / 256.0
    pts: list[tuple[float, float]] = []

    # 0-16 jaw: lower half ellipse, left ear to right ear
    for i in range(17):
        ang = math.pi * (1.0 - i / 16.0)  # pi .. 0
        pts.append((128 + 88 * math.cos(ang), 120 + 100 * math.sin(ang) * 0.9))
    # 17-21 left brow, 22-26 right brow
    for i in range(5):
        pts.append((58 + i * 14, 92 - 6 * math.sin(math.pi * i / 4)))
    for i in range(5):
        pts.append((142 + i * 14, 92 - 6 * math.sin(math.pi * i / 4)))
    # 27-30 nose bridge, 31-35 nostril line
    for i in range(4):
        pts.append((128, 104 + i * 12))
    for i in range(5):
        pts.append((112 + i * 8, 150))
    # 36-41 left eye, 42-47 right eye (hexagons)
    for cx in (88, 168):
        for i in range(6):
            ang = math.pi / 3 * i
            pts.append((cx + 14 * math.cos(ang), 112 + 7 * math.sin(ang)))
    # 48-59 outer lip ellipse, 60-67 inner lip ellipse
    for i in range(12):
        ang = 2 * math.pi * i / 12
        pts.append((128 + 30 * math.cos(ang), 188 + 14 * math.sin(ang)))
    for i in range(8):
        ang = 2 * math.pi * i / 8
        pts.append((128 + 18 * math.cos(ang), 188 + 7 * math.sin(ang)))

    assert len(pts) == LANDMARK_COUNT
    scaled = tuple((x * sx, y * sy) for x, y in pts)
    return LandmarkTemplate(points=LandmarkSet(points=scaled), crop_size=crop_size)
