"""Crop warping and reintegration.

``warp_crop`` resamples the source image into template (crop) coordinates with
bilinear interpolation; samples outside the source are transparent black, so
the crop always carries alpha. ``reintegrate`` inverse-warps a processed crop
back into the original, blending by crop alpha attenuated with a linear
feather from the crop border.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from kolflow.core.artifacts import LandmarkSet, Raster
from kolflow.errors import SizeMismatch
from kolflow.face_align.transform import SimilarityTransform


@dataclass(frozen=True)
class AlignSession:
    """State required to undo a crop warp."""

    transform: SimilarityTransform  # original image coords -> crop coords
    source_landmarks: LandmarkSet
    crop_size: tuple[int, int]
    source_region: tuple[float, float, float, float]  # crop rect mapped back, (x0, y0, x1, y1)


def _bilinear_rgba(image: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Sample an RGBA float array at fractional positions, transparent outside."""
    h, w = image.shape[:2]
    x0 = np.floor(xs).astype(np.int64)
    y0 = np.floor(ys).astype(np.int64)
    fx = xs - x0
    fy = ys - y0

    out = np.zeros(xs.shape + (4,), dtype=np.float64)
    for dy in (0, 1):
        wy = np.where(dy == 0, 1.0 - fy, fy)
        yy = y0 + dy
        for dx in (0, 1):
            wx = np.where(dx == 0, 1.0 - fx, fx)
            xx = x0 + dx
            weight = wx * wy
            inside = (xx >= 0) & (xx < w) & (yy >= 0) & (yy < h)
            xc = np.clip(xx, 0, w - 1)
            yc = np.clip(yy, 0, h - 1)
            tap = image[yc, xc]  # gather
            out += (weight * inside)[..., None] * tap
    return out


def _to_rgba_float(raster: Raster) -> np.ndarray:
    arr = raster.to_array().astype(np.float64)
    if raster.channels == "RGB":
        alpha = np.full(arr.shape[:2] + (1,), 255.0)
        arr = np.concatenate([arr, alpha], axis=2)
    return arr


def _quantize(arr: np.ndarray) -> np.ndarray:
    # round half up: deterministic across platforms
    return np.floor(arr + 0.5).clip(0, 255).astype(np.uint8)


def warp_crop(
    image: Raster,
    transform: SimilarityTransform,
    crop_size: tuple[int, int],
    source_landmarks: LandmarkSet,
) -> tuple[Raster, AlignSession]:
    """Warp the source image into an RGBA crop of ``crop_size``.

    ``transform`` maps source coordinates into crop coordinates; each crop
    pixel samples the source at the inverse-transformed position.
    """
    cw, ch = crop_size
    inverse = transform.inverse()

    us, vs = np.meshgrid(np.arange(cw, dtype=np.float64),
                         np.arange(ch, dtype=np.float64))
    grid = np.stack([us.ravel(), vs.ravel()], axis=1)
    src_pos = inverse.apply(grid)
    xs = src_pos[:, 0].reshape(ch, cw)
    ys = src_pos[:, 1].reshape(ch, cw)

    sampled = _bilinear_rgba(_to_rgba_float(image), xs, ys)
    crop = Raster.from_array(_quantize(sampled))

    corners = np.array([[0, 0], [cw - 1, 0], [0, ch - 1], [cw - 1, ch - 1]],
                       dtype=np.float64)
    back = inverse.apply(corners)
    region = (float(back[:, 0].min()), float(back[:, 1].min()),
              float(back[:, 0].max()), float(back[:, 1].max()))
    session = AlignSession(transform=transform, source_landmarks=source_landmarks,
                           crop_size=(cw, ch), source_region=region)
    return crop, session


def reintegrate(
    processed_crop: Raster,
    session: AlignSession,
    original: Raster,
    feather: float = 8.0,
) -> Raster:
    """Warp a processed crop back into the original image.

    Per-pixel blend weight is the crop's sampled alpha scaled by a linear
    feather ramp of width ``feather`` pixels from the crop border; feather 0
    disables the ramp. Pixels outside the warped crop are left untouched.
    """
    cw, ch = session.crop_size
    if (processed_crop.width, processed_crop.height) != (cw, ch):
        raise SizeMismatch(
            f"crop is {processed_crop.width}x{processed_crop.height}, "
            f"session expects {cw}x{ch}"
        )

    xs, ys = np.meshgrid(np.arange(original.width, dtype=np.float64),
                         np.arange(original.height, dtype=np.float64))
    grid = np.stack([xs.ravel(), ys.ravel()], axis=1)
    crop_pos = session.transform.apply(grid)
    us = crop_pos[:, 0].reshape(original.height, original.width)
    vs = crop_pos[:, 1].reshape(original.height, original.width)

    sampled = _bilinear_rgba(_to_rgba_float(processed_crop), us, vs)
    alpha = sampled[..., 3] / 255.0

    if feather > 0:
        border = np.minimum(np.minimum(us, vs),
                            np.minimum((cw - 1) - us, (ch - 1) - vs))
        ramp = np.clip(border / feather, 0.0, 1.0)
        alpha = alpha * ramp

    orig = original.to_array().astype(np.float64)
    blended = orig.copy()
    blended[..., :3] = alpha[..., None] * sampled[..., :3] \
        + (1.0 - alpha[..., None]) * orig[..., :3]
    return Raster.from_array(_quantize(blended))
