"""Least-squares similarity transform between landmark sets.

The estimator solves argmin over (s, R, t) of sum ||s*R(theta)*x_i + t - y_i||^2
in closed form via the centered cross-covariance. The rotation is obtained from
atan2 of the cross/dot accumulators, which restricts the solution to proper
rotations (no reflection) by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from kolflow.errors import DegenerateLandmarks, NonFiniteInput, NonInvertibleTransform


@dataclass(frozen=True)
class SimilarityTransform:
    """scale * rotation + translation, mapping source to target coordinates."""

    scale: float
    rotation: float  # radians in (-pi, pi]
    tx: float
    ty: float

    def __post_init__(self):
        if not all(map(math.isfinite, (self.scale, self.rotation, self.tx, self.ty))):
            raise NonFiniteInput("transform parameters must be finite")
        if self.scale <= 0:
            raise NonInvertibleTransform(f"scale must be positive, got {self.scale}")

    def matrix(self) -> np.ndarray:
        c = self.scale * math.cos(self.rotation)
        s = self.scale * math.sin(self.rotation)
        return np.array([[c, -s, self.tx], [s, c, self.ty]], dtype=np.float64)

    def apply(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=np.float64)
        m = self.matrix()
        return pts @ m[:, :2].T + m[:, 2]

    def inverse(self) -> "SimilarityTransform":
        inv_scale = 1.0 / self.scale
        inv_rot = -self.rotation
        c = inv_scale * math.cos(inv_rot)
        s = inv_scale * math.sin(inv_rot)
        return SimilarityTransform(
            scale=inv_scale,
            rotation=_wrap_angle(inv_rot),
            tx=-(c * self.tx - s * self.ty),
            ty=-(s * self.tx + c * self.ty),
        )

    def compose(self, inner: "SimilarityTransform") -> "SimilarityTransform":
        """Transform equal to applying ``inner`` first, then ``self``."""
        c = self.scale * math.cos(self.rotation)
        s = self.scale * math.sin(self.rotation)
        return SimilarityTransform(
            scale=self.scale * inner.scale,
            rotation=_wrap_angle(self.rotation + inner.rotation),
            tx=c * inner.tx - s * inner.ty + self.tx,
            ty=s * inner.tx + c * inner.ty + self.ty,
        )


def _wrap_angle(theta: float) -> float:
    """Wrap into (-pi, pi]."""
    wrapped = math.fmod(theta + math.pi, 2 * math.pi)
    if wrapped <= 0:
        wrapped += 2 * math.pi
    return wrapped - math.pi


def estimate_similarity(
    source: np.ndarray, target: np.ndarray
) -> tuple[SimilarityTransform, float]:
    """Fit the least-squares similarity mapping source points onto target.

    Returns the transform and the residual sum of squared distances.
    """
    src = np.asarray(source, dtype=np.float64)
    dst = np.asarray(target, dtype=np.float64)
    if src.shape != dst.shape or src.ndim != 2 or src.shape[1] != 2:
        raise NonFiniteInput(f"point sets must share shape (n, 2), got {src.shape} vs {dst.shape}")
    if not (np.isfinite(src).all() and np.isfinite(dst).all()):
        raise NonFiniteInput("landmark coordinates must be finite")

    src_mean = src.mean(axis=0)
    dst_mean = dst.mean(axis=0)
    x = src - src_mean
    y = dst - dst_mean

    var_src = float((x * x).sum())
    if var_src == 0.0:
        raise DegenerateLandmarks("source landmarks are all coincident")

    # dot and cross accumulators of the centered correspondence
    a = float((x * y).sum())
    b = float((x[:, 0] * y[:, 1] - x[:, 1] * y[:, 0]).sum())
    magnitude = math.hypot(a, b)
    if magnitude == 0.0:
        raise DegenerateLandmarks("correspondence admits no unique rotation")

    theta = math.atan2(b, a)
    scale = magnitude / var_src
    c = scale * math.cos(theta)
    s = scale * math.sin(theta)
    t = dst_mean - np.array([c * src_mean[0] - s * src_mean[1],
                             s * src_mean[0] + c * src_mean[1]])

    transform = SimilarityTransform(scale=scale, rotation=theta,
                                    tx=float(t[0]), ty=float(t[1]))
    diff = transform.apply(src) - dst
    residual = float((diff * diff).sum())
    return transform, residual
