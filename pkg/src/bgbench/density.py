"""Perspective-weighted traffic density of a cleaned foreground mask."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidLambda

DEFAULT_LAMBDA = 4.0


@dataclass(frozen=True)
class PerspectiveWeights:
    """Row weights: ``lam`` on the top row falling linearly to 1 on the bottom.

    Distant vehicles sit higher in the image and cover fewer pixels, so
    upper rows count for more.
    """

    height: int
    lam: float
    weights: np.ndarray

    @property
    def total(self) -> float:
        return float(self.weights.sum())


def build_weights(height: int, lam: float = DEFAULT_LAMBDA) -> PerspectiveWeights:
    if height < 1:
        raise ValueError("height must be >= 1")
    if not lam >= 1:
        raise InvalidLambda(f"lambda must be >= 1, got {lam}")
    if height == 1:
        weights = np.ones(1)
    else:
        r = np.arange(height, dtype=np.float64)
        weights = 1.0 + (lam - 1.0) * (1.0 - r / (height - 1))
    weights.setflags(write=False)
    return PerspectiveWeights(height, float(lam), weights)


def weighted_density(mask: np.ndarray, w: PerspectiveWeights) -> float:
    mask = np.asarray(mask, dtype=bool)
    if mask.ndim != 2 or mask.shape[0] != w.height:
        raise DimensionMismatch(
            f"mask has {mask.shape[0] if mask.ndim else 0} rows, weights cover {w.height}"
        )
    per_row = mask.sum(axis=1)
    num = float(per_row @ w.weights)
    den = w.total * mask.shape[1]
    return min(1.0, num / den)


@dataclass(frozen=True)
class DensityRecord:
    frame_id: str
    algorithm: str
    density: float
    elapsed: float = 0.0  # microseconds

    def __post_init__(self):
        if not 0.0 <= self.density <= 1.0:
            raise ValueError(f"density must lie in [0, 1], got {self.density}")
        if self.elapsed < 0:
            raise ValueError("elapsed must be non-negative")
