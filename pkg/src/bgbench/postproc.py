"""Binary morphology and small-blob removal for foreground masks.

Neighbourhood positions outside the image count as False for both erosion
and dilation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict

import numpy as np


@dataclass(frozen=True)
class StructuringElement:
    """A square footprint of odd side length, centred on the pixel."""

    size: int = 3

    def __post_init__(self):
        if self.size < 1 or self.size % 2 == 0:
            raise ValueError(f"structuring element size must be odd and >= 1, got {self.size}")

    @property
    def radius(self) -> int:
        return self.size // 2


def _shifted_views(mask: np.ndarray, se: StructuringElement):
    r = se.radius
    h, w = mask.shape
    padded = np.pad(np.asarray(mask, dtype=bool), r, mode="constant", constant_values=False)
    for dy in range(se.size):
        for dx in range(se.size):
            yield padded[dy:dy + h, dx:dx + w]


def erode(mask: np.ndarray, se: StructuringElement = StructuringElement()) -> np.ndarray:
    out = np.ones(np.shape(mask), dtype=bool)
    for view in _shifted_views(mask, se):
        out &= view
    return out


def dilate(mask: np.ndarray, se: StructuringElement = StructuringElement()) -> np.ndarray:
    out = np.zeros(np.shape(mask), dtype=bool)
    for view in _shifted_views(mask, se):
        out |= view
    return out


def open(mask: np.ndarray, se: StructuringElement = StructuringElement()) -> np.ndarray:  # noqa: A001
    return dilate(erode(mask, se), se)


opening = open


@dataclass
class BlobLabeling:
    labels: np.ndarray
    blob_areas: Dict[int, int] = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.blob_areas)


def _find(parent, i):
    root = i
    while parent[root] != root:
        root = parent[root]
    while parent[i] != root:
        parent[i], i = root, parent[i]
    return root


def label_blobs(mask: np.ndarray) -> BlobLabeling:
    """8-connected components, labelled 1..L in row-major first-encounter order.

    Classic two-pass scheme: provisional labels with union-find on the
    first pass, then every provisional label is mapped to its root and the
    roots are renumbered in the order they are first met.
    """
    mask = np.asarray(mask, dtype=bool)
    h, w = mask.shape
    prov = np.zeros((h, w), dtype=np.int64)
    parent = [0]
    rows, cols = np.nonzero(mask)
    ys, xs = rows.tolist(), cols.tolist()

    for y, x in zip(ys, xs):
        neighbours = []
        if x > 0 and prov[y, x - 1]:
            neighbours.append(prov[y, x - 1])
        if y > 0:
            for nx in (x - 1, x, x + 1):
                if 0 <= nx < w and prov[y - 1, nx]:
                    neighbours.append(prov[y - 1, nx])
        if not neighbours:
            new = len(parent)
            parent.append(new)
            prov[y, x] = new
            continue
        roots = {_find(parent, int(n)) for n in neighbours}
        target = min(roots)
        for r in roots:
            parent[r] = target
        prov[y, x] = target

    final = {}
    labels = np.zeros((h, w), dtype=np.int64)
    areas: Dict[int, int] = {}
    for y, x in zip(ys, xs):
        root = _find(parent, int(prov[y, x]))
        lab = final.get(root)
        if lab is None:
            lab = final[root] = len(final) + 1
            areas[lab] = 0
        labels[y, x] = lab
        areas[lab] += 1
    return BlobLabeling(labels, areas)


def filter_small_blobs(labeling: BlobLabeling, min_area: int) -> np.ndarray:
    """Mask of the pixels whose blob has at least ``min_area`` pixels."""
    keep = [lab for lab, area in labeling.blob_areas.items() if area >= min_area]
    if not keep:
        return np.zeros(labeling.labels.shape, dtype=bool)
    return np.isin(labeling.labels, keep)
