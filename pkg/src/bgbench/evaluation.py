"""Accuracy of densities against hand-counted cars."""
from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, Iterable, Tuple

import numpy as np

from .density import DensityRecord
from .errors import (
    DegenerateSeries,
    DuplicateId,
    InsufficientOverlap,
    LengthMismatch,
    MalformedRow,
    NegativeCount,
)


class GroundTruth(dict):
    """Mapping of frame id to counted cars."""


def parse_ground_truth(text: str, source: str = "<string>") -> GroundTruth:
    lines = text.splitlines()
    if not lines or lines[0].strip() != "image,count":
        raise MalformedRow(f"{source}: header must be exactly 'image,count'")
    truth = GroundTruth()
    for lineno, row in enumerate(csv.reader(lines[1:]), start=2):
        if not row:
            continue
        if len(row) != 2 or not row[0]:
            raise MalformedRow(f"{source}:{lineno}: expected 'image,count', got {row!r}")
        image, raw = row
        try:
            count = int(raw.strip())
        except ValueError:
            raise MalformedRow(f"{source}:{lineno}: count {raw!r} is not an integer") from None
        if count < 0:
            raise NegativeCount(f"{source}:{lineno}: negative count for {image}")
        if image in truth:
            raise DuplicateId(f"{source}:{lineno}: duplicate image {image}")
        truth[image] = count
    return truth


def load_ground_truth(path) -> GroundTruth:
    path = Path(path)
    return parse_ground_truth(path.read_text(encoding="utf-8"), str(path))


def write_ground_truth(truth: Dict[str, int], path) -> None:
    lines = ["image,count"] + [f"{k},{v}" for k, v in truth.items()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8", newline="")


def _as_series(xs, ys) -> Tuple[np.ndarray, np.ndarray]:
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise LengthMismatch(f"series lengths differ: {x.shape} vs {y.shape}")
    if len(x) < 2:
        raise LengthMismatch("need at least two points")
    return x, y


def pearson(xs, ys) -> float:
    x, y = _as_series(xs, ys)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateSeries("correlation is undefined for a constant series")
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return max(-1.0, min(1.0, r))


def least_squares_fit(densities, counts) -> Tuple[float, float]:
    """Ordinary least squares ``count ~ slope * density + intercept``."""
    x, y = _as_series(densities, counts)
    dx = x - x.mean()
    sxx = float(dx @ dx)
    if sxx == 0.0:
        raise DegenerateSeries("densities are constant; slope is undefined")
    slope = float(dx @ (y - y.mean())) / sxx
    return slope, float(y.mean() - slope * x.mean())


@dataclass(frozen=True)
class AccuracyReport:
    algorithm: str
    n_matched: int
    n_skipped: int
    pearson_r: float
    fit_slope: float
    fit_intercept: float
    mae: float

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, obj: dict) -> "AccuracyReport":
        return cls(**obj)


def evaluate(records: Iterable[DensityRecord], truth: Dict[str, int]) -> AccuracyReport:
    """Join densities to counts by frame id and score the relationship."""
    records = list(records)
    algos = {r.algorithm for r in records}
    if len(algos) > 1:
        raise ValueError(f"records mix algorithms: {sorted(algos)}")
    by_id = {}
    for r in records:
        if r.frame_id in by_id:
            raise DuplicateId(f"frame {r.frame_id} appears twice in the density records")
        by_id[r.frame_id] = r.density
    common = sorted(set(by_id) & set(truth))
    if len(common) < 2:
        raise InsufficientOverlap(
            f"only {len(common)} frame(s) have both a density and a ground-truth count"
        )
    skipped = len(set(by_id) ^ set(truth))
    d = np.array([by_id[k] for k in common])
    c = np.array([truth[k] for k in common], dtype=np.float64)
    r = pearson(d, c)
    slope, intercept = least_squares_fit(d, c)
    mae = float(np.mean(np.abs(slope * d + intercept - c)))
    return AccuracyReport(
        algorithm=algos.pop() if algos else "",
        n_matched=len(common),
        n_skipped=skipped,
        pearson_r=r,
        fit_slope=slope,
        fit_intercept=intercept,
        mae=mae,
    )
