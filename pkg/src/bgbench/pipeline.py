"""End-to-end per-frame processing and the density CSV format."""
from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .bgmodels import ALGORITHMS, DEFAULT_THRESHOLD, MogParams, make_model
from .density import DEFAULT_LAMBDA, DensityRecord, build_weights, weighted_density
from .errors import MalformedRow
from .imaging import Frame
from .postproc import StructuringElement, filter_small_blobs, label_blobs, opening

CSV_HEADER = ("image", "algorithm", "density", "elapsed_us")


@dataclass(frozen=True)
class PipelineConfig:
    mog: MogParams = field(default_factory=MogParams)
    threshold: float = DEFAULT_THRESHOLD
    se_size: int = 3
    min_area: int = 50
    lam: float = DEFAULT_LAMBDA


class Pipeline:
    """One background model plus the shared cleanup and density stages.

    Holds temporal state, so one instance serves exactly one sequence.
    """

    def __init__(self, algorithm: str, config: PipelineConfig = PipelineConfig(),
                 reference: Optional[Frame] = None):
        self.algorithm = algorithm
        self.config = config
        self.model = make_model(algorithm, config.mog, config.threshold, reference)
        self.se = StructuringElement(config.se_size)
        self._weights = None

    def clean(self, mask: np.ndarray) -> np.ndarray:
        return filter_small_blobs(label_blobs(opening(mask, self.se)), self.config.min_area)

    def process(self, frame: Frame) -> tuple:
        """Return ``(cleaned_mask, density)`` for the next frame in sequence."""
        if self._weights is None or self._weights.height != frame.height:
            self._weights = build_weights(frame.height, self.config.lam)
        mask = self.clean(self.model.observe(frame))
        return mask, weighted_density(mask, self._weights)


def run_sequence(frames: Sequence[Frame], algorithm: str, config: PipelineConfig = PipelineConfig(),
                 timed: bool = True, reference: Optional[Frame] = None) -> List[DensityRecord]:
    """Process a sequence in order, timing each frame (decode excluded)."""
    pipe = Pipeline(algorithm, config, reference)
    out = []
    for frame in frames:
        t0 = time.perf_counter_ns()
        _, d = pipe.process(frame)
        elapsed = (time.perf_counter_ns() - t0) / 1000.0 if timed else 0.0
        out.append(DensityRecord(frame.id, algorithm, d, elapsed))
    return out


def format_density_csv(records: Iterable[DensityRecord], timing: bool = True) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for r in records:
        elapsed = int(round(r.elapsed)) if timing else 0
        writer.writerow((r.frame_id, r.algorithm, repr(float(r.density)), elapsed))
    return buf.getvalue()


def write_density_csv(records: Iterable[DensityRecord], path, timing: bool = True) -> None:
    Path(path).write_text(format_density_csv(records, timing), encoding="utf-8", newline="")


def read_density_csv(path) -> List[DensityRecord]:
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or tuple(header) != CSV_HEADER:
            raise MalformedRow(f"{path}: expected header {','.join(CSV_HEADER)}")
        out = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 4 or row[1] not in ALGORITHMS:
                raise MalformedRow(f"{path}:{lineno}: bad row {row!r}")
            try:
                out.append(DensityRecord(row[0], row[1], float(row[2]), float(row[3])))
            except ValueError as exc:
                raise MalformedRow(f"{path}:{lineno}: {exc}") from exc
    return out
