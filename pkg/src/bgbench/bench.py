"""Processing time, throughput scaling and accuracy across algorithms.

Parallelism is across camera sequences only: a mixture model's state
depends on frame order, so each worker owns whole sequences and the
results are merged and sorted by frame id afterwards.
"""
from __future__ import annotations

import hashlib
import json
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .bgmodels import ALGORITHMS
from .density import DensityRecord
from .errors import InsufficientSequences
from .evaluation import AccuracyReport, evaluate
from .imaging import Frame, SequenceManifest
from .pipeline import Pipeline, PipelineConfig


@dataclass(frozen=True)
class BenchConfig:
    algorithms: Tuple[str, ...] = ALGORITHMS
    repeats: int = 3
    worker_counts: Tuple[int, ...] = (1,)
    pipeline: PipelineConfig = field(default_factory=PipelineConfig)

    def __post_init__(self):
        if not self.algorithms:
            raise ValueError("at least one algorithm is required")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}")
        if len(set(self.algorithms)) != len(self.algorithms):
            raise ValueError("algorithms must be unique")
        if self.repeats < 1:
            raise ValueError("repeats must be >= 1")
        if not self.worker_counts or any(p < 1 for p in self.worker_counts):
            raise ValueError("worker counts must be positive")
        if list(self.worker_counts) != sorted(self.worker_counts):
            raise ValueError("worker counts must be sorted ascending")


@dataclass
class TimingSeries:
    algorithm: str
    frame_ids: List[str]
    elapsed_us: List[float]
    records: List[DensityRecord]
    decode_us: float

    def __len__(self):
        return len(self.elapsed_us)


def _run_once(frames: Sequence[Frame], algorithm: str, config: PipelineConfig):
    pipe = Pipeline(algorithm, config)
    times, dens = [], []
    for frame in frames:
        t0 = time.perf_counter_ns()
        _, d = pipe.process(frame)
        times.append((time.perf_counter_ns() - t0) / 1000.0)
        dens.append(d)
    return times, dens


def time_frames(sequences: Sequence[Sequence[Frame]], algorithm: str,
                config: BenchConfig = BenchConfig(), decode_us: float = 0.0) -> TimingSeries:
    """Best-of-``repeats`` per-frame time over already decoded sequences.

    Each repeat replays a whole sequence through a fresh model, so
    temporal state is identical on every pass.
    """
    ids, best, records = [], [], []
    for frames in sequences:
        seq_best = None
        dens = None
        for _ in range(config.repeats):
            times, d = _run_once(frames, algorithm, config.pipeline)
            seq_best = times if seq_best is None else [min(a, b) for a, b in zip(seq_best, times)]
            dens = d
        ids.extend(f.id for f in frames)
        best.extend(seq_best)
        records.extend(
            DensityRecord(f.id, algorithm, d, t) for f, d, t in zip(frames, dens, seq_best)
        )
    return TimingSeries(algorithm, ids, best, records, decode_us)


def _decode_all(manifests: Sequence[SequenceManifest]) -> Tuple[List[List[Frame]], float]:
    t0 = time.perf_counter_ns()
    seqs = [m.load_frames() for m in manifests]
    return seqs, (time.perf_counter_ns() - t0) / 1000.0


def time_algorithm(manifests: Sequence[SequenceManifest], algorithm: str,
                   config: BenchConfig = BenchConfig()) -> TimingSeries:
    seqs, decode_us = _decode_all(manifests)
    return time_frames(seqs, algorithm, config, decode_us)


def mask_digest(mask: np.ndarray) -> str:
    return hashlib.sha256(np.packbits(mask).tobytes() + repr(mask.shape).encode()).hexdigest()


def process_manifest(manifest: SequenceManifest, algorithm: str,
                     config: PipelineConfig) -> List[Tuple[str, float, str]]:
    """Decode and process one sequence end to end: ``(frame_id, density, mask_digest)``."""
    pipe = Pipeline(algorithm, config)
    out = []
    for frame in manifest.load_frames():
        mask, d = pipe.process(frame)
        out.append((frame.id, d, mask_digest(mask)))
    return out


@dataclass
class SweepResult:
    algorithm: str
    fps: Dict[int, float]
    results: Dict[int, List[Tuple[str, float, str]]]

    def records(self, workers: int) -> List[DensityRecord]:
        return [DensityRecord(fid, self.algorithm, d) for fid, d, _ in self.results[workers]]


def _run_pool(manifests, algorithm, config, workers):
    if workers == 1:
        parts = [process_manifest(m, algorithm, config) for m in manifests]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(process_manifest, m, algorithm, config) for m in manifests]
            parts = [f.result() for f in futures]
    return sorted((row for part in parts for row in part), key=lambda r: r[0])


def scalability_sweep(manifests: Sequence[SequenceManifest], algorithm: str,
                      worker_counts: Sequence[int] = (1,),
                      config: PipelineConfig = PipelineConfig()) -> SweepResult:
    """Frames per second with P workers, each owning whole sequences."""
    if not worker_counts:
        raise ValueError("no worker counts given")
    if len(manifests) < max(worker_counts):
        raise InsufficientSequences(
            f"{len(manifests)} sequence(s) cannot occupy {max(worker_counts)} workers"
        )
    total = sum(len(m) for m in manifests)
    fps, results = {}, {}
    for p in worker_counts:
        t0 = time.perf_counter()
        results[p] = _run_pool(manifests, algorithm, config, p)
        wall = time.perf_counter() - t0
        fps[p] = total / max(wall, 1e-9)
    return SweepResult(algorithm, fps, results)


@dataclass
class AlgorithmBench:
    algorithm: str
    mean_us: float
    median_us: float
    p95_us: float
    fps: Dict[int, float]
    accuracy: Optional[AccuracyReport] = None
    series: Dict[str, List[List[float]]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "algorithm": self.algorithm,
            "mean_us": self.mean_us,
            "median_us": self.median_us,
            "p95_us": self.p95_us,
            "fps": {str(k): v for k, v in self.fps.items()},
            "accuracy": self.accuracy.to_dict() if self.accuracy else None,
            "series": self.series,
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "AlgorithmBench":
        acc = obj.get("accuracy")
        return cls(
            algorithm=obj["algorithm"],
            mean_us=obj["mean_us"],
            median_us=obj["median_us"],
            p95_us=obj["p95_us"],
            fps={int(k): v for k, v in obj["fps"].items()},
            accuracy=AccuracyReport.from_dict(acc) if acc else None,
            series={k: [list(p) for p in v] for k, v in obj.get("series", {}).items()},
        )


@dataclass
class BenchReport:
    algorithms: Dict[str, AlgorithmBench]
    environment: dict

    def to_dict(self) -> dict:
        return {
            "environment": self.environment,
            "algorithms": [a.to_dict() for a in self.algorithms.values()],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "BenchReport":
        algos = [AlgorithmBench.from_dict(a) for a in obj["algorithms"]]
        return cls({a.algorithm: a for a in algos}, obj["environment"])

    def __eq__(self, other):
        if not isinstance(other, BenchReport):
            return NotImplemented
        return self.to_dict() == other.to_dict()


def run_benchmark(manifests: Sequence[SequenceManifest], config: BenchConfig = BenchConfig(),
                  truth: Optional[Dict[str, int]] = None) -> BenchReport:
    seqs, decode_us = _decode_all(manifests)
    total = sum(len(s) for s in seqs)
    algos = {}
    for algorithm in config.algorithms:
        timing = time_frames(seqs, algorithm, config, decode_us)
        sweep = scalability_sweep(manifests, algorithm, config.worker_counts, config.pipeline)
        el = np.asarray(timing.elapsed_us)
        accuracy = evaluate(timing.records, truth) if truth else None
        series = {
            "elapsed_us": [[float(i), float(t)] for i, t in enumerate(timing.elapsed_us)],
            "fps": [[float(p), float(v)] for p, v in sweep.fps.items()],
            "density": [[float(i), r.density] for i, r in enumerate(timing.records)],
        }
        if truth:
            series["density_vs_count"] = [
                [float(truth[r.frame_id]), r.density] for r in timing.records if r.frame_id in truth
            ]
        algos[algorithm] = AlgorithmBench(
            algorithm=algorithm,
            mean_us=float(el.mean()),
            median_us=float(np.median(el)),
            p95_us=float(np.percentile(el, 95)),
            fps=sweep.fps,
            accuracy=accuracy,
            series=series,
        )
    first = seqs[0][0]
    environment = {
        "width": first.width,
        "height": first.height,
        "channels": first.channels,
        "frame_count": total,
        "sequence_count": len(seqs),
        "decode_us_total": decode_us,
        "repeats": config.repeats,
        "cpu_count": os.cpu_count(),
    }
    return BenchReport(algos, environment)


TSV_HEADER = "algorithm\tmetric\tx\ty"


def format_tsv(report: BenchReport) -> str:
    lines = [TSV_HEADER]
    for algo in report.algorithms.values():
        for metric, points in algo.series.items():
            for x, y in points:
                lines.append(f"{algo.algorithm}\t{metric}\t{x!r}\t{y!r}")
    return "\n".join(lines) + "\n"


def emit_report(report: BenchReport, path) -> Tuple[Path, Path]:
    """Write ``path`` as JSON and a plot-ready TSV next to it."""
    path = Path(path)
    path.write_text(json.dumps(report.to_dict(), indent=2) + "\n", encoding="utf-8", newline="")
    tsv = path.with_suffix(".tsv")
    tsv.write_text(format_tsv(report), encoding="utf-8", newline="")
    return path, tsv


def load_report(path) -> BenchReport:
    return BenchReport.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
