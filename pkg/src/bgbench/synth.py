"""Seeded synthetic traffic-camera sequences with exact car counts.

A static textured road scene is overlaid with ``k`` non-overlapping
rectangles per frame.  Rectangles shrink toward the top of the image, by
the inverse of the perspective weight of their row, so that a car's
weighted area is roughly independent of where it sits.

Frame 0 of every sequence is an empty plate of the scene (count 0); it
also serves as the reference image of the static-background model.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from .density import DEFAULT_LAMBDA, build_weights
from .evaluation import write_ground_truth
from .imaging import Frame, SequenceManifest, write_pnm

CAR_BASE_SIZE = (12, 18)  # height, width at the bottom row
MAX_PLACEMENT_TRIES = 10_000


@dataclass(frozen=True)
class SynthConfig:
    frames: int = 200
    width: int = 64
    height: int = 64
    cars: Tuple[int, int] = (0, 5)
    noise: float = 2.0
    seed: int = 0
    hold: int = 1  # frames a set of cars persists before being redrawn
    speed: float = 0.0  # horizontal pixels per frame while held
    lam: float = DEFAULT_LAMBDA
    camera_id: str = "cam0"
    interval_seconds: float = 60.0

    def __post_init__(self):
        lo, hi = self.cars
        if lo < 0 or hi < lo:
            raise ValueError(f"invalid car range {self.cars}")
        if self.frames < 1 or self.hold < 1:
            raise ValueError("frames and hold must be >= 1")
        if self.noise < 0:
            raise ValueError("noise must be non-negative")


@dataclass
class SynthSequence:
    config: SynthConfig
    frames: List[Frame]
    counts: List[int]
    background: np.ndarray

    @property
    def truth(self) -> Dict[str, int]:
        return {f.id: k for f, k in zip(self.frames, self.counts)}


def _background(rng, h, w) -> np.ndarray:
    coarse = rng.uniform(95.0, 145.0, size=(h // 8 + 2, w // 8 + 2))
    ys = np.linspace(0, coarse.shape[0] - 1.001, h)
    xs = np.linspace(0, coarse.shape[1] - 1.001, w)
    y0, x0 = ys.astype(int), xs.astype(int)
    fy, fx = (ys - y0)[:, None], (xs - x0)[None, :]
    c = coarse
    smooth = (
        c[y0][:, x0] * (1 - fy) * (1 - fx)
        + c[y0 + 1][:, x0] * fy * (1 - fx)
        + c[y0][:, x0 + 1] * (1 - fy) * fx
        + c[y0 + 1][:, x0 + 1] * fy * fx
    )
    grain = rng.uniform(-5.0, 5.0, size=(h, w))
    return np.clip(smooth + grain, 90.0, 150.0)


def _car_size(row_center: float, weights: np.ndarray) -> Tuple[int, int]:
    r = int(np.clip(round(row_center), 0, len(weights) - 1))
    scale = 1.0 / np.sqrt(weights[r])
    return max(3, round(CAR_BASE_SIZE[0] * scale)), max(3, round(CAR_BASE_SIZE[1] * scale))


def _place_cars(rng, k, h, w, weights, travel) -> List[Tuple[int, int, int, int]]:
    """Return ``k`` boxes ``(top, left, height, width)`` with a 1 px gap."""
    boxes: List[Tuple[int, int, int, int]] = []
    tries = 0
    while len(boxes) < k:
        tries += 1
        if tries > MAX_PLACEMENT_TRIES:
            raise RuntimeError(f"could not place {k} cars in a {w}x{h} frame")
        cy = rng.uniform(0, h)
        bh, bw = _car_size(cy, weights)
        top = int(round(cy - bh / 2))
        left_max = w - bw - travel
        if top < 0 or top + bh > h or left_max < 0:
            continue
        left = int(rng.integers(0, left_max + 1))
        if any(
            top < t + hh + 1 and t < top + bh + 1 and left < l + ww + 1 and l < left + bw + 1
            for t, l, hh, ww in boxes
        ):
            continue
        boxes.append((top, left, bh, bw))
    return boxes


def _car_intensity(rng) -> int:
    if rng.random() < 0.5:
        return int(rng.integers(5, 41))
    return int(rng.integers(200, 251))


def generate(config: SynthConfig) -> SynthSequence:
    rng = np.random.default_rng(config.seed)
    h, w = config.height, config.width
    bg = _background(rng, h, w)
    weights = build_weights(h, config.lam).weights
    travel = int(np.ceil(config.speed * (config.hold - 1)))

    frames, counts = [], []
    boxes: List[Tuple[int, int, int, int]] = []
    shades: List[int] = []
    held = 0
    for t in range(config.frames):
        scene = bg.copy()
        if t == 0:
            k = 0
        else:
            if held == 0:
                k = int(rng.integers(config.cars[0], config.cars[1] + 1))
                boxes = _place_cars(rng, k, h, w, weights, travel)
                shades = [_car_intensity(rng) for _ in boxes]
            shift = int(round(config.speed * held))
            for (top, left, bh, bw), shade in zip(boxes, shades):
                scene[top:top + bh, left + shift:left + shift + bw] = shade
            k = len(boxes)
            held = (held + 1) % config.hold
        if config.noise > 0:
            scene = scene + rng.normal(0.0, config.noise, size=scene.shape)
        pixels = np.clip(np.rint(scene), 0, 255).astype(np.uint8)
        frames.append(Frame(pixels, f"{config.camera_id}_{t:05d}.pgm"))
        counts.append(k)
    return SynthSequence(config, frames, counts, bg)


def write_sequence(seq: SynthSequence, outdir) -> Path:
    """Write frames, manifest and truth CSV; return the manifest path.

    Layout: frames under ``outdir/<camera>/``, the manifest at
    ``outdir/<camera>.json`` and counts at ``outdir/<camera>_truth.csv``.
    """
    outdir = Path(outdir)
    cam = seq.config.camera_id
    frame_dir = outdir / cam
    frame_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for frame in seq.frames:
        p = frame_dir / frame.id
        write_pnm(frame, p)
        paths.append(p)
    manifest = SequenceManifest(
        camera_id=cam,
        interval_seconds=seq.config.interval_seconds,
        width=seq.config.width,
        height=seq.config.height,
        frames=tuple(paths),
    )
    manifest_path = outdir / f"{cam}.json"
    manifest_path.write_text(manifest.to_json(relative_to=outdir), encoding="utf-8", newline="")
    write_ground_truth(seq.truth, outdir / f"{cam}_truth.csv")
    return manifest_path


def constant_sequence(value: int = 100, frames: int = 50, width: int = 64, height: int = 64,
                      noise: float = 0.0, seed: int = 0, channels: int = 1,
                      camera_id: str = "const") -> List[Frame]:
    """A static flat scene, optionally with i.i.d. Gaussian noise per frame."""
    rng = np.random.default_rng(seed)
    shape = (height, width, channels)
    out = []
    for t in range(frames):
        scene = np.full(shape, float(value))
        if noise > 0:
            scene = scene + rng.normal(0.0, noise, size=shape)
        out.append(Frame(np.clip(np.rint(scene), 0, 255).astype(np.uint8), f"{camera_id}_{t:05d}.pgm"))
    return out
