"""Background models: frame differencing, static reference, adaptive mixture.

Every model exposes ``observe(frame) -> mask`` where the mask is a boolean
``(height, width)`` array, True marking foreground.  Pixel values are used on
their native 0-255 scale.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .errors import ChannelMismatch, DimensionMismatch
from .imaging import Frame

DEFAULT_THRESHOLD = 25.0


@dataclass(frozen=True)
class MogParams:
    K: int = 5
    alpha: float = 0.005
    match_sigmas: float = 2.5
    background_weight_threshold: float = 0.7
    initial_variance: float = 225.0
    initial_weight: float = 0.05
    variance_floor: float = 4.0

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if self.match_sigmas <= 0:
            raise ValueError("match_sigmas must be positive")
        if not 0 < self.background_weight_threshold <= 1:
            raise ValueError("background_weight_threshold must lie in (0, 1]")
        if self.variance_floor <= 0:
            raise ValueError("variance_floor must be positive")
        if self.initial_variance < self.variance_floor:
            raise ValueError("initial_variance must be >= variance_floor")
        if not 0 <= self.initial_weight <= 1:
            raise ValueError("initial_weight must lie in [0, 1]")

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2) + "\n"

    @classmethod
    def from_dict(cls, obj: dict) -> "MogParams":
        known = {f.name: f.type for f in fields(cls)}
        unknown = set(obj) - set(known)
        if unknown:
            raise ValueError(f"unknown MogParams keys: {sorted(unknown)}")
        kwargs = {k: (int(v) if k == "K" else float(v)) for k, v in obj.items()}
        return cls(**kwargs)

    @classmethod
    def load(cls, path) -> "MogParams":
        obj = json.loads(Path(path).read_text(encoding="utf-8"))
        if not isinstance(obj, dict):
            raise ValueError(f"{path}: params file must hold a JSON object")
        return cls.from_dict(obj)


@dataclass(frozen=True)
class GaussianComponent:
    weight: float
    mean: np.ndarray
    variance: np.ndarray


def gaussian_density(x, mean, variance) -> np.ndarray:
    """Diagonal-covariance normal density.

    The last axis of every argument is the channel axis; leading axes
    broadcast, so a whole grid of samples can be evaluated at once.
    """
    x = np.asarray(x, dtype=np.float64)
    mean = np.asarray(mean, dtype=np.float64)
    variance = np.asarray(variance, dtype=np.float64)
    if x.ndim == 0:
        x = x[None]
    if mean.ndim == 0:
        mean = mean[None]
    if variance.ndim == 0:
        variance = variance[None]
    n = x.shape[-1]
    if mean.shape[-1] != n or variance.shape[-1] != n:
        raise DimensionMismatch(
            f"sample has {n} channels, component has {mean.shape[-1]}"
        )
    d2 = np.sum((x - mean) ** 2 / variance, axis=-1)
    norm = (2.0 * math.pi) ** (-n / 2.0) * np.prod(variance, axis=-1) ** -0.5
    return norm * np.exp(-0.5 * d2)


def mixture_probability(x, components: Sequence[GaussianComponent]) -> np.ndarray:
    """Weighted sum of component densities at ``x``."""
    total = 0.0
    for c in components:
        total = total + c.weight * gaussian_density(x, c.mean, c.variance)
    return total


def _check_shape(frame: Frame, shape, channels=None):
    if frame.shape != tuple(shape):
        raise DimensionMismatch(
            f"{frame.id or 'frame'} is {frame.width}x{frame.height}, "
            f"model expects {shape[1]}x{shape[0]}"
        )
    if channels is not None and frame.channels != channels:
        raise ChannelMismatch(
            f"{frame.id or 'frame'} has {frame.channels} channels, model expects {channels}"
        )


def _absdiff_mask(a: Frame, b: Frame, threshold: float) -> np.ndarray:
    diff = np.abs(a.pixels.astype(np.int16) - b.pixels.astype(np.int16))
    return diff.max(axis=2) > threshold


class FrameDifference:
    """Foreground where the current frame departs from the previous one."""

    name = "framediff"

    def __init__(self, threshold: float = DEFAULT_THRESHOLD):
        self.threshold = threshold
        self.previous: Optional[Frame] = None

    def observe(self, frame: Frame) -> np.ndarray:
        return framediff_observe(self, frame, self.threshold)


def framediff_observe(state: FrameDifference, frame: Frame, threshold: float = DEFAULT_THRESHOLD) -> np.ndarray:
    prev = state.previous
    if prev is None:
        mask = np.zeros(frame.shape, dtype=bool)
    else:
        if prev.pixels.shape != frame.pixels.shape:
            raise DimensionMismatch(
                f"{frame.id or 'frame'} does not match the previous frame's dimensions"
            )
        mask = _absdiff_mask(frame, prev, threshold)
    state.previous = frame
    return mask


class StaticBackground:
    """Foreground where a frame departs from a fixed, object-free reference.

    Without an explicit reference the first observed frame is adopted as
    the reference (and reported as all background).
    """

    name = "staticbg"

    def __init__(self, reference: Optional[Frame] = None, threshold: float = DEFAULT_THRESHOLD):
        self.reference = reference
        self.threshold = threshold

    def observe(self, frame: Frame) -> np.ndarray:
        if self.reference is None:
            self.reference = frame
            return np.zeros(frame.shape, dtype=bool)
        return staticbg_observe(self.reference, frame, self.threshold)


def staticbg_observe(reference: Frame, frame: Frame, threshold: float = DEFAULT_THRESHOLD) -> np.ndarray:
    if reference.pixels.shape != frame.pixels.shape:
        raise DimensionMismatch(
            f"{frame.id or 'frame'} does not match the reference frame's dimensions"
        )
    return _absdiff_mask(frame, reference, threshold)


class MixtureModel:
    """Per-pixel adaptive mixture of K diagonal Gaussians.

    State is held as flat arrays over pixels: ``weights`` (P, K),
    ``means`` and ``variances`` (P, K, n).  Components of each pixel are kept
    in fitness order (weight / sqrt(mean variance), descending).  The model
    is created lazily from the first frame it sees.
    """

    name = "mog"

    def __init__(self, params: Optional[MogParams] = None):
        self.params = params or MogParams()
        self.shape: Optional[tuple] = None
        self.channels: Optional[int] = None
        self.weights: Optional[np.ndarray] = None
        self.means: Optional[np.ndarray] = None
        self.variances: Optional[np.ndarray] = None
        self.frames_seen = 0

    @property
    def initialized(self) -> bool:
        return self.weights is not None

    def observe(self, frame: Frame) -> np.ndarray:
        return mog_observe(self, frame)

    def initialize(self, frame: Frame) -> None:
        p = self.params
        h, w, n = frame.pixels.shape
        npix = h * w
        x = frame.pixels.reshape(npix, n).astype(np.float64)
        self.shape = (h, w)
        self.channels = n
        self.weights = np.zeros((npix, p.K))
        self.weights[:, 0] = 1.0
        self.means = np.zeros((npix, p.K, n))
        self.means[:, 0, :] = x
        self.variances = np.full((npix, p.K, n), float(p.initial_variance))

    def pixel(self, row: int, col: int) -> list:
        """The components of one pixel, in fitness order."""
        i = row * self.shape[1] + col
        return [
            GaussianComponent(float(self.weights[i, k]), self.means[i, k].copy(), self.variances[i, k].copy())
            for k in range(self.params.K)
        ]

    def fitness(self) -> np.ndarray:
        return self.weights / np.sqrt(self.variances.mean(axis=2))

    def background_components(self) -> np.ndarray:
        """Boolean (P, K): the shortest fitness-ordered prefix whose weight exceeds T."""
        before = np.cumsum(self.weights, axis=1) - self.weights
        return before <= self.params.background_weight_threshold


def mog_observe(model: MixtureModel, frame: Frame) -> np.ndarray:
    """Classify ``frame`` against ``model`` and fold it into the model."""
    p = model.params
    if not model.initialized:
        model.initialize(frame)
        model.frames_seen = 1
        return np.zeros(frame.shape, dtype=bool)
    _check_shape(frame, model.shape, model.channels)

    npix, K, n = model.means.shape
    rows = np.arange(npix)
    x = frame.pixels.reshape(npix, n).astype(np.float64)
    w, mu, var = model.weights, model.means, model.variances

    dev = x[:, None, :] - mu
    within = np.all(dev * dev <= (p.match_sigmas ** 2) * var, axis=2)
    matched = within.any(axis=1)
    first = np.argmax(within, axis=1)

    # matched pixels: weight, mean and variance update of the winner
    m = np.nonzero(matched)[0]
    mk = first[m]
    w[m] *= 1.0 - p.alpha
    w[m, mk] += p.alpha
    xm = x[m]
    mu_k = mu[m, mk]
    var_k = var[m, mk]
    rho = np.clip(p.alpha * gaussian_density(xm, mu_k, var_k), p.alpha, 1.0)[:, None]
    mu_new = (1.0 - rho) * mu_k + rho * xm
    var_new = (1.0 - rho) * var_k + rho * (xm - mu_new) ** 2
    mu[m, mk] = mu_new
    var[m, mk] = np.maximum(var_new, p.variance_floor)

    # unmatched pixels: the least fit component is replaced
    u = np.nonzero(~matched)[0]
    mu[u, K - 1] = x[u]
    var[u, K - 1] = p.initial_variance
    w[u, K - 1] = p.initial_weight

    w /= w.sum(axis=1, keepdims=True)

    order = np.argsort(-model.fitness(), axis=1, kind="stable")
    model.weights = np.take_along_axis(w, order, axis=1)
    model.means = np.take_along_axis(mu, order[:, :, None], axis=1)
    model.variances = np.take_along_axis(var, order[:, :, None], axis=1)

    # where did each pixel's matched component land after sorting
    rank = np.empty_like(order)
    rank[rows[:, None], order] = np.arange(K)[None, :]
    bg = model.background_components()
    fg = np.ones(npix, dtype=bool)
    fg[m] = ~bg[m, rank[m, mk]]
    model.frames_seen += 1
    return fg.reshape(model.shape)


ALGORITHMS = ("framediff", "staticbg", "mog")


def make_model(algorithm: str, params: Optional[MogParams] = None,
               threshold: float = DEFAULT_THRESHOLD, reference: Optional[Frame] = None):
    if algorithm == "framediff":
        return FrameDifference(threshold)
    if algorithm == "staticbg":
        return StaticBackground(reference, threshold)
    if algorithm == "mog":
        return MixtureModel(params)
    raise ValueError(f"unknown algorithm {algorithm!r}; expected one of {ALGORITHMS}")
