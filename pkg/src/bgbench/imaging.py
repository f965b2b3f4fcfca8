"""Frames, the binary PGM/PPM codec, and camera sequence manifests."""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, List, Tuple

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyFrameList,
    MalformedHeader,
    ManifestParseError,
    MissingKey,
    PnmError,
    TruncatedRaster,
    UnsupportedMagic,
)

_WHITESPACE = b" \t\n\r\v\f"
_MAGIC_CHANNELS = {b"P5": 1, b"P6": 3}


@dataclass(frozen=True, eq=False)
class Frame:
    """An immutable 8-bit image.

    ``pixels`` always has shape ``(height, width, channels)`` and dtype
    uint8; the array is made read-only on construction so frames can be
    shared between workers.
    """

    pixels: np.ndarray
    id: str = ""

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim == 2:
            px = px[:, :, None]
        if px.ndim != 3 or px.shape[2] not in (1, 3):
            raise ValueError(f"frame must be HxW, HxWx1 or HxWx3, got shape {px.shape}")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("frame dimensions must be at least 1x1")
        if px.dtype != np.uint8:
            if np.any(px < 0) or np.any(px > 255):
                raise ValueError("pixel values must lie in [0, 255]")
            px = px.astype(np.uint8)
        px = np.ascontiguousarray(px).copy()
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @classmethod
    def from_bytes(cls, width: int, height: int, channels: int, data: bytes, id: str = "") -> "Frame":
        if channels not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {channels}")
        if len(data) != width * height * channels:
            raise ValueError(
                f"data length {len(data)} != {width}*{height}*{channels}"
            )
        arr = np.frombuffer(data, dtype=np.uint8).reshape(height, width, channels)
        return cls(arr, id)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.height, self.width

    @property
    def data(self) -> bytes:
        """Row-major interleaved samples."""
        return self.pixels.tobytes()

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return (
            self.id == other.id
            and self.pixels.shape == other.pixels.shape
            and np.array_equal(self.pixels, other.pixels)
        )

    def __repr__(self):
        return f"Frame(id={self.id!r}, {self.width}x{self.height}x{self.channels})"


def _next_token(buf: bytes, pos: int) -> Tuple[bytes, int]:
    n = len(buf)
    while pos < n:
        c = buf[pos:pos + 1]
        if c in _WHITESPACE and c:
            pos += 1
        elif c == b"#":
            end = buf.find(b"\n", pos)
            if end < 0:
                raise MalformedHeader("unterminated comment in header")
            pos = end + 1
        else:
            break
    start = pos
    while pos < n and buf[pos:pos + 1] not in _WHITESPACE and buf[pos:pos + 1] != b"#":
        pos += 1
    if start == pos:
        raise MalformedHeader("header ended before all fields were read")
    return buf[start:pos], pos


def _header_int(token: bytes, name: str) -> int:
    if not token.isdigit():
        raise MalformedHeader(f"{name} is not a decimal integer: {token[:16]!r}")
    return int(token)


def decode_pnm(buf: bytes, id: str = "") -> Frame:
    """Decode a binary PGM (P5) or PPM (P6) image with maxval 255."""
    buf = bytes(buf)
    if len(buf) < 2:
        raise MalformedHeader("missing magic number")
    magic = buf[:2]
    if magic[:1] != b"P" or not magic[1:2].isdigit():
        raise MalformedHeader(f"bad magic number {magic!r}")
    if magic not in _MAGIC_CHANNELS:
        raise UnsupportedMagic(f"unsupported netpbm variant {magic.decode('ascii')}")
    channels = _MAGIC_CHANNELS[magic]
    pos = 2
    if pos >= len(buf) or (buf[pos:pos + 1] not in _WHITESPACE and buf[pos:pos + 1] != b"#"):
        raise MalformedHeader("magic number must be followed by whitespace")

    tok, pos = _next_token(buf, pos)
    width = _header_int(tok, "width")
    tok, pos = _next_token(buf, pos)
    height = _header_int(tok, "height")
    tok, pos = _next_token(buf, pos)
    maxval = _header_int(tok, "maxval")
    if width < 1 or height < 1:
        raise MalformedHeader(f"invalid dimensions {width}x{height}")
    if maxval != 255:
        raise UnsupportedMagic(f"only maxval 255 is supported, got {maxval}")
    if pos >= len(buf) or buf[pos:pos + 1] not in _WHITESPACE:
        raise MalformedHeader("maxval must be followed by a single whitespace byte")
    pos += 1

    size = width * height * channels
    raster = buf[pos:pos + size]
    if len(raster) < size:
        raise TruncatedRaster(f"header promises {size} raster bytes, found {len(raster)}")
    return Frame.from_bytes(width, height, channels, raster, id)


def encode_pnm(frame: Frame) -> bytes:
    magic = b"P5" if frame.channels == 1 else b"P6"
    header = b"%s\n%d %d\n255\n" % (magic, frame.width, frame.height)
    return header + frame.data


def read_pnm(path) -> Frame:
    path = Path(path)
    return decode_pnm(path.read_bytes(), id=path.name)


def write_pnm(frame: Frame, path) -> None:
    Path(path).write_bytes(encode_pnm(frame))


def to_samples(frame: Frame) -> Iterator[Tuple[int, int, np.ndarray]]:
    """Yield ``(row, col, values)`` for every pixel in row-major order.

    ``values`` is a float vector of length ``frame.channels``.
    """
    px = frame.pixels.astype(np.float64)
    for r in range(frame.height):
        for c in range(frame.width):
            yield r, c, px[r, c]


@dataclass(frozen=True)
class SequenceManifest:
    camera_id: str
    interval_seconds: float
    width: int
    height: int
    frames: Tuple[Path, ...]

    def __post_init__(self):
        if not self.frames:
            raise EmptyFrameList(f"manifest for {self.camera_id!r} lists no frames")
        if self.interval_seconds <= 0:
            raise ManifestParseError("interval_seconds must be positive")

    def __len__(self):
        return len(self.frames)

    def load_frames(self) -> List[Frame]:
        """Decode every frame, rejecting any whose size differs from the manifest."""
        out = []
        for path in self.frames:
            try:
                frame = read_pnm(path)
            except PnmError as exc:
                raise type(exc)(f"{Path(path).name}: {exc}") from exc
            if frame.width != self.width or frame.height != self.height:
                raise DimensionMismatch(
                    f"{frame.id}: frame is {frame.width}x{frame.height}, "
                    f"manifest declares {self.width}x{self.height}"
                )
            out.append(frame)
        return out

    def to_json(self, relative_to=None) -> str:
        base = Path(relative_to) if relative_to is not None else None
        frames = [
            os.path.relpath(p, base) if base is not None else str(p) for p in self.frames
        ]
        obj = {
            "camera_id": self.camera_id,
            "interval_seconds": self.interval_seconds,
            "width": self.width,
            "height": self.height,
            "frames": frames,
        }
        return json.dumps(obj, indent=2) + "\n"


_MANIFEST_KEYS = ("camera_id", "interval_seconds", "width", "height", "frames")


def load_manifest(path) -> SequenceManifest:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ManifestParseError(f"{path}: {exc}") from exc
    if not isinstance(obj, dict):
        raise ManifestParseError(f"{path}: manifest must be a JSON object")
    for key in _MANIFEST_KEYS:
        if key not in obj:
            raise MissingKey(f"{path}: missing key {key!r}")
    frames = obj["frames"]
    if not isinstance(frames, list) or not all(isinstance(f, str) for f in frames):
        raise ManifestParseError(f"{path}: 'frames' must be an array of strings")
    if not frames:
        raise EmptyFrameList(f"{path}: frame list is empty")
    try:
        width, height = int(obj["width"]), int(obj["height"])
        interval = float(obj["interval_seconds"])
    except (TypeError, ValueError) as exc:
        raise ManifestParseError(f"{path}: {exc}") from exc
    base = path.parent
    return SequenceManifest(
        camera_id=str(obj["camera_id"]),
        interval_seconds=interval,
        width=width,
        height=height,
        frames=tuple(base / f for f in frames),
    )
