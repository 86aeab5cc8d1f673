"""Keypoint-dot augmentation of person crops and binary PPM (P6) I/O."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from pathlib import Path

from . import kernels
from ._io import write_atomic
from .errors import EmptyCropError, SchemaError
from .geometry import DEFAULT_KEYPOINT_CONF, BoundingBox, PoseKeypoints

# Keypoint order as in geometry.KEYPOINT_NAMES. Face points are neutral/magenta,
# left limbs run warm (red -> yellow), right limbs run cool (blue -> green).
DEFAULT_PALETTE: tuple[tuple[int, int, int], ...] = (
    (255, 255, 255),  # nose
    (255, 0, 255),    # left_eye
    (128, 0, 255),    # right_eye
    (255, 128, 192),  # left_ear
    (128, 128, 255),  # right_ear
    (255, 0, 0),      # left_shoulder
    (0, 0, 255),      # right_shoulder
    (255, 96, 0),     # left_elbow
    (0, 128, 255),    # right_elbow
    (255, 192, 0),    # left_wrist
    (0, 255, 255),    # right_wrist
    (192, 0, 64),     # left_hip
    (0, 64, 128),     # right_hip
    (255, 255, 0),    # left_knee
    (0, 255, 128),    # right_knee
    (128, 64, 0),     # left_ankle
    (0, 160, 0),      # right_ankle
)


@dataclass(frozen=True)
class RasterImage:
    width: int
    height: int
    pixels: bytes  # row-major RGB

    def __post_init__(self) -> None:
        if self.width < 0 or self.height < 0:
            raise ValueError("negative image size")
        if len(self.pixels) != self.width * self.height * 3:
            raise ValueError(f"pixel buffer has {len(self.pixels)} bytes, "
                             f"expected {self.width * self.height * 3}")

    @classmethod
    def blank(cls, width: int, height: int, rgb: tuple[int, int, int] = (0, 0, 0)) -> "RasterImage":
        return cls(width, height, bytes(rgb) * (width * height))

    def pixel(self, x: int, y: int) -> tuple[int, int, int]:
        o = (y * self.width + x) * 3
        return tuple(self.pixels[o:o + 3])  # type: ignore[return-value]

    def bounds(self) -> BoundingBox:
        return BoundingBox(0.0, 0.0, float(self.width), float(self.height))


@dataclass(frozen=True)
class RenderStyle:
    palette: tuple[tuple[int, int, int], ...] = DEFAULT_PALETTE
    min_px: int = 2
    fraction_of_long_side: float = 0.01
    conf_thresh: float = DEFAULT_KEYPOINT_CONF

    def __post_init__(self) -> None:
        if len(self.palette) != 17:
            raise ValueError("palette needs 17 colours")
        if len(set(map(tuple, self.palette))) != len(self.palette):
            raise ValueError("palette colours must be pairwise distinct")
        for c in self.palette:
            if len(c) != 3 or not all(0 <= v <= 255 for v in c):
                raise ValueError(f"bad colour {c}")
        if self.min_px < 1:
            raise ValueError("min_px must be >= 1")
        if not 0.0 < self.fraction_of_long_side < 1.0:
            raise ValueError("fraction_of_long_side must lie in (0, 1)")
        if not 0.0 <= self.conf_thresh <= 1.0:
            raise ValueError("conf_thresh must lie in [0, 1]")

    def radius_for(self, width: int, height: int) -> int:
        # round half up, independent of the host's rounding mode
        return max(self.min_px, int(math.floor(self.fraction_of_long_side * max(width, height) + 0.5)))


def crop_window(image: RasterImage, box: BoundingBox) -> tuple[int, int, int, int]:
    """Integer window for ``box``: floor the near corner, ceil the far one, clamp."""
    x1 = max(0, math.floor(box.x1))
    y1 = max(0, math.floor(box.y1))
    x2 = min(image.width, math.ceil(box.x2))
    y2 = min(image.height, math.ceil(box.y2))
    if x2 <= x1 or y2 <= y1:
        raise EmptyCropError(f"box {box.as_tuple()} does not intersect the {image.width}x{image.height} image")
    return x1, y1, x2, y2


def crop(image: RasterImage, box: BoundingBox) -> RasterImage:
    x1, y1, x2, y2 = crop_window(image, box)
    stride = image.width * 3
    rows = [image.pixels[y * stride + x1 * 3: y * stride + x2 * 3] for y in range(y1, y2)]
    return RasterImage(x2 - x1, y2 - y1, b"".join(rows))


def render_keypoints(crop_img: RasterImage, kp: PoseKeypoints, style: RenderStyle = RenderStyle()) -> RasterImage:
    """Draw each confident keypoint as a filled disk in its palette colour.

    Keypoints whose centre lies outside the crop are skipped. Disks are
    drawn in keypoint order, so later points overdraw earlier ones.
    """
    w, h = crop_img.width, crop_img.height
    buf = bytearray(crop_img.pixels)
    radius = style.radius_for(w, h)
    for k, colour in zip(kp.points, style.palette):
        if k.confidence < style.conf_thresh:
            continue
        if not (0.0 <= k.x < w and 0.0 <= k.y < h):
            continue
        kernels.paint_disk(buf, w, h, float(k.x), float(k.y), float(radius), *colour)
    return RasterImage(w, h, bytes(buf))


def augment_person(image: RasterImage, box: BoundingBox, kp_image_coords: PoseKeypoints,
                   style: RenderStyle = RenderStyle()) -> RasterImage:
    """Crop the person and draw its keypoints (given in full-image coordinates)."""
    x1, y1, _, _ = crop_window(image, box)
    return render_keypoints(crop(image, box), kp_image_coords.translated(-x1, -y1), style)


# --- PPM ---------------------------------------------------------------------

_TOKEN = re.compile(rb"(?:\s|#[^\n]*\n)*(\S+)")


def decode_ppm(data: bytes) -> RasterImage:
    pos = 0
    fields = []
    for _ in range(4):
        m = _TOKEN.match(data, pos)
        if not m:
            raise SchemaError("truncated PPM header")
        fields.append(m.group(1))
        pos = m.end()
    magic, w, h, maxval = fields
    if magic != b"P6":
        raise SchemaError(f"unsupported PPM magic {magic!r}; only P6 is read")
    try:
        width, height, mv = int(w), int(h), int(maxval)
    except ValueError:
        raise SchemaError("non-numeric PPM header field") from None
    if mv != 255:
        raise SchemaError(f"maxval {mv} unsupported; expected 255")
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise SchemaError("missing whitespace after PPM header")
    pos += 1
    n = width * height * 3
    body = data[pos:pos + n]
    if len(body) != n:
        raise SchemaError(f"PPM pixel data truncated: {len(body)} of {n} bytes")
    return RasterImage(width, height, bytes(body))


def encode_ppm(image: RasterImage) -> bytes:
    return b"P6\n%d %d\n255\n" % (image.width, image.height) + image.pixels


def read_ppm(path: str | Path) -> RasterImage:
    return decode_ppm(Path(path).read_bytes())


def write_ppm(path: str | Path, image: RasterImage) -> None:
    write_atomic(path, encode_ppm(image))
