"""Boxes, IoU, greedy one-to-one matching and pose-guided box refinement."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from . import kernels

KEYPOINT_NAMES = (
    "nose", "left_eye", "right_eye", "left_ear", "right_ear",
    "left_shoulder", "right_shoulder", "left_elbow", "right_elbow",
    "left_wrist", "right_wrist", "left_hip", "right_hip",
    "left_knee", "right_knee", "left_ankle", "right_ankle",
)

DEFAULT_KEYPOINT_CONF = 0.3


@dataclass(frozen=True)
class BoundingBox:
    """Axis-aligned box, corner convention, continuous pixel coordinates."""

    x1: float
    y1: float
    x2: float
    y2: float

    @property
    def width(self) -> float:
        return self.x2 - self.x1

    @property
    def height(self) -> float:
        return self.y2 - self.y1

    @property
    def area(self) -> float:
        return self.width * self.height

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x1, self.y1, self.x2, self.y2)

    def is_ordered(self) -> bool:
        return self.x1 <= self.x2 and self.y1 <= self.y2

    def contains(self, other: "BoundingBox") -> bool:
        return (self.x1 <= other.x1 and self.y1 <= other.y1
                and self.x2 >= other.x2 and self.y2 >= other.y2)


class Keypoint(NamedTuple):
    name: str
    x: float
    y: float
    confidence: float


@dataclass(frozen=True)
class PoseKeypoints:
    points: tuple[Keypoint, ...]

    def __post_init__(self) -> None:
        if len(self.points) != len(KEYPOINT_NAMES):
            raise ValueError(f"expected {len(KEYPOINT_NAMES)} keypoints, got {len(self.points)}")
        for kp, name in zip(self.points, KEYPOINT_NAMES):
            if kp.name != name:
                raise ValueError(f"keypoint {kp.name!r} out of order, expected {name!r}")
            if not 0.0 <= kp.confidence <= 1.0:
                raise ValueError(f"confidence of {name} outside [0, 1]")

    @classmethod
    def from_xyc(cls, triples: Iterable[Sequence[float]]) -> "PoseKeypoints":
        """Build from ``(x, y, confidence)`` rows in canonical keypoint order."""
        return cls(tuple(Keypoint(n, float(x), float(y), float(c))
                         for n, (x, y, c) in zip(KEYPOINT_NAMES, triples, strict=True)))

    def translated(self, dx: float, dy: float) -> "PoseKeypoints":
        return PoseKeypoints(tuple(k._replace(x=k.x + dx, y=k.y + dy) for k in self.points))


@dataclass(frozen=True)
class MatchResult:
    pairs: tuple[tuple[int, int, float], ...]
    unmatched_pred: tuple[int, ...]
    unmatched_gt: tuple[int, ...]


def iou(a: BoundingBox, b: BoundingBox) -> float:
    """Intersection over union; 0 when either box has zero area."""
    return kernels.box_iou(a.x1, a.y1, a.x2, a.y2, b.x1, b.y1, b.x2, b.y2)


def greedy_match(
    preds: Sequence[tuple[BoundingBox, float]],
    gts: Sequence[BoundingBox],
    thresh: float,
) -> MatchResult:
    """Match predictions to ground truth by repeatedly taking the highest
    remaining IoU that is at least ``thresh``.

    ``preds`` holds ``(box, score)`` pairs. Equal IoUs resolve by higher
    score, then lower prediction index, then lower ground-truth index.
    """
    if not 0.0 < thresh <= 1.0:
        raise ValueError("thresh must lie in (0, 1]")
    if not preds or not gts:
        return MatchResult((), tuple(range(len(preds))), tuple(range(len(gts))))
    ious = kernels.iou_matrix([p.as_tuple() for p, _ in preds], [g.as_tuple() for g in gts])
    return match_from_ious(ious, [s for _, s in preds], thresh)


def match_from_ious(ious: Sequence[Sequence[float]], scores: Sequence[float], thresh: float) -> MatchResult:
    pairs = kernels.greedy_assign(ious, scores, thresh) if ious else []
    n_pred = len(ious)
    n_gt = len(ious[0]) if ious else 0
    used_p = {p for p, _, _ in pairs}
    used_g = {g for _, g, _ in pairs}
    return MatchResult(
        tuple(pairs),
        tuple(i for i in range(n_pred) if i not in used_p),
        tuple(j for j in range(n_gt) if j not in used_g),
    )


def refine_person_box(
    box: BoundingBox,
    kp: PoseKeypoints,
    conf_thresh: float = DEFAULT_KEYPOINT_CONF,
    image_bounds: BoundingBox | None = None,
) -> BoundingBox:
    """Grow ``box`` to the smallest box that also holds every keypoint with
    confidence >= ``conf_thresh``, then clamp to ``image_bounds``."""
    if not 0.0 <= conf_thresh <= 1.0:
        raise ValueError("conf_thresh must lie in [0, 1]")
    x1, y1, x2, y2 = box.as_tuple()
    for k in kp.points:
        if k.confidence >= conf_thresh:
            x1 = min(x1, k.x)
            y1 = min(y1, k.y)
            x2 = max(x2, k.x)
            y2 = max(y2, k.y)
    if image_bounds is not None:
        x1 = min(max(x1, image_bounds.x1), image_bounds.x2)
        y1 = min(max(y1, image_bounds.y1), image_bounds.y2)
        x2 = max(min(x2, image_bounds.x2), image_bounds.x1)
        y2 = max(min(y2, image_bounds.y2), image_bounds.y1)
    return BoundingBox(x1, y1, x2, y2)
