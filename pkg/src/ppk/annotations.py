"""In-memory and on-disk model for video annotations and predictions.

File layout (UTF-8 JSON)::

    {"taxonomy_ref": "default",
     "videos": [{"video_id": ..., "action": ...,
                 "frames": [{"frame_id": 0,
                             "persons": [{"box": [x1, y1, x2, y2], "score": 1.0,
                                          "parts": [{"part": ..., "box": [...],
                                                     "state": ..., "score": 1.0}]}]}]}]}
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Iterable, Sequence

from ._io import write_atomic
from .errors import IntegrityError, SchemaError, TaxonomyError
from .geometry import BoundingBox
from .taxonomy import Taxonomy


@dataclass(frozen=True)
class PartInstance:
    part: str
    box: BoundingBox
    state: str
    score: float = 1.0


@dataclass(frozen=True)
class PersonInstance:
    box: BoundingBox
    score: float = 1.0
    parts: tuple[PartInstance, ...] = ()


@dataclass(frozen=True)
class FrameAnnotation:
    frame_id: int
    persons: tuple[PersonInstance, ...] = ()


@dataclass(frozen=True)
class VideoAnnotation:
    video_id: str
    action: str
    frames: tuple[FrameAnnotation, ...]

    def iter_parts(self) -> Iterable[PartInstance]:
        for frame in self.frames:
            for person in frame.persons:
                yield from person.parts

    def map_parts(self, fn) -> "VideoAnnotation":
        """Return a copy with every part replaced by ``fn(part)``."""
        return replace(self, frames=tuple(
            replace(f, persons=tuple(
                replace(p, parts=tuple(fn(x) for x in p.parts)) for p in f.persons))
            for f in self.frames))


@dataclass(frozen=True)
class Violation:
    video_id: str
    kind: str
    locus: str
    detail: str

    def __str__(self) -> str:
        return f"{self.video_id}: {self.kind} at {self.locus}: {self.detail}"


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __len__(self) -> int:
        return len(self.violations)

    def to_dict(self) -> dict[str, Any]:
        return {"ok": self.ok, "violations": [vars(v) for v in self.violations]}


# --- parsing -----------------------------------------------------------------


def _expect(obj: Any, kind: type | tuple, locus: str) -> Any:
    if isinstance(obj, bool) or not isinstance(obj, kind):
        names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise SchemaError(f"expected {names}, got {type(obj).__name__}", locus=locus)
    return obj


def _field(obj: dict, key: str, locus: str) -> Any:
    if key not in obj:
        raise SchemaError(f"missing field {key!r}", locus=locus)
    return obj[key]


def _number(obj: Any, locus: str) -> float:
    v = float(_expect(obj, (int, float), locus))
    if not math.isfinite(v):
        raise SchemaError("non-finite number", locus=locus)
    return v


def _parse_box(obj: Any, locus: str, strict: bool) -> BoundingBox:
    coords = _expect(obj, list, locus)
    if len(coords) != 4:
        raise SchemaError("box needs 4 numbers", locus=locus)
    box = BoundingBox(*(_number(c, f"{locus}[{i}]") for i, c in enumerate(coords)))
    if strict and not box.is_ordered():
        raise IntegrityError("box corners out of order (x2 < x1 or y2 < y1)", locus=locus)
    return box


def _parse_score(obj: dict, locus: str, strict: bool) -> float:
    if "score" not in obj:
        return 1.0
    s = _number(obj["score"], locus + ".score")
    if strict and not 0.0 <= s <= 1.0:
        raise IntegrityError(f"score {s} outside [0, 1]", locus=locus + ".score")
    return s


def _name(obj: Any, allowed: Sequence[str], what: str, locus: str) -> str:
    name = _expect(obj, str, locus)
    if name not in allowed:
        raise TaxonomyError(f"unknown {what} {name!r}", locus=locus)
    return name


def video_from_dict(obj: Any, taxonomy: Taxonomy, locus: str = "video", strict: bool = True) -> VideoAnnotation:
    _expect(obj, dict, locus)
    video_id = _expect(_field(obj, "video_id", locus), str, locus + ".video_id")
    action = _name(_field(obj, "action", locus), taxonomy.video_actions, "video action", locus + ".action")
    frames_raw = _expect(_field(obj, "frames", locus), list, locus + ".frames")
    if strict and not frames_raw:
        raise IntegrityError("video has no frames", locus=locus + ".frames")
    parts_set = taxonomy.raw_parts
    states_set = taxonomy.part_states
    frames = []
    prev = None
    for fi, fobj in enumerate(frames_raw):
        floc = f"{locus}.frames[{fi}]"
        _expect(fobj, dict, floc)
        frame_id = _expect(_field(fobj, "frame_id", floc), int, floc + ".frame_id")
        if frame_id < 0:
            raise SchemaError("frame_id must be non-negative", locus=floc + ".frame_id")
        if strict and prev is not None and frame_id <= prev:
            raise IntegrityError(f"frame_id {frame_id} not strictly increasing", locus=floc + ".frame_id")
        prev = frame_id
        persons = []
        for pi, pobj in enumerate(_expect(fobj.get("persons", []), list, floc + ".persons")):
            ploc = f"{floc}.persons[{pi}]"
            _expect(pobj, dict, ploc)
            pbox = _parse_box(_field(pobj, "box", ploc), ploc + ".box", strict)
            parts = []
            for qi, qobj in enumerate(_expect(pobj.get("parts", []), list, ploc + ".parts")):
                qloc = f"{ploc}.parts[{qi}]"
                _expect(qobj, dict, qloc)
                parts.append(PartInstance(
                    part=_name(_field(qobj, "part", qloc), parts_set, "body part", qloc + ".part"),
                    box=_parse_box(_field(qobj, "box", qloc), qloc + ".box", strict),
                    state=_name(_field(qobj, "state", qloc), states_set, "part state", qloc + ".state"),
                    score=_parse_score(qobj, qloc, strict),
                ))
            persons.append(PersonInstance(pbox, _parse_score(pobj, ploc, strict), tuple(parts)))
        frames.append(FrameAnnotation(frame_id, tuple(persons)))
    return VideoAnnotation(video_id, action, tuple(frames))


def parse_document(doc: Any, taxonomy: Taxonomy, strict: bool = True) -> list[VideoAnnotation]:
    _expect(doc, dict, "<root>")
    ref = doc.get("taxonomy_ref", taxonomy.name)
    if ref != taxonomy.name:
        raise TaxonomyError(f"file references taxonomy {ref!r}, active taxonomy is {taxonomy.name!r}",
                            locus="taxonomy_ref")
    videos_raw = _expect(_field(doc, "videos", "<root>"), list, "videos")
    videos = [video_from_dict(v, taxonomy, f"videos[{i}]", strict) for i, v in enumerate(videos_raw)]
    if strict:
        seen: set[str] = set()
        for i, v in enumerate(videos):
            if v.video_id in seen:
                raise IntegrityError(f"duplicate video_id {v.video_id!r}", locus=f"videos[{i}].video_id")
            seen.add(v.video_id)
    return videos


def read_json(path: str | Path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise SchemaError(f"not UTF-8: {exc}", locus=str(path)) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(exc.msg, locus=str(path), line=exc.lineno) from None


def load_annotations(path: str | Path, taxonomy: Taxonomy, strict: bool = True) -> list[VideoAnnotation]:
    """Load and validate an annotation file.

    With ``strict=False`` only structure and names are checked; invariant
    violations are left for :func:`validate` to report.
    """
    return parse_document(read_json(path), taxonomy, strict)


# --- serialisation -------------------------------------------------------------


def _box_list(b: BoundingBox) -> list[float]:
    return [float(b.x1), float(b.y1), float(b.x2), float(b.y2)]


def video_to_dict(v: VideoAnnotation) -> dict[str, Any]:
    return {
        "video_id": v.video_id,
        "action": v.action,
        "frames": [{
            "frame_id": f.frame_id,
            "persons": [{
                "box": _box_list(p.box),
                "score": float(p.score),
                "parts": [{"part": q.part, "box": _box_list(q.box), "state": q.state,
                           "score": float(q.score)} for q in p.parts],
            } for p in f.persons],
        } for f in v.frames],
    }


def dumps_canonical(obj: Any) -> str:
    """Canonical text form: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def dumps_annotations(videos: Sequence[VideoAnnotation], taxonomy: Taxonomy | str = "default") -> str:
    ref = taxonomy if isinstance(taxonomy, str) else taxonomy.name
    return dumps_canonical({"taxonomy_ref": ref, "videos": [video_to_dict(v) for v in videos]})


def save_annotations(path: str | Path, videos: Sequence[VideoAnnotation],
                     taxonomy: Taxonomy | str = "default") -> None:
    write_atomic(path, dumps_annotations(videos, taxonomy).encode("utf-8"))


# --- operations --------------------------------------------------------------


def _top_indices(scores: Sequence[float], k: int) -> list[int]:
    order = sorted(range(len(scores)), key=lambda i: (-scores[i], i))
    return sorted(order[:k])


def apply_topk(pred: VideoAnnotation, k_person: int, k_part_per_class: int) -> VideoAnnotation:
    """Keep the ``k_person`` best persons per frame and, inside each, the
    ``k_part_per_class`` best instances of every raw part. Survivors keep
    their original order; equal scores favour the earlier entry."""
    if k_person < 1 or k_part_per_class < 1:
        raise ValueError("k_person and k_part_per_class must be >= 1")
    frames = []
    for f in pred.frames:
        keep = _top_indices([p.score for p in f.persons], k_person)
        persons = []
        for i in keep:
            person = f.persons[i]
            by_part: dict[str, list[int]] = {}
            for j, q in enumerate(person.parts):
                by_part.setdefault(q.part, []).append(j)
            kept_parts: list[int] = []
            for idxs in by_part.values():
                top = _top_indices([person.parts[j].score for j in idxs], k_part_per_class)
                kept_parts.extend(idxs[t] for t in top)
            kept_parts.sort()
            if len(kept_parts) == len(person.parts):
                persons.append(person)
            else:
                persons.append(replace(person, parts=tuple(person.parts[j] for j in kept_parts)))
        if len(persons) == len(f.persons):
            frames.append(f if all(a is b for a, b in zip(persons, f.persons)) else replace(f, persons=tuple(persons)))
        else:
            frames.append(replace(f, persons=tuple(persons)))
    return replace(pred, frames=tuple(frames))


def validate(videos: Sequence[VideoAnnotation], taxonomy: Taxonomy,
             ground_truth: bool = True) -> ValidationReport:
    """Collect every invariant violation instead of stopping at the first.

    Predictions (``ground_truth=False``) may repeat a raw part inside one person.
    """
    out: list[Violation] = []

    def box_check(vid: str, box: BoundingBox, locus: str) -> None:
        if not box.is_ordered():
            out.append(Violation(vid, "box-order", locus, f"corners out of order {box.as_tuple()}"))
        elif box.area <= 0:
            out.append(Violation(vid, "degenerate-box", locus, f"zero area {box.as_tuple()}"))

    def score_check(vid: str, score: float, locus: str) -> None:
        if not 0.0 <= score <= 1.0:
            out.append(Violation(vid, "score-range", locus, f"score {score} outside [0, 1]"))

    seen_videos: set[str] = set()
    for vi, v in enumerate(videos):
        vloc = f"videos[{vi}]"
        if v.video_id in seen_videos:
            out.append(Violation(v.video_id, "duplicate-video", vloc, "video_id repeated"))
        seen_videos.add(v.video_id)
        if v.action not in taxonomy.video_actions:
            out.append(Violation(v.video_id, "unknown-name", vloc + ".action", v.action))
        if not v.frames:
            out.append(Violation(v.video_id, "no-frames", vloc, "video has no frames"))
        seen_frames: set[int] = set()
        prev = None
        for fi, f in enumerate(v.frames):
            floc = f"{vloc}.frames[{fi}]"
            if f.frame_id in seen_frames:
                out.append(Violation(v.video_id, "duplicate-frame", floc, f"frame_id {f.frame_id} repeated"))
            elif prev is not None and f.frame_id < prev:
                out.append(Violation(v.video_id, "frame-order", floc, f"frame_id {f.frame_id} after {prev}"))
            if f.frame_id < 0:
                out.append(Violation(v.video_id, "frame-id", floc, "negative frame_id"))
            seen_frames.add(f.frame_id)
            prev = f.frame_id
            for pi, p in enumerate(f.persons):
                ploc = f"{floc}.persons[{pi}]"
                box_check(v.video_id, p.box, ploc + ".box")
                score_check(v.video_id, p.score, ploc + ".score")
                seen_parts: set[str] = set()
                for qi, q in enumerate(p.parts):
                    qloc = f"{ploc}.parts[{qi}]"
                    if q.part not in taxonomy.raw_parts:
                        out.append(Violation(v.video_id, "unknown-name", qloc + ".part", q.part))
                    if q.state not in taxonomy.part_states:
                        out.append(Violation(v.video_id, "unknown-name", qloc + ".state", q.state))
                    if ground_truth and q.part in seen_parts:
                        out.append(Violation(v.video_id, "duplicate-part", qloc, f"{q.part} repeated in person"))
                    seen_parts.add(q.part)
                    box_check(v.video_id, q.box, qloc + ".box")
                    score_check(v.video_id, q.score, qloc + ".score")
    return ValidationReport(tuple(out))
