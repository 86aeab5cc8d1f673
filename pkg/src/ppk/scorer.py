"""Challenge scorer: video-action accuracy gated part-state accuracy.

Per frame, predicted persons are matched to ground truth at the human IoU
threshold; inside each matched pair, parts of the same raw-part name are
matched at the part IoU threshold. A ground-truth part is correct when it
is matched and the predicted state agrees. Per video, the part-state
accuracy counts only when the predicted video action is right.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .annotations import FrameAnnotation, VideoAnnotation, apply_topk
from .errors import IdMismatchError, MissingVideoError
from .geometry import greedy_match
from .taxonomy import Taxonomy

HUMAN_IOU_THRESH = 0.5
PART_IOU_THRESH = 0.3
TOP_K_PERSONS = 10
TOP_K_PARTS = 1


@dataclass(frozen=True)
class ScoringConfig:
    human_iou_thresh: float = HUMAN_IOU_THRESH
    part_iou_thresh: float = PART_IOU_THRESH
    k_person: int = TOP_K_PERSONS
    k_part_per_class: int = TOP_K_PARTS
    per_part_macro: bool = False

    def __post_init__(self) -> None:
        for name in ("human_iou_thresh", "part_iou_thresh"):
            v = getattr(self, name)
            if not 0.0 < v <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {v}")
        for name in ("k_person", "k_part_per_class"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < 1:
                raise ValueError(f"{name} must be an integer >= 1, got {v!r}")


@dataclass
class VideoScore:
    video_id: str
    video_correct: bool
    part_state_accuracy: float
    matched_parts: int
    correct_parts: int
    total_gt_parts: int
    # raw part -> [correct, total]
    per_part: dict[str, list[int]] = field(default_factory=dict)

    @property
    def contribution(self) -> float:
        return self.part_state_accuracy if self.video_correct else 0.0

    def to_dict(self) -> dict[str, Any]:
        return {
            "video_correct": self.video_correct,
            "part_state_accuracy": self.part_state_accuracy,
            "matched_parts": self.matched_parts,
            "correct_parts": self.correct_parts,
            "total_gt_parts": self.total_gt_parts,
            "per_part": {k: list(v) for k, v in sorted(self.per_part.items())},
        }


@dataclass
class ScoreReport:
    per_video: dict[str, VideoScore]
    video_accuracy: float
    final_score: float
    part_accuracy: float
    averaging: str = "micro"

    def group_accuracy(self, taxonomy: Taxonomy) -> dict[str, float]:
        """Ungated state accuracy per part group, pooled over all videos."""
        tally = {g: [0, 0] for g in taxonomy.part_groups}
        for vs in self.per_video.values():
            for part, (c, t) in vs.per_part.items():
                g = tally[taxonomy.group_of(part)]
                g[0] += c
                g[1] += t
        return {g: (c / t if t else 1.0) for g, (c, t) in tally.items()}

    def to_dict(self) -> dict[str, Any]:
        return {
            "averaging": self.averaging,
            "final_score": self.final_score,
            "video_accuracy": self.video_accuracy,
            "part_accuracy": self.part_accuracy,
            "n_videos": len(self.per_video),
            "per_video": {k: self.per_video[k].to_dict() for k in sorted(self.per_video)},
        }


def _score_frame(gt: FrameAnnotation, pred: FrameAnnotation | None, cfg: ScoringConfig,
                 tally: dict[str, list[int]]) -> int:
    """Accumulate per-part [correct, total] into ``tally``; return matched count."""
    for person in gt.persons:
        for q in person.parts:
            tally.setdefault(q.part, [0, 0])[1] += 1
    if pred is None or not pred.persons or not gt.persons:
        return 0
    persons = greedy_match([(p.box, p.score) for p in pred.persons],
                           [g.box for g in gt.persons], cfg.human_iou_thresh)
    matched = 0
    for pi, gi, _ in persons.pairs:
        p_person, g_person = pred.persons[pi], gt.persons[gi]
        pred_by_part: dict[str, list] = {}
        for q in p_person.parts:
            pred_by_part.setdefault(q.part, []).append(q)
        gt_by_part: dict[str, list] = {}
        for q in g_person.parts:
            gt_by_part.setdefault(q.part, []).append(q)
        for name, gparts in gt_by_part.items():
            pparts = pred_by_part.get(name)
            if not pparts:
                continue
            res = greedy_match([(q.box, q.score) for q in pparts], [q.box for q in gparts],
                               cfg.part_iou_thresh)
            for a, b, _ in res.pairs:
                matched += 1
                if pparts[a].state == gparts[b].state:
                    tally[name][0] += 1
    return matched


def score_video(gt: VideoAnnotation, pred: VideoAnnotation, cfg: ScoringConfig = ScoringConfig()) -> VideoScore:
    if gt.video_id != pred.video_id:
        raise IdMismatchError(f"ground truth {gt.video_id!r} scored against prediction {pred.video_id!r}")
    pred = apply_topk(pred, cfg.k_person, cfg.k_part_per_class)
    pred_frames = {f.frame_id: f for f in pred.frames}
    tally: dict[str, list[int]] = {}
    matched = 0
    for f in gt.frames:
        matched += _score_frame(f, pred_frames.get(f.frame_id), cfg, tally)
    correct = sum(c for c, _ in tally.values())
    total = sum(t for _, t in tally.values())
    if cfg.per_part_macro:
        accs = [c / t for c, t in tally.values() if t]
        accuracy = sum(accs) / len(accs) if accs else 1.0
    else:
        accuracy = correct / total if total else 1.0
    return VideoScore(gt.video_id, pred.action == gt.action, accuracy, matched, correct, total, tally)


def _score_pair(args):
    gt, pred, cfg = args
    return score_video(gt, pred, cfg)


def score_dataset(gts: Sequence[VideoAnnotation], preds: Sequence[VideoAnnotation],
                  cfg: ScoringConfig = ScoringConfig(), jobs: int = 1) -> ScoreReport:
    """Final score = mean over videos of (action correct) * part-state accuracy.

    Predictions are aligned to ground truth by video_id, so list order is free.
    """
    pred_by_id: Mapping[str, VideoAnnotation] = {p.video_id: p for p in preds}
    gt_ids = [g.video_id for g in gts]
    missing = sorted(set(gt_ids) - set(pred_by_id))
    extra = sorted(set(pred_by_id) - set(gt_ids))
    if missing or extra:
        raise MissingVideoError(f"video ids differ: missing predictions {missing[:5]}, "
                                f"unknown predictions {extra[:5]}")
    work = [(g, pred_by_id[g.video_id], cfg) for g in sorted(gts, key=lambda v: v.video_id)]
    if jobs > 1 and len(work) >= 64:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            scores = list(pool.map(_score_pair, work, chunksize=max(1, len(work) // (4 * jobs))))
    else:
        scores = [_score_pair(w) for w in work]
    n = len(scores)
    correct_parts = sum(s.correct_parts for s in scores)
    total_parts = sum(s.total_gt_parts for s in scores)
    return ScoreReport(
        per_video={s.video_id: s for s in scores},
        video_accuracy=sum(s.video_correct for s in scores) / n if n else 0.0,
        final_score=sum(s.contribution for s in scores) / n if n else 0.0,
        part_accuracy=correct_parts / total_parts if total_parts else 1.0,
        averaging="macro" if cfg.per_part_macro else "micro",
    )
