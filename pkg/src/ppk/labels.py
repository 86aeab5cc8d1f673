"""Frame-level part states to per-video part-group labels, long-tail
statistics and the most-frequent-state baseline.

The counting unit throughout is one part instance.
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Sequence

from .annotations import VideoAnnotation
from .errors import MissingGroupError
from .taxonomy import NONE_STATE, Taxonomy


@dataclass(frozen=True)
class PartLevelLabel:
    video_action: str
    group: str
    state: str

    @property
    def label_string(self) -> str:
        return f"{self.video_action}_{self.group}_{self.state}"

    @classmethod
    def parse(cls, label: str, taxonomy: Taxonomy) -> "PartLevelLabel":
        """Inverse of ``label_string``; names may themselves contain underscores."""
        for group in taxonomy.part_groups:
            marker = f"_{group}_"
            i = label.find(marker)
            while i != -1:
                action, state = label[:i], label[i + len(marker):]
                if action in taxonomy.video_actions and state in taxonomy.part_states:
                    return cls(action, group, state)
                i = label.find(marker, i + 1)
        raise ValueError(f"cannot split {label!r} into action/group/state")


@dataclass
class StateHistogram:
    counts: Counter

    def __init__(self, counts: Mapping[str, int] | None = None):
        self.counts = Counter(counts or {})

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def add(self, state: str, n: int = 1) -> None:
        self.counts[state] += n

    def merge(self, other: "StateHistogram") -> "StateHistogram":
        return StateHistogram(self.counts + other.counts)

    def modal(self, taxonomy: Taxonomy) -> str:
        """Most frequent state; ties go to the earlier state in taxonomy order.
        Empty histograms yield ``"none"``."""
        if not self.counts:
            return NONE_STATE
        return min(self.counts, key=lambda s: (-self.counts[s], taxonomy.state_rank(s)))

    def share(self, taxonomy: Taxonomy) -> float:
        total = self.total
        if total == 0:
            return 1.0
        return self.counts[self.modal(taxonomy)] / total


def group_histograms(videos: Iterable[VideoAnnotation], taxonomy: Taxonomy) -> dict[str, StateHistogram]:
    hists = {g: StateHistogram() for g in taxonomy.part_groups}
    for v in videos:
        for q in v.iter_parts():
            hists[taxonomy.group_of(q.part)].add(q.state)
    return hists


def derive_video_labels(video: VideoAnnotation, taxonomy: Taxonomy) -> list[PartLevelLabel]:
    hists = group_histograms([video], taxonomy)
    return [PartLevelLabel(video.action, g, hists[g].modal(taxonomy)) for g in taxonomy.part_groups]


@dataclass(frozen=True)
class LongTailRow:
    video_action: str
    group: str
    modal_state: str
    modal_count: int
    total: int
    share: float


def action_group_histograms(videos: Iterable[VideoAnnotation],
                            taxonomy: Taxonomy) -> dict[tuple[str, str], StateHistogram]:
    table: dict[tuple[str, str], StateHistogram] = {}
    for v in videos:
        for g, h in group_histograms([v], taxonomy).items():
            key = (v.action, g)
            table[key] = table[key].merge(h) if key in table else h
    return table


def long_tail_report(videos: Sequence[VideoAnnotation], taxonomy: Taxonomy) -> list[LongTailRow]:
    """Dominant-state share per (video action, group), for actions present."""
    table = action_group_histograms(videos, taxonomy)
    rows = []
    for action in taxonomy.video_actions:
        for g in taxonomy.part_groups:
            h = table.get((action, g))
            if h is None:
                continue
            modal = h.modal(taxonomy)
            rows.append(LongTailRow(action, g, modal, h.counts[modal], h.total, h.share(taxonomy)))
    return rows


def baseline_predict(gt_train: Sequence[VideoAnnotation], target: VideoAnnotation,
                     taxonomy: Taxonomy) -> VideoAnnotation:
    """Stamp every part of ``target`` with the training-modal state for its
    (video action, group). Falls back to the group's modal state over the
    whole corpus when the action never occurs in training."""
    table = action_group_histograms(gt_train, taxonomy)
    if any(a == target.action for a, _ in table):
        pick = {g: table[(target.action, g)].modal(taxonomy) for g in taxonomy.part_groups}
    else:
        pick = {g: h.modal(taxonomy) for g, h in group_histograms(gt_train, taxonomy).items()}
    return target.map_parts(lambda q: replace(q, state=pick[taxonomy.group_of(q.part)]))


def invert_labels(labels: Sequence[PartLevelLabel], target: VideoAnnotation,
                  taxonomy: Taxonomy) -> VideoAnnotation:
    """Write each group's video-level state back onto every frame-level part."""
    by_group = {lab.group: lab.state for lab in labels}

    def stamp(q):
        g = taxonomy.group_of(q.part)
        if g not in by_group:
            raise MissingGroupError(f"no label for group {g!r} in video {target.video_id!r}")
        return replace(q, state=by_group[g])

    return target.map_parts(stamp)
