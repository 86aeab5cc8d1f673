"""Seeded synthetic corpora and controlled corruption of them.

Randomness comes from :class:`LCG64`, a 64-bit linear congruential generator
(multiplier 6364136223846793005, increment 1442695040888963407, modulus 2**64)
whose outputs use only the high bits. Each video draws from its own stream
seeded with ``splitmix64(seed ^ video_index ^ purpose_salt)``, so videos can
be generated independently and in any order.
"""
from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

from .annotations import FrameAnnotation, PartInstance, PersonInstance, VideoAnnotation
from .geometry import BoundingBox
from .taxonomy import Taxonomy

MASK64 = (1 << 64) - 1
LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407

SALT_VIDEO = 0x5649444556494445
SALT_CORPUS = 0x434F52505553434F
SALT_CORRUPT = 0x434F525255505421

MIN_SIDE = 2.0
GRID = 16  # coordinates are multiples of 1/GRID px


def splitmix64(x: int) -> int:
    x = (x + 0x9E3779B97F4A7C15) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


class LCG64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    @classmethod
    def substream(cls, seed: int, index: int, salt: int) -> "LCG64":
        return cls(splitmix64((seed ^ index ^ salt) & MASK64))

    def next_u64(self) -> int:
        self.state = (self.state * LCG_MULTIPLIER + LCG_INCREMENT) & MASK64
        return self.state

    def random(self) -> float:
        """Uniform on [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * (1.0 / (1 << 53))

    def below(self, n: int) -> int:
        """Uniform integer in [0, n) from the top 32 bits (multiply-shift)."""
        if n <= 0:
            raise ValueError("n must be positive")
        return ((self.next_u64() >> 32) * n) >> 32

    def uniform(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.random()


@dataclass(frozen=True)
class SynthShape:
    frames_per_video: int = 5
    persons_per_frame: int = 2
    state_skew: float = 0.8
    canvas_width: float = 640.0
    canvas_height: float = 360.0

    def __post_init__(self) -> None:
        if self.frames_per_video < 1 or self.persons_per_frame < 1:
            raise ValueError("frames_per_video and persons_per_frame must be >= 1")
        if not 0.0 <= self.state_skew <= 1.0:
            raise ValueError("state_skew must lie in [0, 1]")
        if self.canvas_width < 32 * self.persons_per_frame or self.canvas_height < 32:
            raise ValueError("canvas too small for the requested persons")


@dataclass(frozen=True)
class CorruptionSpec:
    seed: int
    state_flip_rate: float = 0.0
    box_jitter: float = 0.0
    video_label_error_rate: float = 0.0
    drop_person_rate: float = 0.0

    def __post_init__(self) -> None:
        for name in ("state_flip_rate", "video_label_error_rate", "drop_person_rate"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1]")
        if self.box_jitter < 0:
            raise ValueError("box_jitter must be >= 0")


def _q(v: float) -> float:
    return int(v * GRID) / GRID


def _sub_box(rng: LCG64, x1: float, y1: float, x2: float, y2: float,
             min_frac: float, max_frac: float) -> BoundingBox:
    w = max(MIN_SIDE * 4, _q((x2 - x1) * rng.uniform(min_frac, max_frac)))
    h = max(MIN_SIDE * 4, _q((y2 - y1) * rng.uniform(min_frac, max_frac)))
    bx = _q(x1 + (x2 - x1 - w) * rng.random())
    by = _q(y1 + (y2 - y1 - h) * rng.random())
    return BoundingBox(bx, by, bx + w, by + h)


def modal_states(seed: int, taxonomy: Taxonomy) -> dict[tuple[str, str], str]:
    """Dominant state per (video action, group), drawn once per corpus seed."""
    rng = LCG64.substream(seed, 0, SALT_CORPUS)
    states = taxonomy.part_states
    return {(a, g): states[rng.below(len(states))]
            for a in taxonomy.video_actions for g in taxonomy.part_groups}


def _other_state(rng: LCG64, states: Sequence[str], current: str) -> str:
    i = rng.below(len(states) - 1)
    j = states.index(current)
    return states[i + 1] if i >= j else states[i]


def generate_video(seed: int, index: int, taxonomy: Taxonomy, shape: SynthShape,
                   modal: dict[tuple[str, str], str]) -> VideoAnnotation:
    rng = LCG64.substream(seed, index, SALT_VIDEO)
    action = taxonomy.video_actions[rng.below(len(taxonomy.video_actions))]
    states = taxonomy.part_states
    slot_w = shape.canvas_width / shape.persons_per_frame
    frames = []
    for fi in range(shape.frames_per_video):
        persons = []
        for pi in range(shape.persons_per_frame):
            # one horizontal slot per person keeps person boxes disjoint
            box = _sub_box(rng, pi * slot_w, 0.0, (pi + 1) * slot_w, shape.canvas_height, 0.5, 0.95)
            parts = []
            for part in taxonomy.raw_parts:
                pbox = _sub_box(rng, box.x1, box.y1, box.x2, box.y2, 0.1, 0.35)
                dominant = modal[(action, taxonomy.group_of(part))]
                if rng.random() < shape.state_skew or len(states) == 1:
                    state = dominant
                else:
                    state = _other_state(rng, states, dominant)
                parts.append(PartInstance(part, pbox, state, 1.0))
            persons.append(PersonInstance(box, 1.0, tuple(parts)))
        frames.append(FrameAnnotation(fi, tuple(persons)))
    return VideoAnnotation(f"synth_{seed}_{index:06d}", action, tuple(frames))


def generate(seed: int, n_videos: int, taxonomy: Taxonomy, shape: SynthShape = SynthShape()) -> list[VideoAnnotation]:
    if n_videos < 1:
        raise ValueError("n_videos must be >= 1")
    modal = modal_states(seed, taxonomy)
    return [generate_video(seed, i, taxonomy, shape, modal) for i in range(n_videos)]


def _jitter_box(rng: LCG64, box: BoundingBox, jitter: float) -> BoundingBox:
    x1 = box.x1 + jitter * (2.0 * rng.random() - 1.0)
    y1 = box.y1 + jitter * (2.0 * rng.random() - 1.0)
    x2 = box.x2 + jitter * (2.0 * rng.random() - 1.0)
    y2 = box.y2 + jitter * (2.0 * rng.random() - 1.0)
    if jitter == 0.0:
        return box
    if x2 - x1 < MIN_SIDE:
        cx = (x1 + x2) / 2.0
        x1, x2 = cx - MIN_SIDE / 2.0, cx + MIN_SIDE / 2.0
    if y2 - y1 < MIN_SIDE:
        cy = (y1 + y2) / 2.0
        y1, y2 = cy - MIN_SIDE / 2.0, cy + MIN_SIDE / 2.0
    return BoundingBox(x1, y1, x2, y2)


def corrupt_video(video: VideoAnnotation, index: int, spec: CorruptionSpec, taxonomy: Taxonomy) -> VideoAnnotation:
    # Every draw happens regardless of the rates so streams stay aligned.
    rng = LCG64.substream(spec.seed, index, SALT_CORRUPT)
    states = taxonomy.part_states
    action_flip = rng.random() < spec.video_label_error_rate
    wrong_action = _other_state(rng, taxonomy.video_actions, video.action) if len(taxonomy.video_actions) > 1 else video.action
    action = wrong_action if action_flip else video.action
    frames = []
    for f in video.frames:
        persons = []
        for p in f.persons:
            dropped = rng.random() < spec.drop_person_rate
            pbox = _jitter_box(rng, p.box, spec.box_jitter)
            parts = []
            for q in p.parts:
                flip = rng.random() < spec.state_flip_rate
                other = _other_state(rng, states, q.state) if len(states) > 1 else q.state
                qbox = _jitter_box(rng, q.box, spec.box_jitter)
                if not flip and qbox is q.box:
                    parts.append(q)
                else:
                    parts.append(replace(q, box=qbox, state=other if flip else q.state))
            if not dropped:
                persons.append(replace(p, box=pbox, parts=tuple(parts)))
        frames.append(replace(f, persons=tuple(persons)))
    return replace(video, action=action, frames=tuple(frames))


def corrupt(gt: Sequence[VideoAnnotation], spec: CorruptionSpec, taxonomy: Taxonomy) -> list[VideoAnnotation]:
    """Predictions derived from ``gt``: flipped states, jittered boxes, wrong
    video actions and dropped persons at the rates in ``spec``."""
    return [corrupt_video(v, i, spec, taxonomy) for i, v in enumerate(gt)]
