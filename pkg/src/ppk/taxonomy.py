"""Name sets for video actions, body parts, part groups and part states."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from .errors import SchemaError, TaxonomyError

NONE_STATE = "none"

DEFAULT_VIDEO_ACTIONS = (
    "belly_dancing", "capoeira", "breakdancing", "tai_chi", "yoga", "zumba",
    "salsa_dancing", "tap_dancing", "swing_dancing", "cartwheeling",
    "somersaulting", "jumping_jacks", "push_up", "squat", "lunge", "situp",
    "deadlifting", "clean_and_jerk", "snatch_weight_lifting", "front_raises",
    "skipping_rope", "hula_hooping", "high_kick", "side_kick",
)

DEFAULT_RAW_PARTS = (
    "head", "left_hand", "right_hand", "left_arm", "right_arm",
    "hip", "left_leg", "right_leg", "left_foot", "right_foot",
)

DEFAULT_PART_GROUPS = ("Head", "Hand", "Arm", "Hip", "Leg", "Foot")

DEFAULT_GROUP_MAP = {
    "head": "Head",
    "left_hand": "Hand", "right_hand": "Hand",
    "left_arm": "Arm", "right_arm": "Arm",
    "hip": "Hip",
    "left_leg": "Leg", "right_leg": "Leg",
    "left_foot": "Foot", "right_foot": "Foot",
}

# 74 states; "none" first so it wins modal ties.
DEFAULT_PART_STATES = tuple("""
none turn shake nod tilt look_up look_down raise lower swing wave clap punch
push pull grab hold throw catch lift drop rotate bend stretch extend fold kick
step jump hop stomp slide walk run squat kneel lunge twist thrust sway bounce
circle flap point reach press tap cross open close spin shuffle drag flick slap
support lean straighten curl lock brace balance pivot skip land crouch rise sit
stand roll tuck shrug wiggle shimmy
""".split())


@dataclass(frozen=True, eq=True)
class Taxonomy:
    name: str
    video_actions: tuple[str, ...]
    raw_parts: tuple[str, ...]
    part_groups: tuple[str, ...]
    group_map: Mapping[str, str] = field(hash=False)
    part_states: tuple[str, ...]

    def __post_init__(self) -> None:
        for label, names in (
            ("video_actions", self.video_actions),
            ("raw_parts", self.raw_parts),
            ("part_groups", self.part_groups),
            ("part_states", self.part_states),
        ):
            if len(set(names)) != len(names):
                raise TaxonomyError("duplicate names", locus=label)
            if not names:
                raise TaxonomyError("must not be empty", locus=label)
        if NONE_STATE not in self.part_states:
            raise TaxonomyError(f"{NONE_STATE!r} missing", locus="part_states")
        if set(self.group_map) != set(self.raw_parts):
            raise TaxonomyError("group_map must cover exactly raw_parts", locus="group_map")
        unknown = set(self.group_map.values()) - set(self.part_groups)
        if unknown:
            raise TaxonomyError(f"unknown groups {sorted(unknown)}", locus="group_map")
        empty = set(self.part_groups) - set(self.group_map.values())
        if empty:
            raise TaxonomyError(f"groups without raw parts {sorted(empty)}", locus="group_map")
        object.__setattr__(self, "group_map", dict(self.group_map))

    def group_of(self, part: str) -> str:
        return self.group_map[part]

    def parts_in(self, group: str) -> tuple[str, ...]:
        return tuple(p for p in self.raw_parts if self.group_map[p] == group)

    def state_rank(self, state: str) -> int:
        return self._state_index()[state]

    def _state_index(self) -> dict[str, int]:
        idx = self.__dict__.get("_state_idx")
        if idx is None:
            idx = {s: i for i, s in enumerate(self.part_states)}
            object.__setattr__(self, "_state_idx", idx)
        return idx

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "video_actions": list(self.video_actions),
            "raw_parts": list(self.raw_parts),
            "part_groups": list(self.part_groups),
            "group_map": dict(self.group_map),
            "part_states": list(self.part_states),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], locus: str = "taxonomy") -> "Taxonomy":
        if not isinstance(data, Mapping):
            raise SchemaError("expected an object", locus=locus)
        try:
            return cls(
                name=str(data.get("name", "custom")),
                video_actions=tuple(data["video_actions"]),
                raw_parts=tuple(data["raw_parts"]),
                part_groups=tuple(data["part_groups"]),
                group_map=dict(data["group_map"]),
                part_states=tuple(data["part_states"]),
            )
        except KeyError as exc:
            raise SchemaError(f"missing field {exc.args[0]!r}", locus=locus) from None
        except TypeError as exc:
            raise SchemaError(str(exc), locus=locus) from None


def default_taxonomy() -> Taxonomy:
    return Taxonomy(
        name="default",
        video_actions=DEFAULT_VIDEO_ACTIONS,
        raw_parts=DEFAULT_RAW_PARTS,
        part_groups=DEFAULT_PART_GROUPS,
        group_map=DEFAULT_GROUP_MAP,
        part_states=DEFAULT_PART_STATES,
    )


def load_taxonomy(path: str | Path) -> Taxonomy:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise SchemaError(exc.msg, locus=str(path), line=exc.lineno) from None
    return Taxonomy.from_dict(data, locus=str(path))
