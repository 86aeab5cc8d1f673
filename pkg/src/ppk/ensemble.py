"""Weighted late fusion of per-class score vectors."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .errors import ClassMismatchError, MissingModelError

# Per-head fusion weights of the two-backbone CSN ensemble (IG-65M ip-CSN-152,
# Sports-1M ir-CSN-152). A zero weight is expressed by leaving the model out.
CSN_MODELS = ("ip-csn-152", "ir-csn-152")
CSN_ENSEMBLE_WEIGHTS: dict[str, dict[str, float]] = {
    "video": {"ip-csn-152": 7.0, "ir-csn-152": 1.0},
    "Head": {"ip-csn-152": 1.413, "ir-csn-152": 1.0},
    "Hand": {"ip-csn-152": 1.314, "ir-csn-152": 1.0},
    "Arm": {"ip-csn-152": 1.0},
    "Hip": {"ip-csn-152": 1.906, "ir-csn-152": 1.0},
    "Leg": {"ip-csn-152": 3.515, "ir-csn-152": 1.0},
    "Foot": {"ip-csn-152": 1.576, "ir-csn-152": 1.0},
}


@dataclass(frozen=True)
class ScoreVector:
    class_names: tuple[str, ...]
    scores: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "class_names", tuple(self.class_names))
        object.__setattr__(self, "scores", tuple(float(s) for s in self.scores))
        if len(self.class_names) != len(self.scores):
            raise ClassMismatchError("class_names and scores differ in length")
        if not all(math.isfinite(s) for s in self.scores):
            raise ValueError("scores must be finite")


@dataclass(frozen=True)
class FusionSpec:
    model_ids: tuple[str, ...]
    weights: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "model_ids", tuple(self.model_ids))
        object.__setattr__(self, "weights", tuple(float(w) for w in self.weights))
        if len(self.model_ids) != len(self.weights):
            raise ValueError("model_ids and weights differ in length")
        if not self.model_ids:
            raise ValueError("fusion needs at least one model")
        if len(set(self.model_ids)) != len(self.model_ids):
            raise ValueError("model ids must be unique")
        if not all(w > 0 and math.isfinite(w) for w in self.weights):
            raise ValueError("weights must be positive; drop a model instead of giving it weight 0")

    @classmethod
    def from_mapping(cls, weights: Mapping[str, float]) -> "FusionSpec":
        """Build from ``{model_id: weight}``; zero-weight entries are omitted."""
        kept = [(m, w) for m, w in weights.items() if w != 0]
        return cls(tuple(m for m, _ in kept), tuple(w for _, w in kept))

    def as_mapping(self) -> dict[str, float]:
        return dict(zip(self.model_ids, self.weights))


def fuse(vectors: Mapping[str, ScoreVector], spec: FusionSpec) -> ScoreVector:
    """fused[c] = sum over spec models (in spec order) of weight * score[c].

    Models present in ``vectors`` but absent from ``spec`` are ignored.
    """
    missing = [m for m in spec.model_ids if m not in vectors]
    if missing:
        raise MissingModelError(f"no scores for model(s) {missing}")
    classes = vectors[spec.model_ids[0]].class_names
    for m in spec.model_ids:
        if vectors[m].class_names != classes:
            raise ClassMismatchError(f"model {m!r} uses a different class list")
    fused = [0.0] * len(classes)
    for m, w in zip(spec.model_ids, spec.weights):
        s = vectors[m].scores
        for c in range(len(classes)):
            fused[c] += w * s[c]
    return ScoreVector(classes, tuple(fused))


def decide(v: ScoreVector) -> str:
    """Arg-max class; ties resolve to the earliest class."""
    if not v.scores:
        raise ValueError("cannot decide on an empty score vector")
    best = 0
    for i, s in enumerate(v.scores):
        if s > v.scores[best]:
            best = i
    return v.class_names[best]


def fuse_part_models(per_group_vectors: Mapping[str, Mapping[str, ScoreVector]],
                     per_group_specs: Mapping[str, FusionSpec]) -> dict[str, str]:
    return {g: decide(fuse(per_group_vectors.get(g, {}), spec)) for g, spec in per_group_specs.items()}


def csn_ensemble_specs(heads: Sequence[str] | None = None) -> dict[str, FusionSpec]:
    heads = heads or tuple(CSN_ENSEMBLE_WEIGHTS)
    return {h: FusionSpec.from_mapping(CSN_ENSEMBLE_WEIGHTS[h]) for h in heads}
