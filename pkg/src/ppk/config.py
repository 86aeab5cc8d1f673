"""Pipeline configuration file (JSON).

Every key is optional; an empty file gives the defaults::

    {
      "taxonomy": "default" | "path/to/taxonomy.json" | {inline taxonomy},
      "scoring": {"human_iou_thresh": 0.5, "part_iou_thresh": 0.3,
                  "k_person": 10, "k_part_per_class": 1, "per_part_macro": false},
      "render": {"palette": [[r, g, b], ...17], "min_px": 2,
                 "fraction_of_long_side": 0.01, "conf_thresh": 0.3},
      "fusion": {"video": {"ip-csn-152": 1.0, "ir-csn-152": 1.0}, "Head": {...}, ...},
      "conf_thresh_keypoints": 0.3
    }
"""
from __future__ import annotations

import json
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

from ._io import write_atomic
from .annotations import dumps_canonical
from .ensemble import CSN_MODELS, FusionSpec
from .errors import ConfigError, SchemaError
from .geometry import DEFAULT_KEYPOINT_CONF
from .render import RenderStyle
from .scorer import ScoringConfig
from .taxonomy import Taxonomy, default_taxonomy, load_taxonomy

ENV_VAR = "PPK_CONFIG"


def default_fusion(taxonomy: Taxonomy) -> dict[str, FusionSpec]:
    return {h: FusionSpec(CSN_MODELS, (1.0,) * len(CSN_MODELS))
            for h in ("video", *taxonomy.part_groups)}


@dataclass(frozen=True)
class PipelineConfig:
    taxonomy: Taxonomy = field(default_factory=default_taxonomy)
    scoring: ScoringConfig = field(default_factory=ScoringConfig)
    render: RenderStyle = field(default_factory=RenderStyle)
    fusion: Mapping[str, FusionSpec] = field(default_factory=dict)
    conf_thresh_keypoints: float = DEFAULT_KEYPOINT_CONF
    taxonomy_source: Any = field(default="default", compare=False)

    def __post_init__(self) -> None:
        if not self.fusion:
            object.__setattr__(self, "fusion", default_fusion(self.taxonomy))
        heads = {"video", *self.taxonomy.part_groups}
        unknown = set(self.fusion) - heads
        if unknown:
            raise ConfigError(f"unknown fusion heads {sorted(unknown)}", locus="fusion")
        if not 0.0 <= self.conf_thresh_keypoints <= 1.0:
            raise ConfigError("must lie in [0, 1]", locus="conf_thresh_keypoints")

    def _taxonomy_ref(self) -> Any:
        if self.taxonomy == default_taxonomy():
            return "default"
        if isinstance(self.taxonomy_source, str) and self.taxonomy_source != "default":
            return self.taxonomy_source
        return self.taxonomy.to_dict()

    def to_dict(self) -> dict[str, Any]:
        render = asdict(self.render)
        render["palette"] = [list(c) for c in self.render.palette]
        return {
            "taxonomy": self._taxonomy_ref(),
            "scoring": asdict(self.scoring),
            "render": render,
            "fusion": {h: s.as_mapping() for h, s in sorted(self.fusion.items())},
            "conf_thresh_keypoints": self.conf_thresh_keypoints,
        }


def _section(cls, data: Any, locus: str, convert=None):
    if data is None:
        return cls()
    if not isinstance(data, Mapping):
        raise ConfigError("expected an object", locus=locus)
    known = {f.name for f in fields(cls)}
    unknown = set(data) - known
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}", locus=locus)
    kwargs = dict(data)
    if convert:
        kwargs = convert(kwargs)
    try:
        return cls(**kwargs)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc), locus=locus) from None


def _render_kwargs(kw: dict) -> dict:
    if "palette" in kw:
        kw["palette"] = tuple(tuple(c) for c in kw["palette"])
    return kw


def config_from_dict(data: Mapping[str, Any], base_dir: Path | None = None) -> PipelineConfig:
    if not isinstance(data, Mapping):
        raise ConfigError("config must be an object", locus="<root>")
    allowed = {"taxonomy", "scoring", "render", "fusion", "conf_thresh_keypoints"}
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown keys {sorted(unknown)}", locus="<root>")

    tax_src = data.get("taxonomy", "default")
    try:
        if tax_src == "default":
            taxonomy = default_taxonomy()
        elif isinstance(tax_src, str):
            p = Path(tax_src)
            if not p.is_absolute() and base_dir is not None:
                p = base_dir / p
            taxonomy = load_taxonomy(p)
        else:
            taxonomy = Taxonomy.from_dict(tax_src)
    except SchemaError as exc:
        raise ConfigError(str(exc), locus="taxonomy") from None
    except OSError as exc:
        raise ConfigError(str(exc), locus="taxonomy") from None

    scoring = _section(ScoringConfig, data.get("scoring"), "scoring")
    conf = data.get("conf_thresh_keypoints", DEFAULT_KEYPOINT_CONF)
    if isinstance(conf, bool) or not isinstance(conf, (int, float)):
        raise ConfigError("expected a number", locus="conf_thresh_keypoints")
    render = _section(RenderStyle, data.get("render"), "render", _render_kwargs)

    fusion_raw = data.get("fusion", {})
    if not isinstance(fusion_raw, Mapping):
        raise ConfigError("expected an object", locus="fusion")
    fusion = default_fusion(taxonomy)
    for head, weights in fusion_raw.items():
        if not isinstance(weights, Mapping):
            raise ConfigError("expected {model_id: weight}", locus=f"fusion.{head}")
        try:
            fusion[head] = FusionSpec.from_mapping({str(k): float(v) for k, v in weights.items()})
        except (TypeError, ValueError) as exc:
            raise ConfigError(str(exc), locus=f"fusion.{head}") from None

    return PipelineConfig(taxonomy, scoring, render, fusion, float(conf), tax_src)


def load_config(path: str | Path | None = None) -> PipelineConfig:
    """Read a config file; ``None`` falls back to $PPK_CONFIG, then defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return PipelineConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(str(exc), locus=str(path)) from None
    if not text.strip():
        return PipelineConfig()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(exc.msg, locus=str(path), line=exc.lineno) from None
    return config_from_dict(data, path.parent)


def save_config(path: str | Path, cfg: PipelineConfig) -> None:
    write_atomic(path, dumps_canonical(cfg.to_dict()).encode("utf-8"))
