"""``ppk`` command line: one subcommand per pipeline stage."""
from __future__ import annotations

import argparse
import json
import os
import sys
import traceback
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from ._io import write_atomic
from .annotations import (dumps_canonical, load_annotations, read_json, save_annotations,
                          validate)
from .config import PipelineConfig, load_config
from .ensemble import FusionSpec, ScoreVector, decide, fuse
from .errors import InputError, MissingModelError, SchemaError
from .geometry import BoundingBox, PoseKeypoints, refine_person_box
from .labels import derive_video_labels, long_tail_report
from .render import augment_person, read_ppm, write_ppm
from .scorer import score_dataset
from .synthgen import CorruptionSpec, SynthShape, corrupt, generate

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3


@dataclass(frozen=True)
class CommandOutcome:
    exit_code: int
    report_path: str | None = None


def _write_json(path: str | Path, obj: Any) -> None:
    write_atomic(path, dumps_canonical(obj).encode("utf-8"))


def _err(msg: str) -> None:
    print(msg, file=sys.stderr)


def _parse_points(obj: Any, locus: str) -> PoseKeypoints:
    if not isinstance(obj, list):
        raise SchemaError("expected a list of 17 keypoints", locus=locus)
    rows = []
    for i, p in enumerate(obj):
        if isinstance(p, dict):
            p = [p.get("x"), p.get("y"), p.get("confidence")]
        if not (isinstance(p, list) and len(p) == 3
                and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in p)):
            raise SchemaError("keypoint must be [x, y, confidence]", locus=f"{locus}[{i}]")
        rows.append(p)
    try:
        return PoseKeypoints.from_xyc(rows)
    except ValueError as exc:
        raise SchemaError(str(exc), locus=locus) from None


# --- subcommands ---------------------------------------------------------------


def cmd_validate(args, cfg: PipelineConfig) -> CommandOutcome:
    videos = load_annotations(args.annotations, cfg.taxonomy, strict=False)
    report = validate(videos, cfg.taxonomy, ground_truth=not args.predictions)
    for v in report.violations:
        _err(str(v))
    if args.report:
        _write_json(args.report, report.to_dict())
    print(f"videos={len(videos)} violations={len(report)}")
    return CommandOutcome(EXIT_OK if report.ok else EXIT_INPUT, args.report)


def cmd_stats(args, cfg: PipelineConfig) -> CommandOutcome:
    videos = load_annotations(args.annotations, cfg.taxonomy)
    rows = long_tail_report(videos, cfg.taxonomy)
    d = args.delimiter
    lines = [d.join(("video_action", "group", "modal_state", "modal_count", "total", "share"))]
    lines += [d.join((r.video_action, r.group, r.modal_state, str(r.modal_count), str(r.total),
                      f"{r.share:.6f}")) for r in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        write_atomic(args.out, text.encode("utf-8"))
        print(f"rows={len(rows)} out={args.out}")
    else:
        sys.stdout.write(text)
    return CommandOutcome(EXIT_OK, args.out)


def cmd_transform_labels(args, cfg: PipelineConfig) -> CommandOutcome:
    videos = load_annotations(args.annotations, cfg.taxonomy)
    records = []
    for v in sorted(videos, key=lambda v: v.video_id):
        for lab in derive_video_labels(v, cfg.taxonomy):
            records.append({"video_id": v.video_id, "group": lab.group, "video_action": lab.video_action,
                            "state": lab.state, "label": lab.label_string})
    _write_json(args.out_labels, {"labels": records})
    print(f"videos={len(videos)} labels={len(records)}")
    return CommandOutcome(EXIT_OK, args.out_labels)


def cmd_refine_boxes(args, cfg: PipelineConfig) -> CommandOutcome:
    videos = load_annotations(args.annotations, cfg.taxonomy)
    doc = read_json(args.keypoints)
    if not isinstance(doc, dict) or not isinstance(doc.get("poses"), list):
        raise SchemaError("expected {\"poses\": [...]}", locus=str(args.keypoints))
    poses: dict[tuple[str, int, int], PoseKeypoints] = {}
    for i, entry in enumerate(doc["poses"]):
        loc = f"poses[{i}]"
        if not isinstance(entry, dict):
            raise SchemaError("expected an object", locus=loc)
        try:
            key = (str(entry["video_id"]), int(entry["frame_id"]), int(entry["person"]))
        except (KeyError, TypeError, ValueError):
            raise SchemaError("needs video_id, frame_id and person", locus=loc) from None
        poses[key] = _parse_points(entry.get("points"), loc + ".points")
    conf = cfg.conf_thresh_keypoints if args.conf_thresh is None else args.conf_thresh
    bounds = BoundingBox(0.0, 0.0, *map(float, args.image_size)) if args.image_size else None
    refined = 0
    out = []
    for v in videos:
        frames = []
        for f in v.frames:
            persons = []
            for pi, p in enumerate(f.persons):
                kp = poses.get((v.video_id, f.frame_id, pi))
                if kp is not None:
                    box = refine_person_box(p.box, kp, conf, bounds)
                    refined += box != p.box
                    p = replace(p, box=box)
                persons.append(p)
            frames.append(replace(f, persons=tuple(persons)))
        out.append(replace(v, frames=tuple(frames)))
    save_annotations(args.out, out, cfg.taxonomy)
    print(f"poses={len(poses)} boxes_changed={refined}")
    return CommandOutcome(EXIT_OK, args.out)


def cmd_render_pose(args, cfg: PipelineConfig) -> CommandOutcome:
    image = read_ppm(args.image)
    doc = read_json(args.keypoints)
    points = doc.get("points") if isinstance(doc, dict) else doc
    kp = _parse_points(points, str(args.keypoints))
    box = BoundingBox(*args.box) if args.box else image.bounds()
    if not box.is_ordered():
        raise InputError(f"box corners out of order: {box.as_tuple()}")
    out = augment_person(image, box, kp, cfg.render)
    write_ppm(args.out, out)
    print(f"crop={out.width}x{out.height} out={args.out}")
    return CommandOutcome(EXIT_OK, args.out)


def _load_fusion_specs(args, cfg: PipelineConfig) -> dict[str, FusionSpec]:
    specs = dict(cfg.fusion)
    if args.weights:
        doc = read_json(args.weights)
        doc = doc.get("fusion", doc) if isinstance(doc, dict) else doc
        if not isinstance(doc, dict):
            raise SchemaError("expected {head: {model_id: weight}}", locus=str(args.weights))
        for head, w in doc.items():
            try:
                specs[head] = FusionSpec.from_mapping({str(k): float(v) for k, v in w.items()})
            except (AttributeError, TypeError, ValueError) as exc:
                raise SchemaError(str(exc), locus=f"{args.weights}:{head}") from None
    return specs


def cmd_fuse(args, cfg: PipelineConfig) -> CommandOutcome:
    doc = read_json(args.scores)
    records = doc.get("records") if isinstance(doc, dict) else None
    if not isinstance(records, list):
        raise SchemaError("expected {\"records\": [...]}", locus=str(args.scores))
    table: dict[tuple[str, str], dict[str, ScoreVector]] = {}
    for i, r in enumerate(records):
        loc = f"records[{i}]"
        try:
            key = (str(r["video_id"]), str(r["head"]))
            vec = ScoreVector(tuple(r["classes"]), tuple(r["scores"]))
            model = str(r["model_id"])
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad score record: {exc}", locus=loc) from None
        if model in table.setdefault(key, {}):
            raise SchemaError(f"duplicate record for model {model!r}", locus=loc)
        table[key][model] = vec
    specs = _load_fusion_specs(args, cfg)
    out = []
    for (video_id, head) in sorted(table):
        spec = specs.get(head)
        if spec is None:
            raise MissingModelError(f"no fusion weights for head {head!r}")
        out.append({"video_id": video_id, "head": head, "label": decide(fuse(table[(video_id, head)], spec))})
    _write_json(args.out_labels, {"labels": out})
    print(f"decisions={len(out)}")
    return CommandOutcome(EXIT_OK, args.out_labels)


def cmd_score(args, cfg: PipelineConfig) -> CommandOutcome:
    sc = cfg.scoring
    overrides = {}
    if args.human_iou is not None:
        overrides["human_iou_thresh"] = args.human_iou
    if args.part_iou is not None:
        overrides["part_iou_thresh"] = args.part_iou
    if args.per_part_macro:
        overrides["per_part_macro"] = True
    try:
        sc = replace(sc, **overrides)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    gts = load_annotations(args.gt, cfg.taxonomy)
    preds = load_annotations(args.pred, cfg.taxonomy)
    report = score_dataset(gts, preds, sc, jobs=args.jobs)
    if args.report:
        _write_json(args.report, report.to_dict())
    print(f"final_score={report.final_score:.4f} video_accuracy={report.video_accuracy:.4f} "
          f"part_accuracy={report.part_accuracy:.4f} videos={len(report.per_video)}")
    return CommandOutcome(EXIT_OK, args.report)


def cmd_gen_synth(args, cfg: PipelineConfig) -> CommandOutcome:
    if args.corrupt and not args.out_pred:
        raise InputError("--corrupt requires --out-pred")
    try:
        shape = SynthShape(args.frames, args.persons, args.state_skew)
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.videos < 1:
        raise InputError("--videos must be >= 1")
    gt = generate(args.seed, args.videos, cfg.taxonomy, shape)
    save_annotations(args.out, gt, cfg.taxonomy)
    summary = f"videos={len(gt)} out={args.out}"
    if args.corrupt:
        raw = read_json(args.corrupt)
        if not isinstance(raw, dict):
            raise SchemaError("expected an object", locus=str(args.corrupt))
        raw = dict(raw)
        raw.setdefault("seed", args.seed)
        try:
            spec = CorruptionSpec(**raw)
        except (TypeError, ValueError) as exc:
            raise SchemaError(str(exc), locus=str(args.corrupt)) from None
        save_annotations(args.out_pred, corrupt(gt, spec, cfg.taxonomy), cfg.taxonomy)
        summary += f" out_pred={args.out_pred}"
    print(summary)
    return CommandOutcome(EXIT_OK, args.out)


# --- parser --------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="pipeline config (JSON); falls back to $PPK_CONFIG")
    common.add_argument("--jobs", type=int, default=os.cpu_count() or 1,
                        help="worker processes for per-video work (default: CPU count)")

    parser = argparse.ArgumentParser(prog="ppk", description="Part-level action parsing toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("validate", parents=[common], help="check an annotation file")
    p.add_argument("--annotations", required=True)
    p.add_argument("--predictions", action="store_true", help="allow repeated parts per person")
    p.add_argument("--report")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", parents=[common], help="long-tail dominant-state table")
    p.add_argument("--annotations", required=True)
    p.add_argument("--out")
    p.add_argument("--delimiter", default="\t")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("transform-labels", parents=[common], help="derive per-video part-group labels")
    p.add_argument("--annotations", required=True)
    p.add_argument("--out-labels", required=True)
    p.set_defaults(func=cmd_transform_labels)

    p = sub.add_parser("refine-boxes", parents=[common], help="grow person boxes around confident keypoints")
    p.add_argument("--annotations", required=True)
    p.add_argument("--keypoints", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--conf-thresh", type=float)
    p.add_argument("--image-size", type=float, nargs=2, metavar=("W", "H"))
    p.set_defaults(func=cmd_refine_boxes)

    p = sub.add_parser("render-pose", parents=[common], help="crop a person and draw keypoint dots")
    p.add_argument("--image", required=True)
    p.add_argument("--keypoints", required=True)
    p.add_argument("--box", type=float, nargs=4, metavar=("X1", "Y1", "X2", "Y2"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render_pose)

    p = sub.add_parser("fuse", parents=[common], help="weighted late fusion of model scores")
    p.add_argument("--scores", required=True)
    p.add_argument("--weights")
    p.add_argument("--out-labels", required=True)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("score", parents=[common], help="challenge score of predictions")
    p.add_argument("--gt", required=True)
    p.add_argument("--pred", required=True)
    p.add_argument("--human-iou", type=float)
    p.add_argument("--part-iou", type=float)
    p.add_argument("--per-part-macro", action="store_true")
    p.add_argument("--report")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("gen-synth", parents=[common], help="generate a synthetic corpus")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--videos", type=int, required=True)
    p.add_argument("--frames", type=int, default=SynthShape.frames_per_video)
    p.add_argument("--persons", type=int, default=SynthShape.persons_per_frame)
    p.add_argument("--state-skew", type=float, default=SynthShape.state_skew)
    p.add_argument("--out", required=True)
    p.add_argument("--corrupt", help="corruption spec (JSON)")
    p.add_argument("--out-pred")
    p.set_defaults(func=cmd_gen_synth)
    return parser


def run(argv: Sequence[str] | None = None) -> CommandOutcome:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else EXIT_INPUT
        return CommandOutcome(code)
    if args.command is None:
        parser.print_usage(sys.stderr)
        return CommandOutcome(EXIT_INPUT)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except InputError as exc:
        _err(f"error: {exc}")
        return CommandOutcome(EXIT_INPUT)
    except OSError as exc:
        _err(f"error: {exc}")
        return CommandOutcome(EXIT_INPUT)
    except Exception:  # noqa: BLE001
        traceback.print_exc()
        return CommandOutcome(EXIT_INTERNAL)


def main(argv: Sequence[str] | None = None) -> None:
    sys.exit(run(argv).exit_code)


if __name__ == "__main__":
    main()
