import random
from dataclasses import replace

import pytest

from ppk.annotations import FrameAnnotation, PartInstance, PersonInstance, VideoAnnotation
from ppk.errors import MissingGroupError
from ppk.geometry import BoundingBox
from ppk.labels import (PartLevelLabel, StateHistogram, baseline_predict, derive_video_labels,
                        invert_labels, long_tail_report)
from ppk.synthgen import SynthShape, generate

from oracles import modal_by_count_sort

BOX = BoundingBox(0, 0, 10, 10)


def make_video(action, parts_per_frame, video_id="v"):
    """parts_per_frame: list of frames, each a list of (part, state)."""
    frames = tuple(
        FrameAnnotation(i, (PersonInstance(BOX, 1.0, tuple(PartInstance(p, BOX, s) for p, s in f)),))
        for i, f in enumerate(parts_per_frame))
    return VideoAnnotation(video_id, action, frames)


def labels_of(video, taxonomy):
    return {lab.group: lab for lab in derive_video_labels(video, taxonomy)}


def test_belly_dancing_head_none(taxonomy):
    v = make_video("belly_dancing", [[("head", "none")], [("head", "none")], [("head", "shake")]])
    assert labels_of(v, taxonomy)["Head"].label_string == "belly_dancing_Head_none"


def test_empty_group_defaults_to_none(taxonomy):
    v = make_video("yoga", [[("head", "nod")]])
    assert labels_of(v, taxonomy)["Hip"].label_string == "yoga_Hip_none"


def test_one_label_per_group_in_order(taxonomy):
    v = make_video("yoga", [[("left_hand", "wave"), ("right_hand", "wave"), ("left_arm", "raise")]])
    labs = derive_video_labels(v, taxonomy)
    assert [l.group for l in labs] == list(taxonomy.part_groups)
    assert labels_of(v, taxonomy)["Hand"].state == "wave"


def test_tie_goes_to_taxonomy_order(taxonomy):
    # "turn" precedes "shake" in the default state order
    v = make_video("yoga", [[("head", "shake")], [("head", "turn")]])
    assert labels_of(v, taxonomy)["Head"].state == "turn"


def test_modal_matches_count_sort_oracle(taxonomy):
    rng = random.Random(2)
    states = list(taxonomy.part_states[:6])
    for _ in range(30):
        frames = [[(rng.choice(taxonomy.raw_parts), rng.choice(states)) for _ in range(10)] for _ in range(20)]
        v = make_video("zumba", frames)
        got = labels_of(v, taxonomy)
        for g in taxonomy.part_groups:
            seen = [s for f in frames for p, s in f if taxonomy.group_of(p) == g]
            assert got[g].state == modal_by_count_sort(seen, list(taxonomy.part_states))
        shuffled = make_video("zumba", [rng.sample(f, len(f)) for f in rng.sample(frames, len(frames))])
        assert derive_video_labels(shuffled, taxonomy) == derive_video_labels(v, taxonomy)


def test_label_parse_round_trip(taxonomy):
    lab = PartLevelLabel("belly_dancing", "Head", "look_up")
    assert PartLevelLabel.parse(lab.label_string, taxonomy) == lab


# --- long tail -----------------------------------------------------------------

def test_long_tail_share_0965(taxonomy):
    frames = [[("head", "none")]] * 193 + [[("head", "nod")]] * 7
    rows = {(r.video_action, r.group): r for r in long_tail_report([make_video("capoeira", frames)], taxonomy)}
    head = rows[("capoeira", "Head")]
    assert (head.modal_state, head.modal_count, head.total) == ("none", 193, 200)
    assert head.share == pytest.approx(0.965, abs=1e-12)
    assert rows[("capoeira", "Hip")].share == 1.0  # no instances


def test_long_tail_single_state_and_uniform(taxonomy):
    single = make_video("yoga", [[("hip", "sway")]] * 9)
    assert {r.share for r in long_tail_report([single], taxonomy)} == {1.0}
    even = make_video("yoga", [[("hip", "sway")], [("hip", "turn")]] * 5)
    rows = {r.group: r for r in long_tail_report([even], taxonomy)}
    assert rows["Hip"].share == 0.5


def test_histogram_merge_commutes():
    a = StateHistogram({"none": 3, "nod": 1})
    b = StateHistogram({"nod": 4})
    assert a.merge(b).counts == b.merge(a).counts
    assert a.merge(b).total == 8


# --- baseline ----------------------------------------------------------------

def test_baseline_hip_turn(taxonomy):
    train = [make_video("belly_dancing", [[("hip", "turn")], [("hip", "turn")], [("hip", "sway")]], "t0"),
             make_video("yoga", [[("hip", "sit")]], "t1")]
    target = make_video("belly_dancing", [[("hip", "none"), ("head", "nod")]] * 4, "x")
    pred = baseline_predict(train, target, taxonomy)
    assert {q.state for q in pred.iter_parts() if q.part == "hip"} == {"turn"}
    assert {q.state for q in pred.iter_parts() if q.part == "head"} == {"none"}


def test_baseline_unknown_action_uses_global(taxonomy):
    train = [make_video("yoga", [[("hip", "sit")]] * 3, "a"), make_video("zumba", [[("hip", "sway")]], "b")]
    target = make_video("capoeira", [[("hip", "none")]], "x")
    assert next(baseline_predict(train, target, taxonomy).iter_parts()).state == "sit"


def test_baseline_accuracy_equals_long_tail_share(taxonomy):
    corpus = generate(12, 40, taxonomy, SynthShape(frames_per_video=3, persons_per_frame=1, state_skew=0.6))
    shares = {(r.video_action, r.group): r for r in long_tail_report(corpus, taxonomy)}
    tally = {}
    for v in corpus:
        pred = baseline_predict(corpus, v, taxonomy)
        for q, p in zip(v.iter_parts(), pred.iter_parts()):
            t = tally.setdefault((v.action, taxonomy.group_of(q.part)), [0, 0])
            t[0] += q.state == p.state
            t[1] += 1
    for key, (c, n) in tally.items():
        row = shares[key]
        assert c == row.modal_count and n == row.total


def test_baseline_matches_modal_oracle(taxonomy):
    rng = random.Random(8)
    states = ["none", "nod", "turn", "sway"]
    train = [make_video(rng.choice(["yoga", "zumba"]),
                        [[(rng.choice(taxonomy.raw_parts), rng.choice(states)) for _ in range(5)]
                         for _ in range(4)], f"t{i}") for i in range(25)]
    target = make_video("zumba", [[(p, "none") for p in taxonomy.raw_parts]], "x")
    pred = baseline_predict(train, target, taxonomy)
    for q in pred.iter_parts():
        g = taxonomy.group_of(q.part)
        seen = [p.state for v in train if v.action == "zumba" for p in v.iter_parts()
                if taxonomy.group_of(p.part) == g]
        assert q.state == modal_by_count_sort(seen, list(taxonomy.part_states))


# --- invert --------------------------------------------------------------------

def test_invert_constant(taxonomy):
    v = make_video("yoga", [[("head", "nod"), ("left_foot", "tap")]])
    labels = [PartLevelLabel("yoga", g, "none") for g in taxonomy.part_groups]
    assert {q.state for q in invert_labels(labels, v, taxonomy).iter_parts()} == {"none"}


def test_invert_derive_fixed_point(taxonomy):
    v = make_video("yoga", [[("head", "nod"), ("left_foot", "tap"), ("right_foot", "tap")]] * 3)
    assert invert_labels(derive_video_labels(v, taxonomy), v, taxonomy) == v


def test_invert_missing_group(taxonomy):
    v = make_video("yoga", [[("head", "nod"), ("hip", "sway")]])
    with pytest.raises(MissingGroupError):
        invert_labels([PartLevelLabel("yoga", "Head", "nod")], v, taxonomy)


def test_invert_accuracy_equals_share(taxonomy):
    frames = [[("head", "none"), ("hip", "sway")]] * 17 + [[("head", "nod"), ("hip", "turn")]] * 3
    v = make_video("capoeira", frames)
    pred = invert_labels(derive_video_labels(v, taxonomy), v, taxonomy)
    rows = {r.group: r.share for r in long_tail_report([v], taxonomy)}
    for g in ("Head", "Hip"):
        pairs = [(a.state, b.state) for a, b in zip(v.iter_parts(), pred.iter_parts())
                 if taxonomy.group_of(a.part) == g]
        assert sum(a == b for a, b in pairs) / len(pairs) == rows[g]
