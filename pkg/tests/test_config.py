import json

import pytest

from ppk.config import PipelineConfig, load_config, save_config
from ppk.errors import ConfigError
from ppk.taxonomy import default_taxonomy


def write(tmp_path, text, name="c.json"):
    p = tmp_path / name
    p.write_text(text, encoding="utf-8")
    return p


def test_empty_file_gives_defaults(tmp_path):
    cfg = load_config(write(tmp_path, ""))
    assert cfg.scoring.human_iou_thresh == 0.5
    assert cfg.scoring.part_iou_thresh == 0.3
    assert cfg.scoring.k_person == 10
    assert cfg.scoring.k_part_per_class == 1
    assert cfg.conf_thresh_keypoints == 0.3 == cfg.render.conf_thresh
    assert set(cfg.fusion) == {"video", "Head", "Hand", "Arm", "Hip", "Leg", "Foot"}
    assert all(w == 1.0 for s in cfg.fusion.values() for w in s.weights)
    assert load_config(write(tmp_path, "{}", "d.json")) == cfg


def test_video_weights_round_trip(tmp_path):
    p = write(tmp_path, json.dumps({"fusion": {"video": {"ip-csn-152": 7.0, "ir-csn-152": 1.0}}}))
    cfg = load_config(p)
    assert cfg.fusion["video"].model_ids == ("ip-csn-152", "ir-csn-152")
    assert cfg.fusion["video"].weights == (7.0, 1.0)
    q = tmp_path / "saved.json"
    save_config(q, cfg)
    again = load_config(q)
    assert again == cfg
    r = tmp_path / "saved2.json"
    save_config(r, again)
    assert r.read_bytes() == q.read_bytes()


@pytest.mark.parametrize("doc, locus", [
    ({"scoring": {"human_iou_thresh": 1.5}}, "scoring"),
    ({"scoring": {"k_person": 0}}, "scoring"),
    ({"scoring": {"bogus": 1}}, "scoring"),
    ({"render": {"min_px": 0}}, "render"),
    ({"fusion": {"video": {"a": -1}}}, "fusion.video"),
    ({"fusion": {"Wing": {"a": 1}}}, "fusion"),
    ({"conf_thresh_keypoints": 2}, "conf_thresh_keypoints"),
    ({"taxonomy": {"raw_parts": []}}, "taxonomy"),
    ({"extra": 1}, "<root>"),
])
def test_invalid_values(tmp_path, doc, locus):
    with pytest.raises(ConfigError) as exc:
        load_config(write(tmp_path, json.dumps(doc)))
    assert exc.value.locus.startswith(locus)


def test_bad_json_line(tmp_path):
    with pytest.raises(ConfigError) as exc:
        load_config(write(tmp_path, '{\n"scoring": }'))
    assert exc.value.line == 2


def test_env_fallback(tmp_path, monkeypatch):
    p = write(tmp_path, json.dumps({"scoring": {"part_iou_thresh": 0.4}}))
    monkeypatch.setenv("PPK_CONFIG", str(p))
    assert load_config().scoring.part_iou_thresh == 0.4
    monkeypatch.delenv("PPK_CONFIG")
    assert load_config() == PipelineConfig()


def test_custom_taxonomy_file(tmp_path):
    tax = default_taxonomy().to_dict()
    tax["name"] = "mini"
    tax["video_actions"] = ["a", "b"]
    (tmp_path / "tax.json").write_text(json.dumps(tax), encoding="utf-8")
    cfg = load_config(write(tmp_path, json.dumps({"taxonomy": "tax.json"})))
    assert cfg.taxonomy.name == "mini"
    q = tmp_path / "out.json"
    save_config(q, cfg)
    assert json.loads(q.read_text())["taxonomy"] == "tax.json"
