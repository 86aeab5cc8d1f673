import hashlib
import random
from pathlib import Path

import pytest

from golden.make_golden import PALETTE, base_pixels, fixtures
from ppk.errors import EmptyCropError, SchemaError
from ppk.geometry import BoundingBox, PoseKeypoints
from ppk.render import (DEFAULT_PALETTE, RasterImage, RenderStyle, augment_person, crop,
                        decode_ppm, encode_ppm, read_ppm, render_keypoints, write_ppm)

from oracles import disk_pixels

GOLDEN = Path(__file__).parent / "golden"
GOLDEN_SHA256 = {
    "spread": "ac29f9df123f32c7e9991e8f75956362eb0f6fb041b5963f85541bed36b1cde2",
    "centre": "c41f9a1ec1f1afeac4e985e4150aa0f6543cfb81cc8d75677ff9bc24d73be030",
    "overlap": "c209d66381974a523b0198eda3552877003e7bdc2b7d30e5a2981514e8d3cae9",
}


def image_from(kind, w, h):
    return RasterImage(w, h, bytes(v for p in base_pixels(kind, w, h) for v in p))


def numbered(w, h):
    return RasterImage(w, h, bytes((i % 251) for i in range(w * h * 3)))


# --- crop ----------------------------------------------------------------------

def test_crop_full_image():
    img = numbered(5, 4)
    assert crop(img, img.bounds()) == img


def test_crop_corner_block():
    img = numbered(4, 4)
    out = crop(img, BoundingBox(0, 0, 2, 2))
    assert (out.width, out.height) == (2, 2)
    assert [out.pixel(x, y) for y in range(2) for x in range(2)] == \
        [img.pixel(x, y) for y in range(2) for x in range(2)]


def test_crop_fractional_box_rounds_outward():
    img = numbered(4, 4)
    out = crop(img, BoundingBox(0.4, 0.4, 2.6, 2.6))
    assert (out.width, out.height) == (3, 3)
    assert out.pixel(2, 2) == img.pixel(2, 2)


def test_crop_clamps_and_rejects_empty():
    img = numbered(4, 4)
    assert crop(img, BoundingBox(-5, 2, 10, 9)).width == 4
    with pytest.raises(EmptyCropError):
        crop(img, BoundingBox(10, 10, 12, 12))


# --- render ------------------------------------------------------------------

def pose(rows):
    return PoseKeypoints.from_xyc(rows)


def test_palette_matches_golden_maker():
    assert list(DEFAULT_PALETTE) == PALETTE
    assert len(set(DEFAULT_PALETTE)) == 17


def test_zero_confidence_is_noop():
    img = numbered(20, 20)
    assert render_keypoints(img, pose([(5.0, 5.0, 0.0)] * 17)) == img


def test_single_centre_disk_matches_oracle():
    img = RasterImage.blank(100, 100)
    rows = [(50.0, 50.0, 1.0)] + [(0.0, 0.0, 0.0)] * 16
    style = RenderStyle(min_px=2, fraction_of_long_side=0.01)
    assert style.radius_for(100, 100) == 2
    out = render_keypoints(img, pose(rows), style)
    changed = {(x, y) for y in range(100) for x in range(100) if out.pixel(x, y) != (0, 0, 0)}
    assert changed == disk_pixels(100, 100, 50.0, 50.0, 2)
    assert all(out.pixel(x, y) == DEFAULT_PALETTE[0] for x, y in changed)


def test_overlap_takes_later_colour():
    img = RasterImage.blank(30, 30)
    rows = [(10.0, 10.0, 1.0), (11.0, 10.0, 1.0)] + [(0.0, 0.0, 0.0)] * 15
    out = render_keypoints(img, pose(rows))
    overlap = disk_pixels(30, 30, 10, 10, 2) & disk_pixels(30, 30, 11, 10, 2)
    assert overlap
    assert all(out.pixel(x, y) == DEFAULT_PALETTE[1] for x, y in overlap)


def test_outside_keypoints_skipped():
    img = numbered(10, 10)
    rows = [(-0.5, 3.0, 1.0), (10.0, 3.0, 1.0), (3.0, 10.0, 1.0)] + [(0.0, 0.0, 0.0)] * 14
    assert render_keypoints(img, pose(rows)) == img


def test_radius_rule():
    s = RenderStyle()
    assert s.radius_for(100, 100) == 2
    assert s.radius_for(640, 10) == 6
    assert s.radius_for(350, 10) == 4  # 3.5 rounds half up


def test_style_validation():
    with pytest.raises(ValueError):
        RenderStyle(palette=DEFAULT_PALETTE[:16])
    with pytest.raises(ValueError):
        RenderStyle(palette=(DEFAULT_PALETTE[0],) * 17)
    with pytest.raises(ValueError):
        RenderStyle(min_px=0)
    with pytest.raises(ValueError):
        RenderStyle(fraction_of_long_side=1.0)


@pytest.mark.parametrize("name, kind, w, h, kps", fixtures(), ids=lambda v: v if isinstance(v, str) else "")
def test_golden(name, kind, w, h, kps):
    golden = (GOLDEN / f"{name}.ppm").read_bytes()
    assert hashlib.sha256(golden).hexdigest() == GOLDEN_SHA256[name]
    out = render_keypoints(image_from(kind, w, h), pose(kps))
    assert encode_ppm(out) == golden


def test_locality_and_dimensions_random():
    rng = random.Random(41)
    for _ in range(100):
        w, h = rng.randint(4, 60), rng.randint(4, 60)
        img = RasterImage(w, h, bytes(rng.randrange(256) for _ in range(w * h * 3)))
        rows = [(rng.uniform(-5, w + 5), rng.uniform(-5, h + 5), rng.random()) for _ in range(17)]
        style = RenderStyle(min_px=rng.randint(1, 4), fraction_of_long_side=rng.choice([0.01, 0.05, 0.1]))
        out = render_keypoints(img, pose(rows), style)
        assert (out.width, out.height) == (w, h)
        r = style.radius_for(w, h)
        disks = [disk_pixels(w, h, x, y, r) for x, y, c in rows
                 if c >= style.conf_thresh and 0 <= x < w and 0 <= y < h]
        covered = set().union(*disks) if disks else set()
        changed = {(x, y) for y in range(h) for x in range(w) if out.pixel(x, y) != img.pixel(x, y)}
        assert changed <= covered
        assert len(changed) <= sum(len(d) for d in disks)


def test_augment_person_translates_keypoints():
    img = RasterImage.blank(40, 40)
    rows = [(25.0, 25.0, 1.0)] + [(0.0, 0.0, 0.0)] * 16
    out = augment_person(img, BoundingBox(10.2, 10.7, 35, 36), pose(rows))
    assert (out.width, out.height) == (25, 26)
    expected = disk_pixels(25, 26, 15.0, 15.0, 2)
    changed = {(x, y) for y in range(26) for x in range(25) if out.pixel(x, y) != (0, 0, 0)}
    assert changed == expected


# --- PPM -----------------------------------------------------------------------

def test_ppm_round_trip(tmp_path):
    img = numbered(7, 3)
    p = tmp_path / "x.ppm"
    write_ppm(p, img)
    assert p.read_bytes().startswith(b"P6\n7 3\n255\n")
    assert read_ppm(p) == img


def test_ppm_header_comments():
    data = b"P6\n# made by hand\n2 1\n# max\n255\n" + bytes(range(6))
    assert decode_ppm(data) == RasterImage(2, 1, bytes(range(6)))


@pytest.mark.parametrize("data", [
    b"P3\n1 1\n255\n0 0 0",
    b"P6\n1 1\n65535\n" + bytes(6),
    b"P6\n2 2\n255\n" + bytes(5),
    b"P6\n2",
])
def test_ppm_rejects(data):
    with pytest.raises(SchemaError):
        decode_ppm(data)
