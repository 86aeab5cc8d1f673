"""Both kernel backends must agree bit for bit."""
import random

import pytest
from hypothesis import given, settings, strategies as st

from ppk import kernels
from ppk.kernels import python_backend as py

coord = st.floats(-50, 150, allow_nan=False, width=64)
box = st.tuples(coord, coord, coord, coord).map(
    lambda t: (min(t[0], t[2]), min(t[1], t[3]), max(t[0], t[2]), max(t[1], t[3])))

compiled = kernels.compiled_backend
needs_compiled = pytest.mark.skipif(compiled is None, reason="compiled kernels not built")


def test_backend_flag():
    assert kernels.BACKEND in {"python", "cython"}


@needs_compiled
@settings(max_examples=300, deadline=None)
@given(st.lists(box, max_size=6), st.lists(box, max_size=6))
def test_iou_matrix_identical(preds, gts):
    assert py.iou_matrix(preds, gts) == compiled.iou_matrix(preds, gts)


@needs_compiled
def test_greedy_assign_identical():
    rng = random.Random(3)
    for _ in range(300):
        n, m = rng.randint(0, 7), rng.randint(1, 7)
        ious = [[rng.choice([0.0, 0.3, 0.5, 0.7, rng.random()]) for _ in range(m)] for _ in range(n)]
        scores = [rng.choice([0.5, 0.9, rng.random()]) for _ in range(n)]
        thresh = rng.choice([0.3, 0.5, 1e-9])
        assert py.greedy_assign(ious, scores, thresh) == compiled.greedy_assign(ious, scores, thresh)


@needs_compiled
def test_paint_disk_identical():
    rng = random.Random(11)
    for _ in range(200):
        w, h = rng.randint(1, 40), rng.randint(1, 40)
        cx, cy = rng.uniform(-3, w + 3), rng.uniform(-3, h + 3)
        r = rng.choice([1, 2, 3, 5, rng.uniform(0.5, 6)])
        a = bytearray(w * h * 3)
        b = bytearray(w * h * 3)
        na = py.paint_disk(a, w, h, cx, cy, r, 10, 20, 30)
        nb = compiled.paint_disk(b, w, h, cx, cy, r, 10, 20, 30)
        assert a == b and na == nb


def test_greedy_assign_empty(backend):
    assert backend.greedy_assign([], [], 0.5) == []
    assert backend.greedy_assign([[]], [1.0], 0.5) == []
