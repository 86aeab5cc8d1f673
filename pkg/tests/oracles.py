"""Independent reference computations used by the tests.

Nothing here imports the code paths being checked.
"""
from __future__ import annotations

import itertools
from collections import Counter

import numpy as np


def raster_iou(a, b, cells_per_px: int, extent: float) -> float:
    """IoU by counting grid cells whose centres fall inside each box."""
    n = int(round(extent * cells_per_px))
    c = (np.arange(n) + 0.5) / cells_per_px
    xs, ys = np.meshgrid(c, c, indexing="xy")

    def mask(b):
        if (b[2] - b[0]) <= 0 or (b[3] - b[1]) <= 0:
            return np.zeros_like(xs, dtype=bool)
        return (xs >= b[0]) & (xs < b[2]) & (ys >= b[1]) & (ys < b[3])

    ma, mb = mask(a), mask(b)
    union = np.count_nonzero(ma | mb)
    if union == 0 or not ma.any() or not mb.any():
        return 0.0
    return np.count_nonzero(ma & mb) / union


def naive_greedy(ious, scores, thresh):
    """Scan every remaining pair each round and take the best by
    (iou, score, -pred index, -gt index)."""
    n = len(ious)
    m = len(ious[0]) if n else 0
    free_p, free_g = set(range(n)), set(range(m))
    out = []
    while True:
        best = None
        for p in sorted(free_p):
            for g in sorted(free_g):
                v = ious[p][g]
                if v < thresh:
                    continue
                key = (v, scores[p], -p, -g)
                if best is None or key > best[0]:
                    best = (key, p, g, v)
        if best is None:
            return out
        _, p, g, v = best
        out.append((p, g, v))
        free_p.discard(p)
        free_g.discard(g)


def lexmax_assignment(ious, thresh):
    """Among all maximal one-to-one assignments over pairs >= thresh, the one
    whose IoUs sorted descending are lexicographically largest. Coincides
    with greedy selection when IoU values are distinct."""
    n = len(ious)
    m = len(ious[0]) if n else 0
    edges = [(p, g) for p in range(n) for g in range(m) if ious[p][g] >= thresh]
    best_key, best = None, []
    for r in range(len(edges) + 1):
        for subset in itertools.combinations(edges, r):
            ps = [p for p, _ in subset]
            gs = [g for _, g in subset]
            if len(set(ps)) != len(ps) or len(set(gs)) != len(gs):
                continue
            key = sorted((ious[p][g] for p, g in subset), reverse=True)
            if best_key is None or key > best_key:
                best_key, best = key, subset
    return sorted(best, key=lambda e: -ious[e[0]][e[1]])


def disk_pixels(width, height, cx, cy, r):
    """Pixel indices whose centres lie within distance r of (cx, cy)."""
    return {(x, y) for y in range(height) for x in range(width)
            if (x + 0.5 - cx) ** 2 + (y + 0.5 - cy) ** 2 <= r * r}


def modal_by_count_sort(states, order):
    """Most common state; ties to the earliest entry of ``order``."""
    if not states:
        return "none"
    counts = Counter(states)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], order.index(kv[0])))
    return ranked[0][0]


def naive_fuse(vectors, model_ids, weights):
    n = len(vectors[model_ids[0]])
    out = []
    for c in range(n):
        acc = 0.0
        for m, w in zip(model_ids, weights):
            acc += w * vectors[m][c]
        out.append(acc)
    return out
