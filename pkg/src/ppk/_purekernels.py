"""Pure-Python kernels. ``_speedups.pyx`` mirrors these operation for operation
so both backends produce bit-identical results."""
from __future__ import annotations

import math


def box_iou(ax1, ay1, ax2, ay2, bx1, by1, bx2, by2):
    area_a = (ax2 - ax1) * (ay2 - ay1)
    area_b = (bx2 - bx1) * (by2 - by1)
    if area_a <= 0.0 or area_b <= 0.0:
        return 0.0
    iw = min(ax2, bx2) - max(ax1, bx1)
    if iw <= 0.0:
        return 0.0
    ih = min(ay2, by2) - max(ay1, by1)
    if ih <= 0.0:
        return 0.0
    inter = iw * ih
    union = area_a + area_b - inter
    if union <= 0.0:
        return 0.0
    return inter / union


def iou_matrix(preds, gts):
    """``preds`` and ``gts`` are sequences of ``(x1, y1, x2, y2)``."""
    return [[box_iou(*p, *g) for g in gts] for p in preds]


def greedy_assign(ious, scores, thresh):
    """Greedy one-to-one assignment on an IoU matrix.

    Returns ``(pred_index, gt_index, iou)`` triples in selection order.
    Candidate order: IoU desc, pred score desc, pred index asc, gt index asc.
    """
    cands = []
    for pi, row in enumerate(ious):
        s = scores[pi]
        for gi, v in enumerate(row):
            if v >= thresh:
                cands.append((-v, -s, pi, gi))
    cands.sort()
    used_p = set()
    used_g = set()
    pairs = []
    for negv, _, pi, gi in cands:
        if pi in used_p or gi in used_g:
            continue
        used_p.add(pi)
        used_g.add(gi)
        pairs.append((pi, gi, -negv))
    return pairs


def paint_disk(buf, width, height, cx, cy, radius, r, g, b):
    """Fill pixels whose centres satisfy ``(px+.5-cx)^2 + (py+.5-cy)^2 <= radius^2``.

    ``buf`` is a writable row-major RGB byte buffer. Returns the number of
    pixels covered by the disk.
    """
    rr = float(radius) * float(radius)
    x0 = max(0, int(math.floor(cx - radius - 1.0)))
    x1 = min(width - 1, int(math.ceil(cx + radius)))
    y0 = max(0, int(math.floor(cy - radius - 1.0)))
    y1 = min(height - 1, int(math.ceil(cy + radius)))
    covered = 0
    for py in range(y0, y1 + 1):
        dy = py + 0.5 - cy
        dy2 = dy * dy
        row = py * width
        for px in range(x0, x1 + 1):
            dx = px + 0.5 - cx
            if dx * dx + dy2 <= rr:
                o = (row + px) * 3
                buf[o] = r
                buf[o + 1] = g
                buf[o + 2] = b
                covered += 1
    return covered
