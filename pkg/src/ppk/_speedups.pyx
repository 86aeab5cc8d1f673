# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; semantics identical to ppk._purekernels."""
from libc.math cimport floor, ceil
from libc.stdlib cimport malloc, free, qsort


cdef inline double _iou(double ax1, double ay1, double ax2, double ay2,
                        double bx1, double by1, double bx2, double by2) nogil:
    cdef double area_a = (ax2 - ax1) * (ay2 - ay1)
    cdef double area_b = (bx2 - bx1) * (by2 - by1)
    cdef double iw, ih, inter, union_
    if area_a <= 0.0 or area_b <= 0.0:
        return 0.0
    iw = (ax2 if ax2 < bx2 else bx2) - (ax1 if ax1 > bx1 else bx1)
    if iw <= 0.0:
        return 0.0
    ih = (ay2 if ay2 < by2 else by2) - (ay1 if ay1 > by1 else by1)
    if ih <= 0.0:
        return 0.0
    inter = iw * ih
    union_ = area_a + area_b - inter
    if union_ <= 0.0:
        return 0.0
    return inter / union_


def box_iou(double ax1, double ay1, double ax2, double ay2,
            double bx1, double by1, double bx2, double by2):
    return _iou(ax1, ay1, ax2, ay2, bx1, by1, bx2, by2)


cdef double* _pack(boxes, Py_ssize_t n) except NULL:
    cdef double* out = <double*>malloc((4 * n + 1) * sizeof(double))
    cdef Py_ssize_t i
    if out == NULL:
        raise MemoryError()
    for i in range(n):
        b = boxes[i]
        out[4 * i] = b[0]
        out[4 * i + 1] = b[1]
        out[4 * i + 2] = b[2]
        out[4 * i + 3] = b[3]
    return out


def iou_matrix(preds, gts):
    cdef Py_ssize_t n = len(preds), m = len(gts), i, j
    cdef double* p = _pack(preds, n)
    cdef double* g
    try:
        g = _pack(gts, m)
    except MemoryError:
        free(p)
        raise
    out = []
    try:
        for i in range(n):
            row = [0.0] * m
            for j in range(m):
                row[j] = _iou(p[4*i], p[4*i+1], p[4*i+2], p[4*i+3],
                              g[4*j], g[4*j+1], g[4*j+2], g[4*j+3])
            out.append(row)
    finally:
        free(p)
        free(g)
    return out


cdef struct Cand:
    double iou
    double score
    Py_ssize_t pi
    Py_ssize_t gi


cdef int _cmp(const void* a, const void* b) noexcept nogil:
    cdef const Cand* x = <const Cand*>a
    cdef const Cand* y = <const Cand*>b
    if x.iou != y.iou:
        return -1 if x.iou > y.iou else 1
    if x.score != y.score:
        return -1 if x.score > y.score else 1
    if x.pi != y.pi:
        return -1 if x.pi < y.pi else 1
    if x.gi != y.gi:
        return -1 if x.gi < y.gi else 1
    return 0


def greedy_assign(ious, scores, double thresh):
    cdef Py_ssize_t n = len(ious), m, i, j, k = 0, nc = 0
    cdef double v
    if n == 0:
        return []
    m = len(ious[0])
    if m == 0:
        return []
    cdef Cand* cands = <Cand*>malloc(n * m * sizeof(Cand))
    cdef char* used_p = <char*>malloc(n)
    cdef char* used_g = <char*>malloc(m)
    if cands == NULL or used_p == NULL or used_g == NULL:
        free(cands); free(used_p); free(used_g)
        raise MemoryError()
    pairs = []
    try:
        for i in range(n):
            used_p[i] = 0
            row = ious[i]
            s = float(scores[i])
            for j in range(m):
                v = row[j]
                if v >= thresh:
                    cands[nc].iou = v
                    cands[nc].score = s
                    cands[nc].pi = i
                    cands[nc].gi = j
                    nc += 1
        for j in range(m):
            used_g[j] = 0
        qsort(cands, nc, sizeof(Cand), _cmp)
        for k in range(nc):
            i = cands[k].pi
            j = cands[k].gi
            if used_p[i] or used_g[j]:
                continue
            used_p[i] = 1
            used_g[j] = 1
            pairs.append((i, j, cands[k].iou))
    finally:
        free(cands)
        free(used_p)
        free(used_g)
    return pairs


def paint_disk(unsigned char[::1] buf, Py_ssize_t width, Py_ssize_t height,
               double cx, double cy, double radius,
               unsigned char r, unsigned char g, unsigned char b):
    cdef double rr = radius * radius
    cdef Py_ssize_t x0 = <Py_ssize_t>floor(cx - radius - 1.0)
    cdef Py_ssize_t x1 = <Py_ssize_t>ceil(cx + radius)
    cdef Py_ssize_t y0 = <Py_ssize_t>floor(cy - radius - 1.0)
    cdef Py_ssize_t y1 = <Py_ssize_t>ceil(cy + radius)
    cdef Py_ssize_t px, py, o, covered = 0
    cdef double dx, dy, dy2
    if x0 < 0: x0 = 0
    if y0 < 0: y0 = 0
    if x1 > width - 1: x1 = width - 1
    if y1 > height - 1: y1 = height - 1
    with nogil:
        for py in range(y0, y1 + 1):
            dy = py + 0.5 - cy
            dy2 = dy * dy
            for px in range(x0, x1 + 1):
                dx = px + 0.5 - cx
                if dx * dx + dy2 <= rr:
                    o = (py * width + px) * 3
                    buf[o] = r
                    buf[o + 1] = g
                    buf[o + 2] = b
                    covered += 1
    return covered
