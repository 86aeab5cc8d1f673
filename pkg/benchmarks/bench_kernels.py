"""Compare the compiled and pure-Python kernel backends.

    python benchmarks/bench_kernels.py [--repeat 5]

Runs each kernel on fixed inputs, checks both backends agree, and reports
the best-of-N wall time and the speed-up.
"""
from __future__ import annotations

import argparse
import random
import time

from ppk import kernels
from ppk.kernels import compiled_backend, python_backend


def make_boxes(rng, n):
    out = []
    for _ in range(n):
        x, y = rng.uniform(0, 600), rng.uniform(0, 300)
        out.append((x, y, x + rng.uniform(5, 120), y + rng.uniform(5, 120)))
    return out


def bench(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def cases(rng):
    preds, gts = make_boxes(rng, 200), make_boxes(rng, 200)
    scores = [rng.random() for _ in preds]
    ious = python_backend.iou_matrix(preds, gts)
    small = [(make_boxes(rng, 10), make_boxes(rng, 10)) for _ in range(2000)]

    def iou_big(b):
        return lambda: b.iou_matrix(preds, gts)

    def iou_small(b):
        return lambda: [b.iou_matrix(p, g) for p, g in small]

    def greedy(b):
        return lambda: b.greedy_assign(ious, scores, 0.1)

    def disks(b):
        def go():
            buf = bytearray(512 * 512 * 3)
            for i in range(200):
                b.paint_disk(buf, 512, 512, 5.0 + i * 2.5, 7.0 + i * 2.4, 12.0, i % 256, 80, 160)
            return bytes(buf)
        return go

    from ppk.scorer import score_dataset
    from ppk.synthgen import CorruptionSpec, SynthShape, corrupt, generate
    from ppk.taxonomy import default_taxonomy

    tax = default_taxonomy()
    gt = generate(1, 300, tax, SynthShape(frames_per_video=4, persons_per_frame=4))
    pred = corrupt(gt, CorruptionSpec(2, state_flip_rate=0.2, box_jitter=4.0), tax)

    def scoring(b):
        def go():
            saved = {n: getattr(kernels, n) for n in ("iou_matrix", "greedy_assign")}
            try:
                kernels.iou_matrix, kernels.greedy_assign = b.iou_matrix, b.greedy_assign
                return score_dataset(gt, pred).final_score
            finally:
                for n, f in saved.items():
                    setattr(kernels, n, f)
        return go

    return [("iou_matrix 200x200", iou_big), ("iou_matrix 2000 x (10x10)", iou_small),
            ("greedy_assign 200x200", greedy), ("paint_disk 200 x r12 on 512^2", disks),
            ("score_dataset 300 videos", scoring)]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    print(f"active backend: {kernels.BACKEND}")
    if compiled_backend is None:
        print("compiled kernels not built; timing pure Python only")
    rng = random.Random(0)
    print(f"{'kernel':<32}{'python (ms)':>14}{'cython (ms)':>14}{'speed-up':>10}")
    for name, make in cases(rng):
        t_py, r_py = bench(make(python_backend), args.repeat)
        if compiled_backend is None:
            print(f"{name:<32}{t_py * 1e3:>14.2f}{'-':>14}{'-':>10}")
            continue
        t_c, r_c = bench(make(compiled_backend), args.repeat)
        if r_py != r_c:
            raise SystemExit(f"backends disagree on {name}")
        print(f"{name:<32}{t_py * 1e3:>14.2f}{t_c * 1e3:>14.2f}{t_py / t_c:>9.1f}x")


if __name__ == "__main__":
    main()
