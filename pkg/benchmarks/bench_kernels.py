"""Time the compiled and numpy kernel backends on glyph-sized rasters.

Usage::

    python benchmarks/bench_kernels.py [--repeat N] [--size H W]

Each kernel is run on the same random inputs under every importable
backend; outputs are checked for equality before timing.
"""

import argparse
import timeit

import numpy as np

from spatialocr import kernels
from spatialocr.morphology import ANGLES, line_se


def cases(rng, h, w):
    bits = (rng.random((h, w)) < 0.45).astype(np.uint8)
    gray = rng.integers(0, 256, (h, w), dtype=np.uint8)
    for theta in ANGLES:
        offs = np.array(line_se(theta, max(1, round(0.7 * h))).offsets, dtype=np.int32)
        yield f"erode {theta:>3}", kernels.erode, (bits, offs)
        yield f"dilate {theta:>3}", kernels.dilate, (bits, offs)
    yield "label 8", kernels.label, (bits, 8)
    yield "label 4", kernels.label, (bits, 4)
    yield "median 3", kernels.median_filter, (gray, 3)
    yield "median 5", kernels.median_filter, (gray, 5)


def same(a, b):
    if isinstance(a, tuple):
        return all(same(x, y) for x, y in zip(a, b))
    return np.array_equal(a, b)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=200)
    parser.add_argument("--size", type=int, nargs=2, default=(48, 40), metavar=("H", "W"))
    args = parser.parse_args(argv)
    backends = kernels.available_backends()
    names = sorted(backends)
    rng = np.random.default_rng(0)
    print(f"raster {args.size[0]}x{args.size[1]}, {args.repeat} calls per cell, microseconds per call")
    print(f"{'kernel':<12}" + "".join(f"{n:>12}" for n in names) + (f"{'speedup':>10}" if len(names) > 1 else ""))
    for name, fn, inputs in cases(rng, *args.size):
        outs = [fn(*inputs, impl=backends[n]) for n in names]
        if not all(same(outs[0], o) for o in outs[1:]):
            raise SystemExit(f"backends disagree on {name}")
        times = [timeit.timeit(lambda n=n: fn(*inputs, impl=backends[n]), number=args.repeat) / args.repeat * 1e6
                 for n in names]
        row = f"{name:<12}" + "".join(f"{t:>12.1f}" for t in times)
        if len(names) > 1:
            row += f"{times[names.index('python')] / times[names.index('cython')]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
