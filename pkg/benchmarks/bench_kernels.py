"""Compare the compiled split-scoring kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat 5] [--instances 5000]

Reports median wall time for the raw ``split_gains`` kernel and for full
tree builds on the bundled acceptance dataset with each backend swapped in.
"""

from __future__ import annotations

import argparse
import statistics
import time
from dataclasses import replace
from importlib import resources
from typing import Callable

import numpy as np

from behavdt import _core, build_tree, generate_synthetic, load_planted_spec
from behavdt._core import _slow
from behavdt.learner import LearnerConfig

try:
    from behavdt._core import _fast
except ImportError:
    _fast = None

KERNELS = ("class_counts", "contingency", "entropy_counts", "split_gains")


def median_time(fn: Callable[[], object], repeat: int) -> float:
    times = []
    for _ in range(repeat):
        start = time.perf_counter()
        fn()
        times.append(time.perf_counter() - start)
    return statistics.median(times)


def use_backend(module) -> None:
    for name in KERNELS:
        setattr(_core, name, getattr(module, name))


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    parser.add_argument("--instances", type=int, default=5000)
    args = parser.parse_args()
    if _fast is None:
        raise SystemExit("compiled extension not built; run `pip install -e . --no-build-isolation` first")

    path = resources.files("behavdt") / "data" / "acceptance.yaml"
    with resources.as_file(path) as p:
        spec = replace(load_planted_spec(p), instance_count=args.instances)
    data = generate_synthetic(spec)
    enc = data.encoded
    rows = np.arange(len(data), dtype=np.intp)
    attrs = np.arange(enc.codes.shape[1], dtype=np.intp)
    n_values, n_classes = enc.n_values, len(enc.classes)

    results = []
    for name, mod in (("python", _slow), ("cython", _fast)):
        kernel = median_time(
            lambda: [mod.split_gains(enc.codes, enc.labels, rows, attrs, n_values, n_classes) for _ in range(100)],
            args.repeat,
        ) / 100
        use_backend(mod)
        builds = {
            t: median_time(lambda: build_tree(data, LearnerConfig(t)), args.repeat) for t in (1.0, 0.8)
        }
        results.append((name, kernel, builds[1.0], builds[0.8]))
    use_backend(_fast if _core.BACKEND == "cython" else _slow)

    print(f"{len(data)} instances, {enc.codes.shape[1]} attributes, median of {args.repeat}")
    print(f"{'backend':<8} {'split_gains':>14} {'build t=1.0':>14} {'build t=0.8':>14}")
    for name, kernel, b10, b08 in results:
        print(f"{name:<8} {kernel * 1e6:>11.1f} us {b10 * 1e3:>11.2f} ms {b08 * 1e3:>11.2f} ms")
    base, fast = results
    print(f"speedup  {base[1] / fast[1]:>13.1f}x {base[2] / fast[2]:>13.1f}x {base[3] / fast[3]:>13.1f}x")


if __name__ == "__main__":
    main()
