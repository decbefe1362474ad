"""Benchmark the scoring kernels: plain-Python loops vs numba JIT.

Builds a synthetic population of objects with reuse events, runs each
kernel on both backends, verifies the outputs are bit-identical, and
prints per-kernel timings plus a whole-pipeline row.

    python3 benchmarks/bench_kernels.py --objects 200000 --events 8
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from qic.errors import ConfigError
from qic.kernels import Kernels, get_kernels


def synthetic_arrays(n_objects: int, events_per_object: int, seed: int):
    rng = np.random.default_rng(seed)
    counts = rng.integers(0, 2 * events_per_object + 1, size=n_objects)
    offsets = np.zeros(n_objects + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    return {
        "values": rng.uniform(0.05, 2.0, size=int(offsets[-1])),
        "offsets": offsets,
        "authors": rng.integers(1, 40, size=n_objects).astype(np.float64),
        "institutions": rng.integers(1, 12, size=n_objects).astype(np.float64),
        "subs": [rng.uniform(0.0, 1.0, size=n_objects) for _ in range(4)],
    }


def pipeline(kernels: Kernels, data) -> np.ndarray:
    quality = kernels.quality_scores(*data["subs"], 0.25, 0.25, 0.25, 0.25)
    totals = kernels.segment_totals(data["values"], data["offsets"])
    impact = kernels.impact_scores(totals, False)
    collaboration = kernels.collaboration_scores(data["authors"], data["institutions"])
    return kernels.combined_scores(quality, impact, collaboration)


def stages(kernels: Kernels, data):
    totals = kernels.segment_totals(data["values"], data["offsets"])
    quality = kernels.quality_scores(*data["subs"], 0.25, 0.25, 0.25, 0.25)
    impact = kernels.impact_scores(totals, False)
    collaboration = kernels.collaboration_scores(data["authors"], data["institutions"])
    return {
        "segment_totals": lambda: kernels.segment_totals(data["values"], data["offsets"]),
        "impact_scores": lambda: kernels.impact_scores(totals, False),
        "collaboration_scores": lambda: kernels.collaboration_scores(
            data["authors"], data["institutions"]
        ),
        "quality_scores": lambda: kernels.quality_scores(
            *data["subs"], 0.25, 0.25, 0.25, 0.25
        ),
        "combined_scores": lambda: kernels.combined_scores(quality, impact, collaboration),
        "full pipeline": lambda: pipeline(kernels, data),
    }


def best_of(fn, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        started = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - started)
    return best


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--objects", type=int, default=200_000)
    parser.add_argument("--events", type=int, default=8, help="mean reuse events per object")
    parser.add_argument("--repeats", type=int, default=5)
    parser.add_argument("--seed", type=int, default=42)
    args = parser.parse_args(argv)

    data = synthetic_arrays(args.objects, args.events, args.seed)
    python = get_kernels("python")
    try:
        numba = get_kernels("numba")
    except ConfigError as exc:
        print(f"numba backend unavailable ({exc}); nothing to compare")
        return 1

    if not np.array_equal(pipeline(python, data), pipeline(numba, data)):
        raise AssertionError("backends disagree — bit-reproducibility is broken")

    print(
        f"{args.objects} objects, ~{args.events} events each, "
        f"best of {args.repeats} runs (numba pre-warmed)\n"
    )
    print(f"{'kernel':<22} {'python':>10} {'numba':>10} {'speedup':>8}")
    python_stages = stages(python, data)
    numba_stages = stages(numba, data)
    for name, python_fn in python_stages.items():
        numba_fn = numba_stages[name]
        numba_fn()  # warm the JIT cache before timing
        python_s = best_of(python_fn, args.repeats)
        numba_s = best_of(numba_fn, args.repeats)
        print(
            f"{name:<22} {python_s * 1e3:>8.1f}ms {numba_s * 1e3:>8.1f}ms "
            f"{python_s / numba_s:>7.1f}x"
        )
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
