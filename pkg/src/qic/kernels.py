"""Batch scoring kernels over flat numpy arrays.

A full recompute scores every object in the graph, and the arithmetic per
object is tiny, so at scale the per-element interpreter overhead is the
hot spot. The kernels below run the same loops over flat float64 arrays
and are JIT-compiled with numba when enabled; the uncompiled Python
function itself is the fallback, so both paths execute the identical
statements in the identical order and produce bit-identical results.
(Vectorized numpy is deliberately not used here: SIMD ``np.log`` and
pairwise ``np.sum`` may differ from libm / sequential accumulation by an
ulp, which would break the engine's bit-reproducibility contract.)

Backend selection, checked at each `get_kernels()` call:

    QIC_NUMBA=0    force the plain-Python loops
    QIC_NUMBA=1    require numba; fail loudly if it cannot compile
    unset/other    use numba when importable, else fall back silently

``benchmarks/bench_kernels.py`` measures the difference between the two.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError

ENV_FLAG = "QIC_NUMBA"


def _segment_totals(values: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """Sequential sum of values[offsets[j]:offsets[j+1]] for each segment j."""
    n = offsets.shape[0] - 1
    out = np.empty(n, dtype=np.float64)
    for j in range(n):
        acc = 0.0
        for k in range(offsets[j], offsets[j + 1]):
            acc += values[k]
        out[j] = acc
    return out


def _impact_scores(totals: np.ndarray, formula_at_zero: bool) -> np.ndarray:
    """1 + ln(1 + total) per element; zero totals map to 0 unless told otherwise."""
    out = np.empty(totals.shape[0], dtype=np.float64)
    for j in range(totals.shape[0]):
        t = totals[j]
        if t == 0.0 and not formula_at_zero:
            out[j] = 0.0
        else:
            out[j] = 1.0 + math.log(1.0 + t)
    return out


def _collaboration_scores(authors: np.ndarray, institutions: np.ndarray) -> np.ndarray:
    """(1 + ln(authors)) * (1 + 0.5 * ln(institutions)) per element."""
    out = np.empty(authors.shape[0], dtype=np.float64)
    for j in range(authors.shape[0]):
        out[j] = (1.0 + math.log(authors[j])) * (1.0 + 0.5 * math.log(institutions[j]))
    return out


def _quality_scores(
    q_f: np.ndarray,
    q_a: np.ndarray,
    q_i: np.ndarray,
    q_r: np.ndarray,
    w_f: float,
    w_a: float,
    w_i: float,
    w_r: float,
) -> np.ndarray:
    """Weighted four-term average per element, accumulated F, A, I, R."""
    out = np.empty(q_f.shape[0], dtype=np.float64)
    for j in range(q_f.shape[0]):
        out[j] = ((w_f * q_f[j] + w_a * q_a[j]) + w_i * q_i[j]) + w_r * q_r[j]
    return out


def _combined_scores(
    quality: np.ndarray, impact: np.ndarray, collaboration: np.ndarray
) -> np.ndarray:
    """(quality * impact) * collaboration per element."""
    out = np.empty(quality.shape[0], dtype=np.float64)
    for j in range(quality.shape[0]):
        out[j] = (quality[j] * impact[j]) * collaboration[j]
    return out


@dataclass(frozen=True)
class Kernels:
    """One resolved set of kernel implementations."""

    name: str
    segment_totals: Callable[[np.ndarray, np.ndarray], np.ndarray]
    impact_scores: Callable[[np.ndarray, bool], np.ndarray]
    collaboration_scores: Callable[[np.ndarray, np.ndarray], np.ndarray]
    quality_scores: Callable[..., np.ndarray]
    combined_scores: Callable[[np.ndarray, np.ndarray, np.ndarray], np.ndarray]


_PLAIN = Kernels(
    name="python",
    segment_totals=_segment_totals,
    impact_scores=_impact_scores,
    collaboration_scores=_collaboration_scores,
    quality_scores=_quality_scores,
    combined_scores=_combined_scores,
)

_cache: dict[str, Kernels] = {"python": _PLAIN}


def _compile_numba() -> Kernels:
    from numba import njit

    jit = njit(cache=True)
    return Kernels(
        name="numba",
        segment_totals=jit(_segment_totals),
        impact_scores=jit(_impact_scores),
        collaboration_scores=jit(_collaboration_scores),
        quality_scores=jit(_quality_scores),
        combined_scores=jit(_combined_scores),
    )


def default_backend() -> str:
    """Backend implied by the QIC_NUMBA environment flag."""
    flag = os.environ.get(ENV_FLAG, "").strip().lower()
    if flag in ("0", "false", "off", "no"):
        return "python"
    if flag in ("1", "true", "on", "yes"):
        return "numba"
    return "auto"


def get_kernels(backend: str | None = None) -> Kernels:
    """Resolve a kernel set; `backend` overrides the environment flag."""
    resolved = backend or default_backend()
    if resolved == "python":
        return _cache["python"]
    if resolved == "numba":
        if "numba" not in _cache:
            try:
                _cache["numba"] = _compile_numba()
            except ImportError as exc:
                raise ConfigError(f"{ENV_FLAG}=1 requires numba, which is unavailable: {exc}")
        return _cache["numba"]
    if resolved == "auto":
        try:
            return get_kernels("numba")
        except ConfigError:
            return _cache["python"]
    raise ConfigError(f"unknown kernel backend {resolved!r}")
