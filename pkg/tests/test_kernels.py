"""Batch kernels: backend selection and bit-exact agreement between paths."""

from __future__ import annotations

import numpy as np
import pytest

from qic.errors import ConfigError
from qic.kernels import ENV_FLAG, Kernels, default_backend, get_kernels
from qic.metrics import (
    CollaborationCounts,
    FairSubScores,
    FairWeights,
    collaboration_score,
    impact_score,
    object_score,
    quality_score,
)


@pytest.fixture
def python_kernels() -> Kernels:
    return get_kernels("python")


@pytest.fixture
def numba_kernels() -> Kernels:
    return get_kernels("numba")


# -- backend selection --------------------------------------------------------


@pytest.mark.parametrize("flag", ["0", "false", "off", "no", " OFF "])
def test_env_flag_disables_numba(monkeypatch, flag):
    monkeypatch.setenv(ENV_FLAG, flag)
    assert default_backend() == "python"
    assert get_kernels().name == "python"


@pytest.mark.parametrize("flag", ["1", "true", "on", "yes", " ON "])
def test_env_flag_requires_numba(monkeypatch, flag):
    monkeypatch.setenv(ENV_FLAG, flag)
    assert default_backend() == "numba"
    assert get_kernels().name == "numba"


def test_unset_env_flag_resolves_automatically(monkeypatch):
    monkeypatch.delenv(ENV_FLAG, raising=False)
    assert default_backend() == "auto"
    assert get_kernels().name in ("python", "numba")


def test_explicit_backend_overrides_environment(monkeypatch):
    monkeypatch.setenv(ENV_FLAG, "1")
    assert get_kernels("python").name == "python"


def test_unknown_backend_rejected():
    with pytest.raises(ConfigError):
        get_kernels("cuda")


# -- python path matches the scalar formulas ----------------------------------


def test_segment_totals_match_scalar_sum(python_kernels):
    rng = np.random.default_rng(7)
    values = rng.uniform(0.0, 5.0, size=40)
    offsets = np.array([0, 0, 3, 3, 17, 40], dtype=np.int64)
    totals = python_kernels.segment_totals(values, offsets)
    for j in range(offsets.shape[0] - 1):
        acc = 0.0
        for k in range(offsets[j], offsets[j + 1]):
            acc += values[k]
        assert totals[j] == acc


def test_impact_kernel_matches_scalar_function(python_kernels):
    totals = np.array([0.0, 1.0, 10.0, 0.25], dtype=np.float64)
    annihilated = python_kernels.impact_scores(totals, False)
    kept = python_kernels.impact_scores(totals, True)
    for j, total in enumerate(totals):
        weights = [float(total)] if total else []
        assert annihilated[j] == impact_score(weights)
        assert kept[j] == impact_score(weights, zero_reuse_policy="formula")


def test_collaboration_kernel_matches_scalar_function(python_kernels):
    authors = np.array([1, 5, 10, 18], dtype=np.float64)
    institutions = np.array([1, 1, 4, 8], dtype=np.float64)
    scores = python_kernels.collaboration_scores(authors, institutions)
    for j in range(authors.shape[0]):
        counts = CollaborationCounts(int(authors[j]), int(institutions[j]))
        assert scores[j] == collaboration_score(counts)


def test_quality_kernel_matches_scalar_function(python_kernels):
    rng = np.random.default_rng(11)
    subs = rng.uniform(0.0, 1.0, size=(4, 25))
    weights = FairWeights(0.4, 0.2, 0.2, 0.2)
    scores = python_kernels.quality_scores(
        subs[0], subs[1], subs[2], subs[3], weights.w_f, weights.w_a, weights.w_i, weights.w_r
    )
    for j in range(25):
        expected = quality_score(
            FairSubScores(subs[0][j], subs[1][j], subs[2][j], subs[3][j]), weights
        )
        assert scores[j] == expected


def test_combined_kernel_matches_scalar_function(python_kernels):
    quality = np.array([0.8, 1.0, 0.5], dtype=np.float64)
    impact = np.array([impact_score([1.0]), 0.0, impact_score([2.0, 3.0])], dtype=np.float64)
    collab = np.array(
        [collaboration_score(CollaborationCounts(10, 4)), 2.0, 1.0], dtype=np.float64
    )
    combined = python_kernels.combined_scores(quality, impact, collab)
    for j in range(3):
        expected = object_score(float(quality[j]), float(impact[j]), float(collab[j])).score
        assert combined[j] == expected


# -- numba path is bit-identical to the python path ---------------------------


def _random_case(seed: int):
    rng = np.random.default_rng(seed)
    n_objects = int(rng.integers(0, 200))
    counts = rng.integers(0, 12, size=n_objects)
    offsets = np.zeros(n_objects + 1, dtype=np.int64)
    np.cumsum(counts, out=offsets[1:])
    values = rng.uniform(0.0, 50.0, size=int(offsets[-1]))
    # Sprinkle in exact zeros so the zero-total branch is exercised.
    if values.size:
        values[rng.uniform(size=values.size) < 0.1] = 0.0
    subs = rng.uniform(0.0, 1.0, size=(4, n_objects))
    authors = rng.integers(1, 40, size=n_objects).astype(np.float64)
    institutions = rng.integers(1, 10, size=n_objects).astype(np.float64)
    return values, offsets, subs, authors, institutions


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
@pytest.mark.parametrize("formula_at_zero", [False, True])
def test_backends_bit_identical(python_kernels, numba_kernels, seed, formula_at_zero):
    values, offsets, subs, authors, institutions = _random_case(seed)
    weights = FairWeights(0.3, 0.3, 0.2, 0.2)

    results = {}
    for kernels in (python_kernels, numba_kernels):
        totals = kernels.segment_totals(values, offsets)
        impact = kernels.impact_scores(totals, formula_at_zero)
        collab = kernels.collaboration_scores(authors, institutions)
        quality = kernels.quality_scores(
            subs[0], subs[1], subs[2], subs[3],
            weights.w_f, weights.w_a, weights.w_i, weights.w_r,
        )
        combined = kernels.combined_scores(quality, impact, collab)
        results[kernels.name] = (totals, impact, collab, quality, combined)

    for left, right in zip(results["python"], results["numba"]):
        assert left.shape == right.shape
        assert np.array_equal(left, right)  # bitwise, no tolerance


def test_backends_bit_identical_on_empty_arrays(python_kernels, numba_kernels):
    values = np.empty(0, dtype=np.float64)
    offsets = np.zeros(1, dtype=np.int64)
    for kernels in (python_kernels, numba_kernels):
        assert kernels.segment_totals(values, offsets).shape == (0,)
        assert kernels.impact_scores(values, False).shape == (0,)
        assert kernels.collaboration_scores(values, values).shape == (0,)
        assert kernels.combined_scores(values, values, values).shape == (0,)
