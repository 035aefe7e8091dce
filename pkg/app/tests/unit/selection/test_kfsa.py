"""Tests for greedy kFSA selection."""

from __future__ import annotations

from math import comb

import numpy as np
import pytest

from app.data import generate_fpu
from app.errors import ConfigError
from app.kernels import GaussianKernel, PolynomialKernel, SampleMatrix, gram
from app.selection import (
    SelectionState,
    approximation_error,
    approximation_errors,
    chunked_select,
    extend_selection,
    kfsa_select,
    solve_Z,
)


def test_excluded_samples_are_below_epsilon(rng: np.random.Generator) -> None:
    X = SampleMatrix(rng.standard_normal((3, 120)))
    spec = GaussianKernel(0.4)
    epsilon = 1e-3

    result = kfsa_select(spec, X, epsilon)

    excluded = np.setdiff1d(np.arange(X.m), result.indices)
    errors = approximation_errors(spec, X.subset(result.selected), X.subset(excluded))
    assert np.all(errors < epsilon)
    assert result.final_max_error < epsilon
    assert not result.truncated


def test_selected_gram_admits_cholesky(rng: np.random.Generator) -> None:
    X = SampleMatrix(rng.standard_normal((2, 80)))
    spec = GaussianKernel(1.0)

    result = kfsa_select(spec, X, 1e-6)

    np.linalg.cholesky(gram(spec, X.subset(result.selected)).values)


def test_errors_at_selection_are_non_increasing(rng: np.random.Generator) -> None:
    X = SampleMatrix(rng.standard_normal((2, 100)))

    result = kfsa_select(GaussianKernel(0.8), X, 1e-8)

    errors = np.asarray(result.errors_at_selection)
    assert errors[0] == pytest.approx(1.0)
    assert np.all(np.diff(errors) <= 1e-12)
    assert len(set(result.selected)) == result.size


def test_z_matches_direct_solve_every_step(rng: np.random.Generator) -> None:
    X = SampleMatrix(rng.standard_normal((2, 60)))
    spec = GaussianKernel(0.5)
    G = gram(spec, X)
    seen: list[SelectionState] = []

    kfsa_select(spec, X, 1e-6, gram=G, callback=seen.append)

    assert seen
    for state in seen:
        if state.remaining.size:
            direct = solve_Z(G, state.selected, state.remaining)
            scale = max(1.0, float(np.abs(direct).max()))
            assert np.abs(state.Z - direct).max() <= 1e-8 * scale


def test_normalized_kernel_with_unit_epsilon_selects_one_sample(rng: np.random.Generator) -> None:
    X = SampleMatrix(rng.random((4, 50)))

    result = kfsa_select(GaussianKernel(2.0), X, 1.0)

    assert result.size == 1


@pytest.mark.parametrize("d", [2, 3, 4])
def test_polynomial_kernel_selects_feature_dimension(d: int) -> None:
    dataset = generate_fpu(d, 400, seed=d)

    result = kfsa_select(PolynomialKernel(1.0, 3), dataset.X, 1e-10)

    assert result.size == comb(d + 3, 3)


def test_max_selected_truncates(rng: np.random.Generator) -> None:
    X = SampleMatrix(rng.standard_normal((3, 90)))

    result = kfsa_select(GaussianKernel(0.5), X, 1e-10, max_selected=5)

    assert result.size == 5
    assert result.truncated
    assert result.final_max_error >= 1e-10


def test_low_memory_source_gives_same_selection(rng: np.random.Generator) -> None:
    X = SampleMatrix(rng.standard_normal((2, 70)))
    spec = GaussianKernel(0.6)

    dense = kfsa_select(spec, X, 1e-5, low_memory=False)
    lazy = kfsa_select(spec, X, 1e-5, low_memory=True)

    assert dense.selected == lazy.selected


def test_selection_is_deterministic(rng: np.random.Generator) -> None:
    X = SampleMatrix(rng.standard_normal((2, 50)))

    first = kfsa_select(GaussianKernel(1.0), X, 1e-4)
    second = kfsa_select(GaussianKernel(1.0), X, 1e-4)

    assert first == second


def test_single_sample_input() -> None:
    result = kfsa_select(GaussianKernel(1.0), SampleMatrix(np.array([[0.3], [0.1]])), 0.5)

    assert result.selected == (0,)


@pytest.mark.parametrize("epsilon", [0.0, -1.0, float("nan")])
def test_non_positive_epsilon_is_rejected(epsilon: float) -> None:
    X = SampleMatrix(np.eye(3))

    with pytest.raises(ConfigError):
        kfsa_select(GaussianKernel(1.0), X, epsilon)


def test_extend_selection_keeps_existing_samples(rng: np.random.Generator) -> None:
    spec = GaussianKernel(0.5)
    X = SampleMatrix(rng.standard_normal((2, 60)))
    base = kfsa_select(spec, X, 1e-3)
    selected_X = X.subset(base.selected)
    new_X = SampleMatrix(rng.standard_normal((2, 40)) + 1.5)

    extended = extend_selection(spec, selected_X, new_X, 1e-3)

    assert extended.selected[: base.size] == tuple(range(base.size))
    assert extended.size >= base.size
    combined = selected_X.hstack(new_X)
    excluded = np.setdiff1d(np.arange(combined.m), extended.indices)
    if excluded.size:
        errors = approximation_errors(spec, combined.subset(extended.selected), combined.subset(excluded))
        assert np.all(errors < 1e-3)


def test_result_dict_carries_method_and_threshold(rng: np.random.Generator) -> None:
    result = kfsa_select(GaussianKernel(1.0), SampleMatrix(rng.random((2, 10))), 0.1)

    payload = result.to_dict()

    assert payload["method"] == "kfsa"
    assert payload["epsilon"] == 0.1
    assert payload["selected"] == list(result.selected)


def test_fpu_count_is_invariant_under_column_permutation() -> None:
    dataset = generate_fpu(3, 500, seed=11)
    spec = PolynomialKernel(1.0, 3)
    order = np.random.Generator(np.random.PCG64(5)).permutation(dataset.X.m)

    straight = kfsa_select(spec, dataset.X, 1e-10)
    shuffled = kfsa_select(spec, dataset.X.subset(order), 1e-10)

    assert straight.size == shuffled.size == comb(3 + 3, 3)


def test_held_out_error_never_grows_as_selection_grows(rng: np.random.Generator) -> None:
    X = SampleMatrix(rng.standard_normal((2, 80)))
    held_out = rng.standard_normal(2)
    spec = GaussianKernel(0.6)
    seen: list[SelectionState] = []

    kfsa_select(spec, X, 1e-4, callback=seen.append)

    errors = [approximation_error(spec, X.subset(state.selected), held_out) for state in seen]
    assert len(errors) > 2
    assert np.all(np.diff(errors) <= 1e-10)


def test_chunked_selection_keeps_every_sample_below_epsilon(rng: np.random.Generator) -> None:
    X = SampleMatrix(rng.standard_normal((2, 150)))
    spec = GaussianKernel(0.5)

    result = chunked_select(spec, X, 1e-4, chunk_size=40)

    assert len(set(result.selected)) == result.size
    assert result.metadata["chunk_size"] == 40
    excluded = np.setdiff1d(np.arange(X.m), result.indices)
    errors = approximation_errors(spec, X.subset(result.selected), X.subset(excluded))
    assert np.all(errors < 1e-4)


def test_chunked_polynomial_selection_reaches_feature_dimension() -> None:
    dataset = generate_fpu(2, 600, seed=3)

    result = chunked_select(PolynomialKernel(1.0, 3), dataset.X, 1e-10, chunk_size=100)

    assert result.size == comb(2 + 3, 3)


def test_chunk_covering_all_samples_matches_plain_selection(rng: np.random.Generator) -> None:
    X = SampleMatrix(rng.standard_normal((2, 50)))
    spec = GaussianKernel(1.0)

    assert chunked_select(spec, X, 1e-5, chunk_size=50).selected == kfsa_select(spec, X, 1e-5).selected


def test_chunk_size_must_be_positive(rng: np.random.Generator) -> None:
    with pytest.raises(ConfigError):
        chunked_select(GaussianKernel(1.0), SampleMatrix(rng.random((2, 10))), 0.1, chunk_size=0)
