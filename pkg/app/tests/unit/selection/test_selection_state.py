"""Tests for the selection state primitives."""

from __future__ import annotations

import logging

import numpy as np
import pytest

from app.errors import DegenerateKernelError, RankToleranceError, SingularSystemError
from app.kernels import GaussianKernel, PolynomialKernel, SampleMatrix, gram
from app.selection import (
    DenseGramSource,
    approximation_error,
    approximation_errors,
    error_vector,
    initial_sample,
    initial_state,
    numerical_floor,
    solve_Z,
    update_Z,
)
from app.selection.state import pseudo_errors


def _setup(rng: np.random.Generator, m: int = 30):
    X = SampleMatrix(rng.standard_normal((2, m)))
    spec = GaussianKernel(0.5)
    G = gram(spec, X)
    return spec, X, G


def test_initial_sample_maximises_normalised_row_mass(rng: np.random.Generator) -> None:
    spec, X, G = _setup(rng)
    values = G.values

    expected = int(np.argmax((values**2).sum(axis=1) / np.diag(values)))

    assert initial_sample(spec, X, source=DenseGramSource(G)) == expected


def test_initial_sample_breaks_ties_by_lowest_index() -> None:
    X = SampleMatrix(np.zeros((2, 4)))

    assert initial_sample(GaussianKernel(1.0), X) == 0


def test_initial_sample_rejects_degenerate_kernel() -> None:
    X = SampleMatrix(np.zeros((2, 5)))

    with pytest.raises(DegenerateKernelError):
        initial_sample(PolynomialKernel(0.0, 2), X)


def test_update_matches_direct_solve(rng: np.random.Generator) -> None:
    _, _, G = _setup(rng)
    source = DenseGramSource(G)
    state = initial_state(source, 0)

    for _ in range(5):
        delta = error_vector(state, source)
        j = int(np.argmax(delta))
        state = update_Z(state, int(state.remaining[j]), float(delta[j]), source)
        direct = solve_Z(G, state.selected, state.remaining)
        assert np.allclose(state.Z, direct, rtol=1e-8, atol=1e-10)


def test_error_vector_matches_approximation_errors(rng: np.random.Generator) -> None:
    spec, X, G = _setup(rng)
    source = DenseGramSource(G)
    state = initial_state(source, 3)
    delta = error_vector(state, source)
    state = update_Z(state, int(state.remaining[int(np.argmax(delta))]), float(delta.max()), source)

    direct = approximation_errors(spec, X.subset(state.selected), X.subset(state.remaining))

    assert np.allclose(error_vector(state, source), direct, atol=1e-10)


def test_errors_of_selected_samples_are_zero(rng: np.random.Generator) -> None:
    spec, X, _ = _setup(rng)
    X_tilde = X.subset([0, 4, 9])

    assert approximation_error(spec, X_tilde, X.column(4)) == pytest.approx(0.0, abs=1e-10)
    assert 0.0 <= approximation_error(spec, X_tilde, X.column(1)) <= 1.0


def test_update_refuses_pivot_below_floor(rng: np.random.Generator) -> None:
    _, _, G = _setup(rng)
    source = DenseGramSource(G)
    state = initial_state(source, 0)

    with pytest.raises(RankToleranceError):
        update_Z(state, int(state.remaining[0]), 0.0, source)


def test_solve_z_rejects_singular_block() -> None:
    X = SampleMatrix(np.array([[1.0, 1.0, 2.0]]))
    G = gram(GaussianKernel(1.0), X)

    with pytest.raises(SingularSystemError):
        solve_Z(G, [0, 1], [2])


def test_state_position_lookup(rng: np.random.Generator) -> None:
    _, _, G = _setup(rng, m=6)
    state = initial_state(DenseGramSource(G), 2)

    assert state.position(3) == 2
    with pytest.raises(KeyError):
        state.position(2)


def test_update_accepts_pivot_exactly_at_floor(rng: np.random.Generator) -> None:
    _, _, G = _setup(rng)
    source = DenseGramSource(G)
    state = initial_state(source, 0)
    floor = numerical_floor(state.diag_k)

    grown = update_Z(state, int(state.remaining[0]), floor, source)

    assert grown.size == 2
    with pytest.raises(RankToleranceError):
        update_Z(state, int(state.remaining[0]), 0.5 * floor, source)


def test_zero_lambda_leaves_top_block_unchanged() -> None:
    # Linear kernel: sample 2 is orthogonal to every other sample.
    X = SampleMatrix(np.array([[1.0, 1.0, 0.0, 2.0], [0.0, 1.0, 0.0, 1.0], [0.0, 0.0, 1.0, 0.0]]))
    source = DenseGramSource(gram(PolynomialKernel(0.0, 1), X))
    state = initial_state(source, 0)
    before = state.Z.copy()

    grown = update_Z(state, 2, float(error_vector(state, source)[state.position(2)]), source)

    assert grown.remaining.tolist() == [1, 3]
    assert np.array_equal(grown.Z[0], np.delete(before[0], state.position(2)))
    assert np.allclose(grown.Z[1], 0.0)


def test_bordered_inverse_from_state_inverts_grown_gram(rng: np.random.Generator) -> None:
    _, _, G = _setup(rng)
    source = DenseGramSource(G)
    state = initial_state(source, 0)
    for _ in range(3):
        delta = error_vector(state, source)
        j = int(np.argmax(delta))
        state = update_Z(state, int(state.remaining[j]), float(delta[j]), source)

    delta = error_vector(state, source)
    j = int(np.argmax(delta))
    new_index, z, schur = int(state.remaining[j]), state.Z[:, j], float(delta[j])
    inverse = np.linalg.inv(G.block(state.selected, state.selected))
    bordered = np.block(
        [
            [inverse + np.outer(z, z) / schur, -z[:, None] / schur],
            [-z[None, :] / schur, np.array([[1.0 / schur]])],
        ]
    )
    grown = [*state.selected, new_index]

    assert np.allclose(bordered @ G.block(grown, grown), np.eye(len(grown)), atol=1e-8)


def test_deep_negative_residual_is_logged_and_clamped(caplog: pytest.LogCaptureFixture) -> None:
    with caplog.at_level(logging.WARNING, logger="app.selection.state"):
        errors = pseudo_errors(np.array([[1.0]]), np.array([[2.0]]), np.array([1.0]))

    assert errors.tolist() == [0.0]
    assert any("round-off band" in record.getMessage() for record in caplog.records)


def test_round_off_negative_residual_is_clamped_quietly(caplog: pytest.LogCaptureFixture) -> None:
    with caplog.at_level(logging.WARNING, logger="app.selection.state"):
        errors = pseudo_errors(np.array([[1.0]]), np.array([[1.0]]), np.array([1.0 - 1e-13]))

    assert errors.tolist() == [0.0]
    assert not caplog.records
