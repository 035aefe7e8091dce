"""Tests for the FPU chain generator."""

from __future__ import annotations

import numpy as np
import pytest

from app.data import fpu_acceleration, generate_fpu
from app.errors import ConfigError


def test_acceleration_with_fixed_ends() -> None:
    X = np.array([[0.1], [0.0]])

    accel = fpu_acceleration(X, beta=0.7)

    # x1'' = (0 - 0.2 + 0) + 0.7 ((0 - 0.1)^3 - (0.1 - 0)^3)
    assert accel[0, 0] == pytest.approx(-0.2 - 0.7 * 0.002)
    # x2'' = (0 - 0 + 0.1) + 0.7 ((0 - 0)^3 - (0 - 0.1)^3)
    assert accel[1, 0] == pytest.approx(0.1 + 0.7 * 0.001)


def test_generator_is_seeded_and_bounded() -> None:
    first = generate_fpu(5, 200, seed=9)
    second = generate_fpu(5, 200, seed=9)
    other = generate_fpu(5, 200, seed=10)

    assert np.array_equal(first.X.data, second.X.data)
    assert not np.array_equal(first.X.data, other.X.data)
    assert np.all(np.abs(first.X.data) <= 0.1)
    assert first.Y.values.shape == (5, 200)
    assert first.metadata["seed"] == 9


def test_generator_rejects_empty_chain() -> None:
    with pytest.raises(ConfigError):
        generate_fpu(0, 10)
