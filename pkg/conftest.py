"""Repository-wide pytest fixtures."""

from __future__ import annotations

from collections.abc import Generator

import numpy as np
import pytest

from app.config import reload_config
from app.data import LabeledDataset, generate_fpu


def pytest_configure(config: pytest.Config) -> None:
    config.addinivalue_line("markers", "slow: many-trial or timing suites (deselect with -m 'not slow')")


@pytest.fixture(autouse=True)
def _set_default_env(monkeypatch: pytest.MonkeyPatch, tmp_path) -> Generator[None, None, None]:
    """Deterministic settings: outputs under tmp_path, dense Grams, quiet progress."""

    monkeypatch.setenv("ENV", "test")
    monkeypatch.setenv("KFSA_OUTPUT_DIR", str(tmp_path / "results"))
    monkeypatch.setenv("KFSA_CACHE_DIR", str(tmp_path / "cache"))
    monkeypatch.setenv("KFSA_GRAM_WORKERS", "1")
    monkeypatch.setenv("KFSA_GRAM_CHUNK_ROWS", "256")
    monkeypatch.setenv("KFSA_QUIET_PROGRESS", "true")
    reload_config()
    yield
    monkeypatch.undo()
    reload_config()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(1234))


@pytest.fixture
def fpu_small() -> LabeledDataset:
    """``d = 3`` chain with 300 samples."""

    return generate_fpu(3, 300, seed=7)
