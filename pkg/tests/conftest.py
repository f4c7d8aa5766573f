from pathlib import Path

import numpy as np
import pytest

from ebayes.harness.config import load_config as _load_config

DATA_DIR = Path(__file__).parent / ".data"


@pytest.fixture()
def rng():
    """
    A fresh, fixed-seed random stream per test.
    """
    return np.random.default_rng(20240611)


@pytest.fixture()
def load_config():
    """
    Provides a callable that reads an experiment configuration from the tests/.data directory.

    Returns:
        A function that takes a filename plus overrides and returns the ExperimentConfig.
    """

    def _fetch_config(filename: str, **overrides):
        file_path = DATA_DIR / filename
        if not file_path.exists():
            raise FileNotFoundError(f"Unable to locate: {file_path}")
        return _load_config(file_path, **overrides)

    return _fetch_config
