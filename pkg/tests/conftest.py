import os
from pathlib import Path

import numpy as np
import pytest

from orat.core import MNIST_DIR_ENV
from orat.data import Dataset
from orat.models import MLPParams, mlp_init
from orat.utils import Rng, make_rng


@pytest.fixture
def rng() -> Rng:
    return make_rng(0)


@pytest.fixture
def separable_ds() -> Dataset:
    """Two well-separated 2-D clusters of 10 points each."""
    grid = make_rng(11).uniform(0.05, 0.25, size=(20, 2))
    features = np.concatenate([grid[:10], grid[10:] + 0.7])
    labels = np.array([0] * 10 + [1] * 10)
    return Dataset(features, labels, num_classes=2)


@pytest.fixture
def small_params() -> MLPParams:
    return mlp_init((2, 8, 2), make_rng(5))


@pytest.fixture
def mnist_path() -> Path:
    directory = os.environ.get(MNIST_DIR_ENV)
    if not directory or not Path(directory).is_dir():
        pytest.skip(f"{MNIST_DIR_ENV} does not point at the MNIST IDX files")

    return Path(directory)
