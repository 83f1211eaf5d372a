import numpy as np
import pytest

from modules.data import config_data


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def small_image(rng: np.random.Generator) -> np.ndarray:
    return rng.random((8, 8))


@pytest.fixture
def two_level_image() -> np.ndarray:
    """16x16 image, left half 0.2 and right half 0.8."""
    image = np.full((16, 16), 0.2)
    image[:, 8:] = 0.8
    return image


@pytest.fixture(autouse=True)
def clear_settings():
    config_data.clear()
    yield
    config_data.clear()
