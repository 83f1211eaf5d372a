"""
Synthetic test images with known partitions, on the [0, 1] intensity scale.
"""

from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum

import numpy as np

from modules.operators.lattice import Image
from modules.utils import OperatorError, SettingsError

MIN_SIZE = 8
STRIPE_PERIOD = 4


class SyntheticNames(Enum):
    """Available synthetic image names."""

    TWO_PLATEAU = "two-plateau"
    SQUARES_STRIPES = "squares-stripes"
    STAR_FIELD = "star-field"
    ILLUMINATION_RAMP = "illumination-ramp"
    THREE_LEVEL = "three-level"


@dataclass
class GroundTruth:
    """Known partition of a synthetic image.

    Attributes:
        labels: integer phase of every pixel
        texture_mask: True where texture was painted
        clean: noise-free image
    """

    labels: np.ndarray
    texture_mask: np.ndarray
    clean: Image


def _grid(size: int) -> tuple[np.ndarray, np.ndarray]:
    return np.mgrid[0:size, 0:size]


def _stripes(size: int) -> Image:
    _, cols = _grid(size)
    return np.sin(2.0 * np.pi * cols / STRIPE_PERIOD)


def _plateaus(labels: np.ndarray, levels: list[float]) -> Image:
    return np.asarray(levels)[labels]


def two_plateau(size: int, rng: np.random.Generator) -> tuple[Image, GroundTruth]:
    """Bright centered square (0.94) on a dark background (0.38)."""
    rows, cols = _grid(size)
    quarter = size // 4
    inside = (rows >= quarter) & (rows < size - quarter) & (cols >= quarter) & (cols < size - quarter)
    labels = inside.astype(int)
    clean = _plateaus(labels, [0.38, 0.94])
    return clean.copy(), GroundTruth(labels, np.zeros_like(inside), clean)


def squares_stripes(size: int, rng: np.random.Generator) -> tuple[Image, GroundTruth]:
    """Bright square on a dark background with a vertical stripe patch in the background."""
    rows, cols = _grid(size)
    half = size // 2
    square = (rows < half) & (cols < half)
    patch = (rows >= half + size // 8) & (rows < size - size // 8) & (cols >= half)
    labels = square.astype(int)
    cartoon = _plateaus(labels, [0.3, 0.8])
    clean = cartoon + 0.15 * _stripes(size) * patch
    return clean.copy(), GroundTruth(labels, patch, clean)


def star_field(size: int, rng: np.random.Generator) -> tuple[Image, GroundTruth]:
    """Gray disk on a dark sky sprinkled with isolated bright points."""
    rows, cols = _grid(size)
    center = (size - 1) / 2.0
    disk = (rows - center) ** 2 + (cols - center) ** 2 <= (size / 4.0) ** 2
    labels = disk.astype(int)
    n_stars = max(1, size * size // 64)
    stars = np.zeros((size, size), dtype=bool)
    stars[rng.integers(0, size, n_stars), rng.integers(0, size, n_stars)] = True
    stars &= ~disk
    clean = _plateaus(labels, [0.1, 0.6])
    clean[stars] = 0.9
    return clean.copy(), GroundTruth(labels, stars, clean)


def illumination_ramp(size: int, rng: np.random.Generator) -> tuple[Image, GroundTruth]:
    """Three vertical plateaus (0.2, 0.5, 0.8) under a top-to-bottom illumination ramp of 0.1."""
    rows, cols = _grid(size)
    labels = np.minimum(3 * cols // size, 2)
    ramp = 0.1 * rows / max(size - 1, 1)
    clean = _plateaus(labels, [0.2, 0.5, 0.8]) + ramp
    return clean.copy(), GroundTruth(labels, np.zeros((size, size), dtype=bool), clean)


def three_level(size: int, rng: np.random.Generator) -> tuple[Image, GroundTruth]:
    """Top band at 0.1, bottom-left at 0.5 and bottom-right at 0.9."""
    rows, cols = _grid(size)
    labels = np.where(rows < size // 3, 0, np.where(cols < size // 2, 1, 2))
    clean = _plateaus(labels, [0.1, 0.5, 0.9])
    return clean.copy(), GroundTruth(labels, np.zeros((size, size), dtype=bool), clean)


GENERATORS: dict[SyntheticNames, Callable[[int, np.random.Generator], tuple[Image, GroundTruth]]] = {
    SyntheticNames.TWO_PLATEAU: two_plateau,
    SyntheticNames.SQUARES_STRIPES: squares_stripes,
    SyntheticNames.STAR_FIELD: star_field,
    SyntheticNames.ILLUMINATION_RAMP: illumination_ramp,
    SyntheticNames.THREE_LEVEL: three_level,
}


def generate(name: str, size: int, rng: np.random.Generator) -> tuple[Image, GroundTruth]:
    """Build a named synthetic image.

    Args:
        name (str): one of the SyntheticNames values
        size (int): side length, at least 8
        rng (np.random.Generator): randomness for generators that scatter features

    Raises:
        SettingsError: if the name is unknown or the size too small

    Returns:
        tuple[Image, GroundTruth]: clean image and its partition
    """
    try:
        generator = GENERATORS[SyntheticNames(name)]
    except ValueError as err:
        valid = ", ".join(n.value for n in SyntheticNames)
        raise SettingsError(f"Synthetic image is not recognized {name}, expected one of {valid}") from err
    if size < MIN_SIZE:
        raise SettingsError(f"Synthetic size must be at least {MIN_SIZE}, got {size}")
    return generator(size, rng)


def add_gaussian_noise(f: Image, sigma: float, rng: np.random.Generator) -> Image:
    """Add i.i.d. N(0, sigma^2) noise, no clipping.

    Raises:
        OperatorError: if sigma is negative
    """
    if sigma < 0:
        raise OperatorError(f"Noise sigma must be non-negative, got {sigma}")
    if sigma == 0:
        return f.copy()
    return f + rng.normal(0.0, sigma, size=f.shape)
