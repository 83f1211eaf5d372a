"""
Periodic lattice primitives shared by every solver: image validation,
circulant difference matrices and the 2-D DFT pair.

The DFT follows the numpy convention: unnormalized forward transform and
a 1/(d1*d2) factor on the inverse. Solvers only ever divide spectra by
spectra, so the convention cancels out.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np
import numpy.typing as npt
from scipy import fft
from typing_extensions import Self

from modules.utils import OperatorError

Image = npt.NDArray[np.float64]
Spectrum = npt.NDArray[np.complex128]

ROW_AXIS = -2
COL_AXIS = -1


class Axis(Enum):
    """Lattice axis a difference matrix acts along."""

    ROWS = "rows"
    COLS = "cols"


class Side(Enum):
    """How a circulant matrix D is applied to an image x."""

    LEFT = "left"  # D x
    LEFT_TRANSPOSE = "left-transpose"  # D^T x
    RIGHT = "right"  # x D
    RIGHT_TRANSPOSE = "right-transpose"  # x D^T


_SIDE_AXIS = {
    Side.LEFT: Axis.ROWS,
    Side.LEFT_TRANSPOSE: Axis.ROWS,
    Side.RIGHT: Axis.COLS,
    Side.RIGHT_TRANSPOSE: Axis.COLS,
}


def as_image(x: npt.ArrayLike, name: str = "image") -> Image:
    """Validate and convert an array into an Image.

    Args:
        x (npt.ArrayLike): candidate 2-D array
        name (str, optional): name used in error messages. Defaults to "image".

    Raises:
        OperatorError: if the array is not 2-D, empty, or holds NaN/Inf

    Returns:
        Image: float64 copy of the input
    """
    arr = np.array(x, dtype=np.float64)
    if arr.ndim != 2 or 0 in arr.shape:
        raise OperatorError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise OperatorError(f"{name} contains non-finite values")
    return arr


def forward_difference(x: np.ndarray, axis: int) -> np.ndarray:
    """Periodic forward difference x[k+1] - x[k] along an axis."""
    return np.roll(x, -1, axis=axis) - x


def backward_difference(x: np.ndarray, axis: int) -> np.ndarray:
    """Periodic backward difference x[k] - x[k-1] along an axis."""
    return x - np.roll(x, 1, axis=axis)


@dataclass(frozen=True)
class CirculantDiff:
    """Periodic difference matrix with -1 on the diagonal, +1 above it and
    +1 in the bottom-left corner."""

    axis: Axis
    size: int

    @classmethod
    def for_image(cls, x: np.ndarray, axis: Axis) -> Self:
        """Build the difference matrix matching one axis of an image.

        Args:
            x (np.ndarray): host image
            axis (Axis): axis the matrix acts along

        Returns:
            Self: the matching difference matrix
        """
        size = x.shape[ROW_AXIS] if axis is Axis.ROWS else x.shape[COL_AXIS]
        return cls(axis=axis, size=size)

    def matrix(self) -> np.ndarray:
        """Dense matrix realization, used for checking."""
        mat = np.eye(self.size, k=1) - np.eye(self.size)
        mat[self.size - 1, 0] += 1.0
        return mat

    def apply(self, x: np.ndarray, side: Side) -> np.ndarray:
        """Apply the matrix to an image (or a stack of images).

        Args:
            x (np.ndarray): image with at least 2 dims
            side (Side): multiplication side

        Raises:
            OperatorError: if side and axis disagree or the dims do not match

        Returns:
            np.ndarray: product with the same shape as x
        """
        if _SIDE_AXIS[side] is not self.axis:
            raise OperatorError(f"Side {side.value} is not valid for a {self.axis.value} matrix")
        axis = ROW_AXIS if self.axis is Axis.ROWS else COL_AXIS
        if x.ndim < 2 or x.shape[axis] != self.size:
            raise OperatorError(
                f"Matrix of size {self.size} cannot act on {self.axis.value} of shape {x.shape}"
            )
        if side in (Side.LEFT, Side.RIGHT_TRANSPOSE):
            return forward_difference(x, axis)
        return -backward_difference(x, axis)


def apply_circulant(diff: CirculantDiff, x: np.ndarray, side: Side) -> np.ndarray:
    """Apply a circulant difference matrix, see CirculantDiff.apply."""
    return diff.apply(x, side)


def dft_forward(x: np.ndarray) -> Spectrum:
    """2-D DFT over the last two axes, F(z) = sum_k x[k] z^-k.

    Args:
        x (np.ndarray): image or stack of images

    Raises:
        OperatorError: if the input is not at least 2-D or holds NaN/Inf

    Returns:
        Spectrum: complex spectrum of the same shape
    """
    if x.ndim < 2:
        raise OperatorError(f"DFT needs at least 2 dims, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise OperatorError("DFT input contains non-finite values")
    return fft.fft2(x)


def dft_inverse(spectrum: Spectrum) -> Image:
    """Inverse 2-D DFT over the last two axes, real part only.

    Raises:
        OperatorError: if the spectrum holds NaN/Inf

    Returns:
        Image: real part of the inverse transform
    """
    if not np.all(np.isfinite(spectrum)):
        raise OperatorError("Spectrum contains non-finite values")
    return fft.ifft2(spectrum).real


def frequency_grid(shape: tuple[int, int]) -> tuple[np.ndarray, np.ndarray]:
    """Unit-circle frequency variables of the DFT.

    Args:
        shape (tuple[int, int]): lattice dims (d1, d2)

    Returns:
        tuple[np.ndarray, np.ndarray]: z1 as a (d1, 1) column and z2 as a
            (1, d2) row, z = exp(2j*pi*k/d)
    """
    d1, d2 = shape
    z1 = np.exp(2j * np.pi * np.arange(d1) / d1)[:, None]
    z2 = np.exp(2j * np.pi * np.arange(d2) / d2)[None, :]
    return z1, z2
