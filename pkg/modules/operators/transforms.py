"""Orthonormal periodic wavelet transform used as the noise coefficient domain."""

import functools

import numpy as np
import pywt

from modules.utils import OperatorError

DEFAULT_WAVELET = "haar"


def _dyadic_levels(shape: tuple[int, int], wavelet: pywt.Wavelet) -> int:
    """Number of levels both dims can be halved, capped by the filter length."""
    levels = 0
    d1, d2 = shape
    while d1 % 2 == 0 and d2 % 2 == 0 and d1 > 1 and d2 > 1:
        d1, d2 = d1 // 2, d2 // 2
        levels += 1
    return min(levels, pywt.dwt_max_level(min(shape), wavelet.dec_len))


class WaveletTransform:
    """Multilevel 2-D wavelet transform with periodization.

    With an orthogonal wavelet and dyadic dims the transform is orthonormal,
    so clipping coefficients is the exact Euclidean projection onto the
    coefficient box. Dims that cannot be halved give the identity.
    """

    def __init__(self, shape: tuple[int, int], wavelet: str = DEFAULT_WAVELET) -> None:
        """Prepare the transform for a lattice.

        Args:
            shape (tuple[int, int]): lattice dims (d1, d2)
            wavelet (str, optional): PyWavelets name of an orthogonal wavelet.
                Defaults to "haar".

        Raises:
            OperatorError: if the wavelet is unknown or not orthogonal
        """
        try:
            self.wavelet = pywt.Wavelet(wavelet)
        except ValueError as err:
            raise OperatorError(f"Unknown wavelet {wavelet}") from err
        if not self.wavelet.orthogonal:
            raise OperatorError(f"Wavelet {wavelet} is not orthogonal")
        self.shape = (int(shape[0]), int(shape[1]))
        self.levels = _dyadic_levels(self.shape, self.wavelet)
        self._slices = None
        if self.levels > 0:
            layout = pywt.wavedec2(
                np.zeros(self.shape), self.wavelet, mode="periodization", level=self.levels
            )
            _, self._slices = pywt.coeffs_to_array(layout)

    def _check(self, x: np.ndarray) -> None:
        if x.shape != self.shape:
            raise OperatorError(f"Transform built for {self.shape} got shape {x.shape}")

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Coefficients of an image packed into one array of the same shape."""
        self._check(x)
        if self.levels == 0:
            return np.array(x, dtype=np.float64)
        coeffs = pywt.wavedec2(x, self.wavelet, mode="periodization", level=self.levels)
        arr, _ = pywt.coeffs_to_array(coeffs)
        return arr

    def inverse(self, coeffs: np.ndarray) -> np.ndarray:
        """Image synthesized from a packed coefficient array."""
        self._check(coeffs)
        if self.levels == 0:
            return np.array(coeffs, dtype=np.float64)
        unpacked = pywt.array_to_coeffs(coeffs, self._slices, output_format="wavedec2")
        return pywt.waverec2(unpacked, self.wavelet, mode="periodization")


@functools.cache
def get_transform(shape: tuple[int, int], wavelet: str = DEFAULT_WAVELET) -> WaveletTransform:
    """Cached transform for a lattice shape.

    Args:
        shape (tuple[int, int]): lattice dims
        wavelet (str, optional): wavelet name. Defaults to "haar".

    Returns:
        WaveletTransform: shared transform instance
    """
    return WaveletTransform(shape, wavelet)
