"""
Element-wise proximal maps: soft-thresholding, transform-domain
thresholding for the noise ball, unit clipping and the phase softmax.
"""

from dataclasses import dataclass, field

import numpy as np
import pywt

from modules.utils import OperatorError

from .lattice import Image
from .transforms import DEFAULT_WAVELET, WaveletTransform, get_transform

_TINY = np.finfo(np.float64).tiny


def shrink(x: np.ndarray, tau: float) -> np.ndarray:
    """Soft-thresholding sign(x) * max(|x| - tau, 0).

    Entries with |x| <= tau come out as exact zeros.

    Args:
        x (np.ndarray): input array
        tau (float): threshold

    Raises:
        OperatorError: if tau is negative

    Returns:
        np.ndarray: thresholded array
    """
    if tau < 0:
        raise OperatorError(f"Shrink threshold must be non-negative, got {tau}")
    return np.sign(x) * np.maximum(np.abs(x) - tau, 0.0)


def cst(x: Image, nu: float, transform: WaveletTransform) -> Image:
    """Coefficient soft-thresholding T^-1(shrink(T(x), nu)).

    Args:
        x (Image): input image
        nu (float): coefficient threshold
        transform (WaveletTransform): coefficient transform built for x's dims

    Raises:
        OperatorError: if nu is negative or the dims do not match the transform

    Returns:
        Image: thresholded image
    """
    if nu < 0:
        raise OperatorError(f"Noise threshold must be non-negative, got {nu}")
    coeffs = transform.forward(x)
    return transform.inverse(pywt.threshold(coeffs, nu, mode="soft"))


@dataclass(frozen=True)
class NoiseBall:
    """Set of images whose transform coefficients are bounded by nu."""

    nu: float
    transform: WaveletTransform = field(repr=False)

    @classmethod
    def for_shape(
        cls, nu: float, shape: tuple[int, int], wavelet: str = DEFAULT_WAVELET
    ) -> "NoiseBall":
        """Build the ball for a lattice with a cached transform.

        Args:
            nu (float): coefficient bound
            shape (tuple[int, int]): lattice dims
            wavelet (str, optional): wavelet name. Defaults to "haar".

        Returns:
            NoiseBall: the noise ball
        """
        if nu < 0:
            raise OperatorError(f"Noise threshold must be non-negative, got {nu}")
        return cls(nu=float(nu), transform=get_transform(tuple(shape), wavelet))

    def project(self, x: Image) -> Image:
        """Euclidean projection of x onto the ball."""
        return project_noise(x, self)


def project_noise(x: Image, ball: NoiseBall) -> Image:
    """Noise-ball projection x - cst(x, nu)."""
    if ball.nu == 0:
        return np.zeros_like(x, dtype=np.float64)
    return x - cst(x, ball.nu, ball.transform)


def clip_unit(x: np.ndarray) -> np.ndarray:
    """Clamp every entry into [0, 1]."""
    return np.clip(x, 0.0, 1.0)


def softmax_phases(scores: np.ndarray, xi: float) -> np.ndarray:
    """Per-pixel softmax exp(-score_n / xi) / sum_i exp(-score_i / xi).

    Scores are shifted by their per-pixel minimum before exponentiation.
    Weights that underflow are floored at the smallest normal float so
    every phase stays strictly positive.

    Args:
        scores (np.ndarray): (N, d1, d2) stack of phase scores
        xi (float): smoothing parameter

    Raises:
        OperatorError: if xi <= 0 or fewer than 2 phases are given

    Returns:
        np.ndarray: (N, d1, d2) phases summing to one at every pixel
    """
    if not xi > 0:
        raise OperatorError(f"Smoothing parameter must be positive, got {xi}")
    if scores.ndim != 3 or scores.shape[0] < 2:
        raise OperatorError(f"Need a stack of at least 2 phase scores, got shape {scores.shape}")
    shifted = scores - scores.min(axis=0, keepdims=True)
    weights = np.exp(-shifted / xi)
    phases = weights / weights.sum(axis=0, keepdims=True)
    return np.maximum(phases, _TINY)
