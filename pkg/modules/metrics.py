"""
Diagnostics of decomposition and segmentation runs.

Intensities are compared on the [0, 1] scale.
"""

import itertools
from collections.abc import Sequence
from typing import TYPE_CHECKING

import numpy as np
import pandas as pd

from modules.operators.lattice import COL_AXIS, ROW_AXIS, Image
from modules.utils import OperatorError, log_relative_change

if TYPE_CHECKING:
    from modules.data.result_data import SegmentationResult

MAX_PERMUTED_LABELS = 6


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise OperatorError(f"Shape mismatch {a.shape} vs {b.shape}")


def mse(a: Image, b: Image) -> float:
    """Mean square error over the lattice.

    Raises:
        OperatorError: if the shapes differ
    """
    _check_same_shape(a, b)
    return float(np.mean((a - b) ** 2))


def sparsity_pct(v: Image) -> float:
    """Percentage of non-zero entries."""
    return 100.0 * np.count_nonzero(v) / v.size


def phase_histogram_mass(p: Image, band: float = 0.05) -> float:
    """Fraction of pixels with p <= band or p >= 1 - band.

    Args:
        p (Image): relaxed indicator
        band (float, optional): width of both end bins, in (0, 0.5).
            Defaults to 0.05.

    Raises:
        OperatorError: if band is out of range

    Returns:
        float: mass of the two end bins
    """
    if not 0.0 < band < 0.5:
        raise OperatorError(f"Histogram band must lie in (0, 0.5), got {band}")
    return float(np.mean((p <= band) | (p >= 1.0 - band)))


def label_map(phases: np.ndarray) -> np.ndarray:
    """Per-pixel index of the largest phase."""
    return np.argmax(phases, axis=0)


def extract_contours(p_bin: np.ndarray) -> Image:
    """Mark pixels whose periodic 4-neighborhood holds another label.

    Args:
        p_bin (np.ndarray): (N, d1, d2) binary phases

    Raises:
        OperatorError: if the phases are not binary

    Returns:
        Image: 1 on contour pixels, 0 elsewhere
    """
    if p_bin.ndim != 3 or not np.all((p_bin == 0) | (p_bin == 1)):
        raise OperatorError("Contours need a stack of binary phases")
    labels = label_map(p_bin)
    contour = np.zeros(labels.shape, dtype=bool)
    for shift, axis in itertools.product((1, -1), (ROW_AXIS, COL_AXIS)):
        contour |= np.roll(labels, shift, axis=axis) != labels
    return contour.astype(np.float64)


def relative_error_trace(iterates: Sequence[Image]) -> pd.Series:
    """Log relative change ln(||u_t - u_{t-1}|| / ||u_{t-1}||) of consecutive iterates.

    Args:
        iterates (Sequence[Image]): at least two iterates

    Raises:
        OperatorError: if fewer than two iterates are given

    Returns:
        pd.Series: trace indexed from iteration 1, -inf where u did not move
    """
    if len(iterates) < 2:
        raise OperatorError(f"Need at least 2 iterates, got {len(iterates)}")
    values = [log_relative_change(prev, cur) for prev, cur in zip(iterates, iterates[1:])]
    return pd.Series(values, index=pd.RangeIndex(1, len(values) + 1), name="err_u")


def pixel_accuracy(labels: np.ndarray, truth: np.ndarray) -> float:
    """Fraction of pixels labelled correctly under the best label matching.

    Args:
        labels (np.ndarray): integer label map
        truth (np.ndarray): integer ground truth map

    Raises:
        OperatorError: if the shapes differ or more than 6 labels are used

    Returns:
        float: best accuracy over all relabelings
    """
    _check_same_shape(labels, truth)
    n_labels = int(max(labels.max(), truth.max())) + 1
    if n_labels > MAX_PERMUTED_LABELS:
        raise OperatorError(f"Too many labels to match exhaustively: {n_labels}")
    best = 0.0
    for perm in itertools.permutations(range(n_labels)):
        best = max(best, float(np.mean(np.asarray(perm)[labels] == truth)))
    return best


def majority_accuracy(labels: np.ndarray, truth: np.ndarray) -> float:
    """Accuracy when every label takes the truth class it overlaps most.

    Several labels may map to the same class, so a model with more phases
    than the ground truth is not penalized for splitting a class.

    Raises:
        OperatorError: if the shapes differ
    """
    _check_same_shape(labels, truth)
    counts = pd.crosstab(labels.ravel(), truth.ravel())
    return float(counts.max(axis=1).sum() / labels.size)


def summary_frame(result: "SegmentationResult") -> pd.DataFrame:
    """Scalar metrics of a run as a one-row table.

    Args:
        result (SegmentationResult): finished run

    Returns:
        pd.DataFrame: one column per metric
    """
    scale = result.intensity_scale
    reconstruction_mse = mse(result.f, result.reconstruction)
    row = {
        "pipeline": result.pipeline,
        "iterations": len(result.history),
        "mse": reconstruction_mse,
        "mse_8bit": reconstruction_mse * scale**2,
        "sparsity_pct": sparsity_pct(result.v),
        "residual": result.history.residual[-1] if len(result.history) else float("nan"),
        "err_u": result.history.err_u[-1] if len(result.history) else float("nan"),
    }
    if result.phases is not None:
        row["phase_mass"] = float(
            np.mean([phase_histogram_mass(p_n) for p_n in result.phases])
        )
    return pd.DataFrame([row])
