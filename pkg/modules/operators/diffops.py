"""
Directional difference operators on the periodic lattice.

Direction l of K has angle pi*l/K. A DirField is a (K, d1, d2) stack with
one layer per direction.
"""

import numpy as np
import numpy.typing as npt

from modules.utils import OperatorError

from .lattice import (
    COL_AXIS,
    ROW_AXIS,
    Image,
    backward_difference,
    forward_difference,
    frequency_grid,
)

DirField = npt.NDArray[np.float64]


def direction_weights(n_dirs: int) -> tuple[np.ndarray, np.ndarray]:
    """Row and column weights sin(pi*l/K), cos(pi*l/K) of every direction.

    Args:
        n_dirs (int): number of directions K

    Raises:
        OperatorError: if K < 1

    Returns:
        tuple[np.ndarray, np.ndarray]: (sin, cos) arrays of length K
    """
    if n_dirs < 1:
        raise OperatorError(f"Direction count must be at least 1, got {n_dirs}")
    angles = np.pi * np.arange(n_dirs) / n_dirs
    return np.sin(angles), np.cos(angles)


def _check_direction(index: int, n_dirs: int) -> None:
    if n_dirs < 1 or not 0 <= index < n_dirs:
        raise OperatorError(f"Direction {index} out of range for K={n_dirs}")


def _check_field(g: DirField, n_dirs: int) -> None:
    if g.ndim != 3 or g.shape[0] != n_dirs:
        raise OperatorError(f"Expected a field with {n_dirs} layers, got shape {g.shape}")


def dir_fwd_diff(f: Image, index: int, n_dirs: int) -> Image:
    """Directional forward difference sin(a) D1 f + cos(a) f D2^T."""
    _check_direction(index, n_dirs)
    angle = np.pi * index / n_dirs
    return np.sin(angle) * forward_difference(f, ROW_AXIS) + np.cos(angle) * forward_difference(
        f, COL_AXIS
    )


def dir_bwd_diff(f: Image, index: int, n_dirs: int) -> Image:
    """Directional backward difference -[sin(a) D1^T f + cos(a) f D2]."""
    _check_direction(index, n_dirs)
    angle = np.pi * index / n_dirs
    return np.sin(angle) * backward_difference(f, ROW_AXIS) + np.cos(
        angle
    ) * backward_difference(f, COL_AXIS)


def dir_grad(f: Image, n_dirs: int) -> DirField:
    """Stack of all K forward differences of f.

    Args:
        f (Image): input image
        n_dirs (int): number of directions K

    Returns:
        DirField: (K, d1, d2) field, layer l = dir_fwd_diff(f, l, K)
    """
    sin, cos = direction_weights(n_dirs)
    rows = forward_difference(f, ROW_AXIS)
    cols = forward_difference(f, COL_AXIS)
    return sin[:, None, None] * rows + cos[:, None, None] * cols


def dir_div(g: DirField, n_dirs: int) -> Image:
    """Backward-stencil divergence sum_l dir_bwd_diff(g_l, l, K).

    This is the negative adjoint of dir_grad.

    Args:
        g (DirField): (K, d1, d2) field
        n_dirs (int): number of directions K

    Raises:
        OperatorError: if the field does not have K layers

    Returns:
        Image: divergence image
    """
    _check_field(g, n_dirs)
    sin, cos = direction_weights(n_dirs)
    rows = np.tensordot(sin, g, axes=1)
    cols = np.tensordot(cos, g, axes=1)
    return backward_difference(rows, ROW_AXIS) + backward_difference(cols, COL_AXIS)


def dir_div_fwd(g: DirField, n_dirs: int) -> Image:
    """Forward-stencil sum sum_l dir_fwd_diff(g_l, l, K).

    Its adjoint is -dir_grad_bwd; the texture constraint
    v = sum_s d+_s g_s uses this form.
    """
    _check_field(g, n_dirs)
    sin, cos = direction_weights(n_dirs)
    rows = np.tensordot(sin, g, axes=1)
    cols = np.tensordot(cos, g, axes=1)
    return forward_difference(rows, ROW_AXIS) + forward_difference(cols, COL_AXIS)


def dir_grad_bwd(f: Image, n_dirs: int) -> DirField:
    """Stack of all K backward differences of f (adjoint of -dir_div_fwd)."""
    sin, cos = direction_weights(n_dirs)
    rows = backward_difference(f, ROW_AXIS)
    cols = backward_difference(f, COL_AXIS)
    return sin[:, None, None] * rows + cos[:, None, None] * cols


def magnitude(g: DirField) -> Image:
    """Per-pixel Euclidean norm across the layers of a field."""
    return np.sqrt(np.sum(g**2, axis=0))


def dtv_norm(f: Image, n_dirs: int) -> float:
    """Directional total variation ||grad_K f||_1 with per-pixel magnitude."""
    return float(np.sum(magnitude(dir_grad(f, n_dirs))))


def adjoint_residual(f: Image, g: DirField, n_dirs: int) -> float:
    """Residual <grad_K f, g> + <f, div_K g> of the adjoint identity.

    Args:
        f (Image): image
        g (DirField): (K, d1, d2) field
        n_dirs (int): number of directions K

    Returns:
        float: residual, zero up to rounding
    """
    _check_field(g, n_dirs)
    if g.shape[1:] != f.shape:
        raise OperatorError(f"Field shape {g.shape} does not match image shape {f.shape}")
    return float(np.vdot(dir_grad(f, n_dirs), g) + np.vdot(f, dir_div(g, n_dirs)))


def dir_symbols(n_dirs: int, shape: tuple[int, int]) -> np.ndarray:
    """DFT symbols of the forward differences.

    Args:
        n_dirs (int): number of directions K
        shape (tuple[int, int]): lattice dims

    Returns:
        np.ndarray: (K, d1, d2) complex array, sin(a)(z1 - 1) + cos(a)(z2 - 1);
            the conjugate is the symbol of the transpose
    """
    sin, cos = direction_weights(n_dirs)
    z1, z2 = frequency_grid(shape)
    return sin[:, None, None] * (z1 - 1.0) + cos[:, None, None] * (z2 - 1.0)
