"""
Two-phase piecewise constant and texture segmentation,
f = c1 p + c2 (1 - p) + v + eps with a relaxed indicator p in [0, 1].
"""

import logging
from dataclasses import replace

import numpy as np

from modules.data.params_data import TwoPhaseParams
from modules.data.result_data import SegmentationResult
from modules.data.state_data import TwoPhaseState
from modules.operators.diffops import dir_div, dir_div_fwd, dir_grad, dir_symbols
from modules.operators.dualsolvers import update_phase_means
from modules.operators.lattice import Image, as_image, dft_forward, dft_inverse
from modules.operators.proximal import NoiseBall, clip_unit, shrink
from modules.utils import SolverError

from .base import SegmentationModel
from .dg3pd import adaptive_shrink, texture_field_update

logger = logging.getLogger(__name__)


def indicator_update(
    r: np.ndarray, lambda1: np.ndarray, fidelity: Image, beta1: float, beta4: float
) -> Image:
    """Fourier solve of the indicator subproblem followed by clipping to [0, 1].

    The quadratic term beta4/2 ||p||^2 keeps the denominator at least beta4
    at every frequency.

    Args:
        r (np.ndarray): (L, d1, d2) shrunk directional gradient of p
        lambda1 (np.ndarray): (L, d1, d2) multiplier of r = grad p
        fidelity (Image): linear data term -A1^2/2 + A2^2/2
        beta1 (float): penalty of r = grad p
        beta4 (float): penalty of the splitting constraint

    Raises:
        SolverError: if the denominator falls below beta4

    Returns:
        Image: clipped indicator
    """
    n_dirs = r.shape[0]
    symbols = dir_symbols(n_dirs, fidelity.shape)
    denominator = beta1 * np.sum(np.abs(symbols) ** 2, axis=0) + beta4
    if not np.min(denominator) >= beta4:
        raise SolverError("Indicator denominator dropped below beta4")
    rhs = -beta1 * dir_div(r + lambda1 / beta1, n_dirs) + beta4 * fidelity
    return clip_unit(dft_inverse(dft_forward(rhs) / denominator))


def twophase_step(state: TwoPhaseState, f: Image, params: TwoPhaseParams) -> TwoPhaseState:
    """One iteration of the two-phase model followed by the multiplier updates.

    Args:
        state (TwoPhaseState): previous iterate
        f (Image): input image
        params (TwoPhaseParams): solver parameters

    Returns:
        TwoPhaseState: next iterate, sharing the convergence history
    """
    n_l, n_s = params.n_dirs_l, params.n_dirs_s
    beta1, beta2, beta3, beta4 = params.beta1, params.beta2, params.beta3, params.beta4
    shift = state.lambda4 / beta4
    p = state.p

    c1, c2 = update_phase_means(
        f - state.v - state.eps + shift, np.stack([p, 1.0 - p]), np.array([state.c1, state.c2])
    )
    r = shrink(dir_grad(p, n_l) - state.lambda1 / beta1, 1.0 / beta1)
    t_w = state.g - state.lambda2 / beta2
    w = np.stack([adaptive_shrink(t_a, params.c_mu1) for t_a in t_w])
    g = texture_field_update(state.g, w, state.lambda2, state.v, state.lambda3, beta2, beta3)

    inside = f - c1 - state.eps + shift
    outside = f - c2 - state.eps + shift
    j = beta3 / (beta3 + beta4) * (dir_div_fwd(g, n_s) - state.lambda3 / beta3) + beta4 / (
        beta3 + beta4
    ) * (inside * p + outside * (1.0 - p))
    v = adaptive_shrink(j, params.c_mu2)

    fidelity = 0.5 * ((outside - v) ** 2 - (inside - v) ** 2)
    p = indicator_update(r, state.lambda1, fidelity, beta1, beta4)

    ball = NoiseBall.for_shape(params.nu, f.shape, params.wavelet)
    eps = ball.project((f - c1 - v + shift) * p + (f - c2 - v + shift) * (1.0 - p))
    residual = (f - c1 - v - eps) * p + (f - c2 - v - eps) * (1.0 - p)

    new_state = replace(
        state,
        p=p,
        c1=float(c1),
        c2=float(c2),
        v=v,
        eps=eps,
        g=g,
        r=r,
        w=w,
        lambda1=state.lambda1 + beta1 * (r - dir_grad(p, n_l)),
        lambda2=state.lambda2 + beta2 * (w - g),
        lambda3=state.lambda3 + beta3 * (v - dir_div_fwd(g, n_s)),
        lambda4=state.lambda4 + beta4 * residual,
    )
    new_state.history.record(state.cartoon, new_state.cartoon, f, residual)
    return new_state


def twophase_segment(f: Image, params: TwoPhaseParams) -> TwoPhaseState:
    """Run the two-phase model from the min-max normalized image.

    Args:
        f (Image): input image on the intensity_scale scale
        params (TwoPhaseParams): solver parameters

    Returns:
        TwoPhaseState: final iterate
    """
    state = TwoPhaseState.initial(f, params.n_dirs_l, params.n_dirs_s)
    for _ in range(params.iters):
        state = twophase_step(state, f, params)
        if state.history.converged(params.tol):
            break
    logger.info(
        "Two-phase model finished after %d iterations, c1=%.4g c2=%.4g",
        len(state.history),
        state.c1,
        state.c2,
    )
    return state


def twophase_binarize(state: TwoPhaseState, threshold: float = 0.5) -> Image:
    """Hard indicator p >= threshold.

    Args:
        state (TwoPhaseState): segmentation state
        threshold (float, optional): cut level in (0, 1). Defaults to 0.5.

    Returns:
        Image: 0/1 indicator
    """
    return (state.p >= threshold).astype(np.float64)


def twophase_segmented(state: TwoPhaseState, c3: float, threshold: float = 0.5) -> Image:
    """Display image c1 p_bin + c2 (1 - p_bin) + c3 (v != 0)."""
    p_bin = twophase_binarize(state, threshold)
    return state.c1 * p_bin + state.c2 * (1.0 - p_bin) + c3 * (state.v != 0)


class TwoPhaseModel(SegmentationModel):
    """Two-phase piecewise constant and texture segmentation."""

    params_type = TwoPhaseParams

    def __init__(self, params: TwoPhaseParams) -> None:
        self.params = params

    def run(self, f: Image) -> SegmentationResult:
        """Segment an image given on the [0, 1] scale.

        Args:
            f (Image): input image

        Returns:
            SegmentationResult: indicator, texture and residual
        """
        f = as_image(f)
        scale = self.params.intensity_scale
        state = twophase_segment(f * scale, self.params)
        p_bin = twophase_binarize(state, self.params.threshold)
        segmented = twophase_segmented(state, self.params.texture_mark, self.params.threshold)
        return SegmentationResult.from_twophase(
            f, state, np.stack([p_bin, 1.0 - p_bin]), segmented, scale
        )
