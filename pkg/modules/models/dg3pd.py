"""
Three-part decomposition f = u + v + eps by augmented Lagrangian splitting.

u is the cartoon with small directional total variation, v is the sparse
directional texture v = sum_s d+_s g_s and eps is the residual whose
transform coefficients are bounded by nu.
"""

import logging
from dataclasses import replace

import numpy as np

from modules.data.params_data import Dg3pdParams
from modules.data.result_data import SegmentationResult
from modules.data.state_data import Dg3pdState
from modules.operators.diffops import (
    dir_bwd_diff,
    dir_div,
    dir_div_fwd,
    dir_fwd_diff,
    dir_grad,
    dir_symbols,
)
from modules.operators.lattice import Image, as_image, dft_forward, dft_inverse
from modules.operators.proximal import NoiseBall, shrink
from modules.utils import SolverError

from .base import SegmentationModel

logger = logging.getLogger(__name__)


def _check_denominator(denominator: np.ndarray, floor: float, name: str) -> None:
    if not np.min(denominator) >= floor > 0:
        raise SolverError(f"Spectral denominator {name} vanishes")


def adaptive_shrink(t: np.ndarray, c_mu: float) -> np.ndarray:
    """Shrink with the threshold c_mu * max|t|."""
    return shrink(t, c_mu * float(np.max(np.abs(t))))


def texture_field_update(
    g: np.ndarray,
    w: np.ndarray,
    lambda2: np.ndarray,
    v: Image,
    lambda3: Image,
    beta2: float,
    beta3: float,
) -> np.ndarray:
    """One Gauss-Seidel sweep over the directions of the texture field.

    Direction a minimizes
    beta2/2 ||w_a - g_a + lambda2_a/beta2||^2
    + beta3/2 ||v - sum_s d+_s g_s + lambda3/beta3||^2
    with the other directions held at their newest values, solved exactly
    in the Fourier domain.

    Args:
        g (np.ndarray): (S, d1, d2) texture field of the previous iteration
        w (np.ndarray): (S, d1, d2) shrunk copy of the field
        lambda2 (np.ndarray): (S, d1, d2) multiplier of w = g
        v (Image): texture image of the previous iteration
        lambda3 (Image): multiplier of v = sum_s d+_s g_s
        beta2 (float): penalty of w = g
        beta3 (float): penalty of v = sum_s d+_s g_s

    Returns:
        np.ndarray: updated texture field
    """
    n_dirs = g.shape[0]
    symbols = dir_symbols(n_dirs, v.shape)
    g = g.copy()
    for a in range(n_dirs):
        denominator = beta2 + beta3 * np.abs(symbols[a]) ** 2
        _check_denominator(denominator, beta2, "A")
        others = dir_div_fwd(g, n_dirs) - dir_fwd_diff(g[a], a, n_dirs)
        target = v - others + lambda3 / beta3
        rhs = beta2 * (w[a] + lambda2[a] / beta2) - beta3 * dir_bwd_diff(target, a, n_dirs)
        g[a] = dft_inverse(dft_forward(rhs) / denominator)
    return g


def cartoon_update(
    data: Image,
    r: np.ndarray,
    lambda1: np.ndarray,
    beta1: float,
    beta4: float,
) -> Image:
    """Exact Fourier solve of the cartoon subproblem.

    Minimizes beta4/2 ||u - data||^2 + beta1/2 sum_l ||r_l - d+_l u + lambda1_l/beta1||^2,
    where data already carries the multiplier shift of the splitting
    constraint.

    Args:
        data (Image): f - v - eps + lambda4/beta4
        r (np.ndarray): (L, d1, d2) shrunk directional gradient
        lambda1 (np.ndarray): (L, d1, d2) multiplier of r = grad u
        beta1 (float): penalty of r = grad u
        beta4 (float): penalty of the splitting constraint

    Returns:
        Image: updated cartoon
    """
    n_dirs = r.shape[0]
    symbols = dir_symbols(n_dirs, data.shape)
    denominator = beta4 + beta1 * np.sum(np.abs(symbols) ** 2, axis=0)
    _check_denominator(denominator, beta4, "X")
    rhs = beta4 * data - beta1 * dir_div(r + lambda1 / beta1, n_dirs)
    return dft_inverse(dft_forward(rhs) / denominator)


def dg3pd_step(state: Dg3pdState, f: Image, params: Dg3pdParams) -> Dg3pdState:
    """One decomposition iteration followed by the relaxed multiplier updates.

    Args:
        state (Dg3pdState): previous iterate
        f (Image): input image
        params (Dg3pdParams): solver parameters

    Raises:
        SolverError: if the state does not match the image

    Returns:
        Dg3pdState: next iterate, sharing the convergence history
    """
    if state.u.shape != f.shape:
        raise SolverError(f"State of shape {state.u.shape} does not match image {f.shape}")
    n_l, n_s = params.n_dirs_l, params.n_dirs_s
    beta1, beta2, beta3, beta4 = params.beta1, params.beta2, params.beta3, params.beta4
    gamma = params.gamma

    r = shrink(dir_grad(state.u, n_l) - state.lambda1 / beta1, 1.0 / beta1)
    if params.texture:
        t_w = state.g - state.lambda2 / beta2
        w = np.stack([adaptive_shrink(t_a, params.c_mu1) for t_a in t_w])
        g = texture_field_update(state.g, w, state.lambda2, state.v, state.lambda3, beta2, beta3)
        t_v = beta3 / (beta3 + beta4) * (dir_div_fwd(g, n_s) - state.lambda3 / beta3) + beta4 / (
            beta3 + beta4
        ) * (f - state.u - state.eps + state.lambda4 / beta4)
        v = adaptive_shrink(t_v, params.c_mu2)
    else:
        w, g, v = state.w, state.g, np.zeros_like(f)
    u = cartoon_update(f - v - state.eps + state.lambda4 / beta4, r, state.lambda1, beta1, beta4)
    ball = NoiseBall.for_shape(params.nu, f.shape, params.wavelet)
    eps = ball.project(f - u - v + state.lambda4 / beta4)

    new_state = replace(
        state,
        u=u,
        v=v,
        eps=eps,
        r=r,
        w=w,
        g=g,
        lambda1=state.lambda1 + gamma * beta1 * (r - dir_grad(u, n_l)),
        lambda2=state.lambda2 + gamma * beta2 * (w - g),
        lambda3=state.lambda3 + gamma * beta3 * (v - dir_div_fwd(g, n_s)),
        lambda4=state.lambda4 + gamma * beta4 * (f - u - v - eps),
    )
    new_state.history.record(state.u, u, f, new_state.constraint(f))
    return new_state


def dg3pd_decompose(
    f: Image, params: Dg3pdParams
) -> tuple[Image, Image, Image, Dg3pdState]:
    """Run the decomposition from u = f with every other field at zero.

    Stops after params.iters steps, or earlier once the log relative change
    of u drops below params.tol.

    Args:
        f (Image): input image
        params (Dg3pdParams): solver parameters

    Returns:
        tuple[Image, Image, Image, Dg3pdState]: u, v, eps and the final state
    """
    state = Dg3pdState.initial(f, params.n_dirs_l, params.n_dirs_s)
    for _ in range(params.iters):
        state = dg3pd_step(state, f, params)
        if state.history.converged(params.tol):
            break
    logger.info(
        "Decomposition finished after %d iterations, residual %.3g",
        len(state.history),
        state.history.residual[-1],
    )
    return state.u, state.v, state.eps, state


class Dg3pdModel(SegmentationModel):
    """Decomposition only, without segmentation."""

    params_type = Dg3pdParams

    def __init__(self, params: Dg3pdParams) -> None:
        self.params = params

    def run(self, f: Image) -> SegmentationResult:
        """Decompose an image given on the [0, 1] scale.

        Args:
            f (Image): input image

        Returns:
            SegmentationResult: decomposition with no phases
        """
        f = as_image(f)
        scale = self.params.intensity_scale
        _, _, _, state = dg3pd_decompose(f * scale, self.params)
        return SegmentationResult.from_decomposition(f, state, scale)
