"""
Single-level multiphase model: piecewise smooth cartoon u = b + sum_n c_n p_n,
sparse texture v in a directional G-norm ball and a bounded residual eps,
all driven by one multiplier of the constraint f = u + v + eps.
"""

import logging
from collections.abc import Iterator, Sequence

import numpy as np
import pandas as pd

from modules.data.params_data import ShtParams
from modules.data.result_data import SegmentationResult
from modules.data.state_data import ShtState
from modules.metrics import relative_error_trace
from modules.operators.diffops import dir_div, dir_grad
from modules.operators.dualsolvers import DualState, smoothed_pd_phases, update_phase_means
from modules.operators.lattice import Image, as_image
from modules.operators.proximal import NoiseBall, shrink

from .base import SegmentationModel

logger = logging.getLogger(__name__)

MU2_CLAMP = 0.99
MU2_DAMPING = 0.5


def initial_means(n_phases: int, top: float) -> np.ndarray:
    """Evenly spaced starting means (n - 1) * floor(top / N)."""
    return np.arange(n_phases) * np.floor(top / n_phases)


def sht_initial_state(f: Image, params: ShtParams) -> ShtState:
    """u = f, phases and every dual field at zero, means on an even grid."""
    zeros = np.zeros_like(f)
    return ShtState(
        u=f.copy(),
        v=zeros.copy(),
        eps=zeros.copy(),
        phases=np.zeros((params.n_phases, *f.shape)),
        means=initial_means(params.n_phases, params.intensity_scale),
        r=DualState.zeros(params.n_dirs_l, f.shape, params.tau),
        g=DualState.zeros(params.n_dirs_s, f.shape, params.tau),
        q=[DualState.zeros(params.n_dirs_m, f.shape, params.tau) for _ in range(params.n_phases)],
        lam=zeros.copy(),
        mu2=params.mu2,
    )


def _texture_threshold(params: ShtParams, mu2: float, data: Image, div_g: Image) -> float:
    """Threshold x = 1 / (alpha + beta/mu2) re-derived from c_mu2.

    The texture argument is evaluated with the previous mu2, then x is set
    to c_mu2 * max of its magnitude and kept below 1/alpha.
    """
    alpha = params.alpha
    x_prev = mu2 / (alpha * mu2 + params.beta)
    t_prev = (1.0 - alpha * x_prev) * data + alpha * params.mu1 * x_prev * div_g
    x = params.c_mu2 * float(np.max(np.abs(t_prev)))
    if alpha * x >= 1.0:
        logger.warning("Texture weight denominator is not positive, clamping its threshold")
        x = MU2_CLAMP / alpha
    return x


def sht_step(state: ShtState, f: Image, params: ShtParams) -> ShtState:
    """One iteration of the multiphase model.

    Args:
        state (ShtState): previous iterate
        f (Image): input image
        params (ShtParams): solver parameters

    Returns:
        ShtState: next iterate, sharing the convergence history
    """
    alpha, beta, mu4 = params.alpha, params.beta, params.mu4
    n_l, n_s = params.n_dirs_l, params.n_dirs_s
    weight = mu4 + beta

    h = mu4 / weight * state.piecewise_constant + beta / weight * (
        f - state.v - state.eps + state.lam / beta
    )
    r = state.r.copy()
    r.advance(dir_grad(dir_div(r.field, n_l) - weight * h, n_l))
    u = h - dir_div(r.field, n_l) / weight

    g = state.g.copy()
    g.advance(dir_grad(alpha * params.mu1 * dir_div(g.field, n_s) - state.lam - alpha * state.v, n_s))
    div_g = dir_div(g.field, n_s)

    data = f - u - state.eps + state.lam / beta
    mu2 = state.mu2
    if len(state.history) < params.mu2_iters:
        x = _texture_threshold(params, mu2, data, div_g)
        mu2 = MU2_DAMPING * mu2 + (1.0 - MU2_DAMPING) * beta * x / (1.0 - alpha * x)
    x = mu2 / (alpha * mu2 + beta)
    v = shrink((1.0 - alpha * x) * data + alpha * params.mu1 * x * div_g, x)

    ball = NoiseBall.for_shape(params.nu, f.shape, params.wavelet)
    eps = ball.project(f - u - v + state.lam / beta)

    q = [q_n.copy() for q_n in state.q]
    phases, q = smoothed_pd_phases(
        u, state.means, mu4 / (2.0 * params.mu3), params.n_dirs_m, params.xi, params.tau, 1, q
    )
    means = update_phase_means(u, phases, state.means)

    new_state = ShtState(
        u=u,
        v=v,
        eps=eps,
        phases=phases,
        means=means,
        r=r,
        g=g,
        q=q,
        lam=state.lam + beta * (f - u - v - eps),
        mu2=mu2,
        history=state.history,
    )
    new_state.history.record(state.u, u, f, new_state.constraint(f))
    return new_state


def sht_iterates(f: Image, params: ShtParams) -> Iterator[ShtState]:
    """Yield every iterate of the multiphase model.

    Stops after params.iters iterations or once the log relative change of
    u drops below params.tol.

    Args:
        f (Image): input image on the intensity_scale scale
        params (ShtParams): solver parameters

    Yields:
        ShtState: successive iterates, the initial state excluded
    """
    state = sht_initial_state(f, params)
    for _ in range(params.iters):
        state = sht_step(state, f, params)
        yield state
        if state.history.converged(params.tol):
            break


def sht_segment(f: Image, params: ShtParams) -> ShtState:
    """Run the multiphase model and return its final iterate."""
    state = None
    for state in sht_iterates(f, params):
        pass
    logger.info(
        "Multiphase model finished after %d iterations, residual %.3g",
        len(state.history),
        state.history.residual[-1],
    )
    return state


def sht_relative_error_trace(history: Sequence[ShtState]) -> pd.Series:
    """Log relative change of u between consecutive recorded iterates.

    Args:
        history (Sequence[ShtState]): at least two iterates

    Returns:
        pd.Series: one value per consecutive pair, -inf where u did not move
    """
    return relative_error_trace([state.u for state in history])


class ShtModel(SegmentationModel):
    """Multiphase piecewise smooth, texture and residual model."""

    params_type = ShtParams

    def __init__(self, params: ShtParams) -> None:
        self.params = params

    def run(self, f: Image) -> SegmentationResult:
        """Segment an image given on the [0, 1] scale.

        Args:
            f (Image): input image

        Returns:
            SegmentationResult: components, phases and hard labels
        """
        f = as_image(f)
        scale = self.params.intensity_scale
        state = sht_segment(f * scale, self.params)
        return SegmentationResult.from_sht(f, state, scale)
