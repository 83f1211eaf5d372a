"""
Bilevel model: the three-part decomposition runs at the first level and a
smoothed primal-dual multiphase segmentation of its cartoon at the second.
"""

import logging

import numpy as np

from modules.data.params_data import BilevelParams, ShtmsParams
from modules.data.result_data import SegmentationResult
from modules.data.state_data import BilevelState, Dg3pdState
from modules.operators.dualsolvers import (
    DualState,
    phase_dual_step,
    phase_scores,
    update_phase_means,
)
from modules.operators.lattice import Image, as_image
from modules.operators.proximal import softmax_phases
from modules.utils import SolverError

from .base import SegmentationModel
from .dg3pd import dg3pd_step
from .sht import initial_means

logger = logging.getLogger(__name__)


def shtms_step(
    phases: np.ndarray,
    q: list[DualState],
    means: np.ndarray,
    u: Image,
    params: ShtmsParams,
) -> tuple[np.ndarray, list[DualState], np.ndarray]:
    """One segmentation step on the cartoon: means, then phases, then duals.

    Args:
        phases (np.ndarray): (N, d1, d2) phases of the previous step
        q (list[DualState]): dual field of every phase, not modified
        means (np.ndarray): phase means of the previous step
        u (Image): cartoon from the decomposition level
        params (ShtmsParams): segmentation parameters

    Raises:
        SolverError: if fewer than 2 phases are given

    Returns:
        tuple[np.ndarray, list[DualState], np.ndarray]: phases, dual fields and means
    """
    if len(means) < 2:
        raise SolverError(f"Need at least 2 phases, got {len(means)}")
    means = update_phase_means(u, phases, means)
    q = [q_n.copy() for q_n in q]
    phases = softmax_phases(phase_scores(u, means, params.mu3 / 2.0, q), params.xi)
    phase_dual_step(q, phases)
    return phases, q, means


def bilevel_initial_state(f: Image, params: BilevelParams) -> BilevelState:
    """u = f, everything else zero, means on an even grid."""
    decomposition, segmentation = params.decomposition, params.segmentation
    n_phases = segmentation.n_phases
    return BilevelState(
        dg3pd=Dg3pdState.initial(f, decomposition.n_dirs_l, decomposition.n_dirs_s),
        phases=np.zeros((n_phases, *f.shape)),
        means=initial_means(n_phases, decomposition.intensity_scale),
        q=[
            DualState.zeros(segmentation.n_dirs_m, f.shape, segmentation.tau)
            for _ in range(n_phases)
        ],
    )


def bilevel_segment(f: Image, params: BilevelParams) -> BilevelState:
    """Alternate inner_iters decomposition steps with one segmentation step.

    Args:
        f (Image): input image on the intensity_scale scale
        params (BilevelParams): parameters of both levels

    Returns:
        BilevelState: final decomposition and segmentation
    """
    state = bilevel_initial_state(f, params)
    dg3pd = state.dg3pd
    phases, q, means = state.phases, state.q, state.means
    converged = False
    for outer in range(params.iters):
        for _ in range(params.inner_iters):
            dg3pd = dg3pd_step(dg3pd, f, params.decomposition)
            if dg3pd.history.converged(params.tol):
                converged = True
                break
        if params.segment:
            phases, q, means = shtms_step(phases, q, means, dg3pd.u, params.segmentation)
        logger.debug("outer=%d residual=%.6g", outer + 1, dg3pd.history.residual[-1])
        if converged:
            break
    logger.info(
        "Bilevel model finished after %d decomposition steps, residual %.3g",
        len(dg3pd.history),
        dg3pd.history.residual[-1],
    )
    return BilevelState(dg3pd=dg3pd, phases=phases, means=means, q=q)


def bilevel_binarize(
    u: Image, means: np.ndarray, q: list[DualState], beta5: float
) -> np.ndarray:
    """Hard partition at the per-pixel argmin of div q_n + beta5/2 (u - c_n)^2.

    Ties go to the lowest phase index.

    Args:
        u (Image): final cartoon
        means (np.ndarray): final phase means
        q (list[DualState]): final dual fields
        beta5 (float): data weight of the final assignment

    Returns:
        np.ndarray: (N, d1, d2) one-hot phases
    """
    scores = phase_scores(u, means, beta5 / 2.0, q)
    labels = np.argmin(scores, axis=0)
    return (labels[None, :, :] == np.arange(len(means))[:, None, None]).astype(np.float64)


class BilevelModel(SegmentationModel):
    """Decomposition and multiphase segmentation of the cartoon."""

    params_type = BilevelParams

    def __init__(self, params: BilevelParams) -> None:
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
        state = bilevel_segment(f * scale, self.params)
        if not self.params.segment:
            return SegmentationResult.from_decomposition(f, state.dg3pd, scale)
        labels = bilevel_binarize(state.u, state.means, state.q, self.params.beta5)
        return SegmentationResult.from_bilevel(f, state, labels, scale)
