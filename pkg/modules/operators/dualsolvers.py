"""
Dual and primal-dual kernels: the directional TV-l2 solver, the
directional G-norm/l1 solver and the smoothed primal-dual phase solver.

All dual fields start at zero and are kept inside the per-pixel unit ball.
"""

import logging
import math
from dataclasses import dataclass, replace

import numpy as np
from typing_extensions import Self

from modules.utils import SolverError, relative_norm, require_positive

from .diffops import DirField, dir_div, dir_grad, dtv_norm, magnitude
from .lattice import Image
from .proximal import shrink, softmax_phases

logger = logging.getLogger(__name__)

DEFAULT_STEP = 0.1


def chambolle_step(p: DirField, direction: DirField, tau: float) -> DirField:
    """Semi-implicit dual step (p + tau*G) / (1 + tau*|G|).

    The result is renormalized so every per-pixel vector has magnitude <= 1.

    Args:
        p (DirField): current dual field
        direction (DirField): ascent direction G
        tau (float): step size

    Returns:
        DirField: updated dual field
    """
    updated = (p + tau * direction) / (1.0 + tau * magnitude(direction))
    return updated / np.maximum(magnitude(updated), 1.0)


@dataclass
class DualState:
    """Dual variable of a Chambolle-type solver."""

    field: DirField
    step: float = DEFAULT_STEP
    iteration: int = 0

    @classmethod
    def zeros(cls, n_dirs: int, shape: tuple[int, int], step: float = DEFAULT_STEP) -> Self:
        """Zero-initialized dual field.

        Args:
            n_dirs (int): number of directions
            shape (tuple[int, int]): lattice dims
            step (float, optional): Chambolle step. Defaults to 0.1.

        Returns:
            Self: the dual state
        """
        require_positive(step=step)
        return cls(field=np.zeros((n_dirs, *shape)), step=step)

    @property
    def n_dirs(self) -> int:
        return self.field.shape[0]

    def copy(self) -> Self:
        return replace(self, field=self.field.copy())

    def advance(self, direction: DirField) -> None:
        """Take one Chambolle step along a direction field."""
        self.field = chambolle_step(self.field, direction, self.step)
        self.iteration += 1

    def is_feasible(self, tol: float = 1e-12) -> bool:
        """Whether every per-pixel vector lies in the unit ball."""
        return bool(np.all(magnitude(self.field) <= 1.0 + tol))


@dataclass(frozen=True)
class GsBall:
    """Ball of radius mu1 in the directional G-norm, v = mu1 * div g, |g| <= 1."""

    mu1: float

    def witness_residual(self, v: Image, g: DualState) -> float:
        """Distance ||v - mu1 div g|| between v and its witness field."""
        return float(np.linalg.norm(v - self.mu1 * dir_div(g.field, g.n_dirs)))


def dtv_l2_energy(u: Image, h: Image, weight: float, n_dirs: int) -> float:
    """Energy ||grad_K u||_1 + weight/2 ||u - h||^2."""
    return dtv_norm(u, n_dirs) + 0.5 * weight * float(np.sum((u - h) ** 2))


def dtv_l2_solve(
    h: Image,
    weight: float,
    n_dirs: int,
    tau: float = DEFAULT_STEP,
    iters: int = 100,
    tol: float | None = None,
) -> tuple[Image, DualState]:
    """Minimize ||grad_K u||_1 + weight/2 ||u - h||^2 through its dual.

    Args:
        h (Image): data image
        weight (float): fidelity weight mu
        n_dirs (int): number of directions K
        tau (float, optional): Chambolle step. Defaults to 0.1.
        iters (int, optional): iteration budget. Defaults to 100.
        tol (float | None, optional): stop once the log relative change of u
            drops below this value. Defaults to None (run the full budget).

    Raises:
        SolverError: if weight or tau is not positive

    Returns:
        tuple[Image, DualState]: minimizer u and the dual field r
    """
    require_positive(weight=weight, tau=tau)
    r = DualState.zeros(n_dirs, h.shape, step=tau)
    target = weight * h
    u = h.copy()
    for _ in range(iters):
        r.advance(dir_grad(dir_div(r.field, n_dirs) - target, n_dirs))
        if tol is None:
            continue
        u_next = h - dir_div(r.field, n_dirs) / weight
        change = relative_norm(u_next - u, u)
        u = u_next
        if change == 0.0 or math.log(change) < tol:
            break
    u = h - dir_div(r.field, n_dirs) / weight
    return u, r


def gs_l1_solve(
    f: Image,
    mu: float,
    beta: float,
    alpha: float,
    n_dirs: int,
    tau: float = DEFAULT_STEP,
    iters: int = 100,
) -> tuple[Image, DualState, Image]:
    """Sparse texture inside a directional G-norm ball, by augmented Lagrangian.

    Each iteration takes a Chambolle step on g, soft-thresholds v and
    updates the multiplier of the constraint v = mu * div g.

    Args:
        f (Image): data image
        mu (float): G-ball radius
        beta (float): fidelity weight
        alpha (float): augmented Lagrangian weight
        n_dirs (int): number of directions S
        tau (float, optional): Chambolle step. Defaults to 0.1.
        iters (int, optional): iteration budget. Defaults to 100.

    Raises:
        SolverError: if a weight is not positive or mu is negative

    Returns:
        tuple[Image, DualState, Image]: texture v, witness field g and
            multiplier lambda1
    """
    require_positive(alpha=alpha, beta=beta, tau=tau)
    if mu < 0:
        raise SolverError(f"G-ball radius must be non-negative, got {mu}")
    g = DualState.zeros(n_dirs, f.shape, step=tau)
    v = np.zeros_like(f)
    lambda1 = np.zeros_like(f)
    total = alpha + beta
    for _ in range(iters):
        div_g = dir_div(g.field, n_dirs)
        g.advance(dir_grad(alpha * mu * div_g - lambda1 - alpha * v, n_dirs))
        div_g = dir_div(g.field, n_dirs)
        v = shrink(beta / total * f + alpha * mu / total * div_g - lambda1 / total, 1.0 / total)
        lambda1 = lambda1 + alpha * (v - mu * div_g)
    return v, g, lambda1


EMPTY_PHASE_MASS = 1e-8


def update_phase_means(values: Image, weights: np.ndarray, previous: np.ndarray) -> np.ndarray:
    """Weighted means sum(values * p_n) / sum(p_n) of every phase.

    A phase whose total mass is below 1e-8 of the pixel count keeps its
    previous mean.

    Args:
        values (Image): image being averaged
        weights (np.ndarray): (N, d1, d2) phase weights
        previous (np.ndarray): means of the previous iteration

    Returns:
        np.ndarray: updated means
    """
    mass = weights.sum(axis=(1, 2))
    totals = np.tensordot(weights, values, axes=([1, 2], [0, 1]))
    empty = mass < EMPTY_PHASE_MASS * values.size
    if np.any(empty):
        logger.debug("Freezing the mean of empty phases %s", np.flatnonzero(empty).tolist())
    return np.where(empty, previous, totals / np.where(empty, 1.0, mass))


def phase_scores(
    u: Image, means: np.ndarray, weight: float, q: list[DualState]
) -> np.ndarray:
    """Phase scores weight * (u - c_n)^2 + div q_n.

    Args:
        u (Image): image being segmented
        means (np.ndarray): phase means c_n
        weight (float): data weight
        q (list[DualState]): one dual field per phase

    Returns:
        np.ndarray: (N, d1, d2) scores
    """
    data = weight * (u[None, :, :] - np.asarray(means)[:, None, None]) ** 2
    divs = np.stack([dir_div(q_n.field, q_n.n_dirs) for q_n in q])
    return data + divs


def phase_dual_step(q: list[DualState], phases: np.ndarray) -> None:
    """Ascent step of every phase dual field on the smoothed dual energy.

    The gradient of the smoothed dual with respect to q_n is -grad p_n.
    """
    for q_n, p_n in zip(q, phases):
        q_n.advance(-dir_grad(p_n, q_n.n_dirs))


def smoothed_pd_phases(
    u: Image,
    means: np.ndarray,
    weight: float,
    n_dirs: int,
    xi: float,
    tau: float = DEFAULT_STEP,
    iters: int = 1,
    q0: list[DualState] | None = None,
) -> tuple[np.ndarray, list[DualState]]:
    """Smoothed primal-dual solver of the relaxed multiphase problem.

    Alternates the closed-form softmax for the phases with a Chambolle
    step for each phase's dual field.

    Args:
        u (Image): image being segmented
        means (np.ndarray): phase means c_n, N >= 2
        weight (float): data weight
        n_dirs (int): number of directions M
        xi (float): smoothing parameter
        tau (float, optional): Chambolle step. Defaults to 0.1.
        iters (int, optional): iteration budget. Defaults to 1.
        q0 (list[DualState] | None, optional): initial dual fields, updated
            in place. Defaults to zero fields.

    Raises:
        SolverError: if fewer than 2 phases are requested

    Returns:
        tuple[np.ndarray, list[DualState]]: (N, d1, d2) phases and dual fields
    """
    n_phases = len(means)
    if n_phases < 2:
        raise SolverError(f"Need at least 2 phases, got {n_phases}")
    q = q0 if q0 is not None else [DualState.zeros(n_dirs, u.shape, tau) for _ in range(n_phases)]
    if len(q) != n_phases:
        raise SolverError(f"Got {len(q)} dual fields for {n_phases} phases")
    phases = np.full((n_phases, *u.shape), 1.0 / n_phases)
    for _ in range(iters):
        phases = softmax_phases(phase_scores(u, means, weight, q), xi)
        phase_dual_step(q, phases)
    return phases, q
