import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from typing_extensions import Self

from modules.operators.dualsolvers import DualState
from modules.operators.lattice import Image
from modules.utils import log_relative_change, relative_norm

logger = logging.getLogger(__name__)


@dataclass
class ConvergenceHistory:
    """Per-iteration convergence diagnostics of a solver run."""

    err_u: list[float] = field(default_factory=list)
    residual: list[float] = field(default_factory=list)

    def record(self, u_prev: Image, u: Image, f: Image, constraint: Image) -> None:
        """Append the log relative change of u and the constraint residual.

        Args:
            u_prev (Image): previous iterate
            u (Image): current iterate
            f (Image): input image
            constraint (Image): residual of the splitting constraint
        """
        self.err_u.append(log_relative_change(u_prev, u))
        self.residual.append(relative_norm(constraint, f))
        logger.debug(
            "iter=%d err_u=%.6g residual=%.6g", len(self.err_u), self.err_u[-1], self.residual[-1]
        )

    def converged(self, tol: float) -> bool:
        """Whether the latest relative change dropped below a log-scale floor."""
        return len(self.err_u) > 1 and self.err_u[-1] < tol

    def __len__(self) -> int:
        return len(self.err_u)

    def to_frame(self) -> pd.DataFrame:
        """Convert the history to a table with one row per iteration.

        Returns:
            pd.DataFrame: columns "iteration", "err_u" and "residual"
        """
        return pd.DataFrame(
            {
                "iteration": np.arange(1, len(self.err_u) + 1),
                "err_u": self.err_u,
                "residual": self.residual,
            }
        )


@dataclass
class TwoPhaseState:
    """Iterate of the two-phase piecewise constant and texture model."""

    p: Image
    c1: float
    c2: float
    v: Image
    eps: Image
    g: np.ndarray
    r: np.ndarray
    w: np.ndarray
    lambda1: np.ndarray
    lambda2: np.ndarray
    lambda3: Image
    lambda4: Image
    history: ConvergenceHistory = field(default_factory=ConvergenceHistory)

    @classmethod
    def initial(cls, f: Image, n_dirs_l: int, n_dirs_s: int) -> Self:
        """Start from the min-max normalized image as the indicator.

        A constant image starts from p = 1/2 everywhere.

        Args:
            f (Image): input image
            n_dirs_l (int): directions of the indicator's total variation
            n_dirs_s (int): directions of the texture field

        Returns:
            Self: initial state with means taken from the indicator
        """
        spread = float(f.max() - f.min())
        p = (f - f.min()) / spread if spread > 0 else np.full_like(f, 0.5)
        zeros = np.zeros_like(f)
        return cls(
            p=p,
            c1=float(np.sum(f * p) / max(np.sum(p), 1e-300)),
            c2=float(np.sum(f * (1 - p)) / max(np.sum(1 - p), 1e-300)),
            v=zeros.copy(),
            eps=zeros.copy(),
            g=np.zeros((n_dirs_s, *f.shape)),
            r=np.zeros((n_dirs_l, *f.shape)),
            w=np.zeros((n_dirs_s, *f.shape)),
            lambda1=np.zeros((n_dirs_l, *f.shape)),
            lambda2=np.zeros((n_dirs_s, *f.shape)),
            lambda3=zeros.copy(),
            lambda4=zeros.copy(),
        )

    @property
    def cartoon(self) -> Image:
        """Piecewise constant part c1 p + c2 (1 - p)."""
        return self.c1 * self.p + self.c2 * (1.0 - self.p)


@dataclass
class Dg3pdState:
    """Iterate of the three-part decomposition f = u + v + eps."""

    u: Image
    v: Image
    eps: Image
    r: np.ndarray
    w: np.ndarray
    g: np.ndarray
    lambda1: np.ndarray
    lambda2: np.ndarray
    lambda3: Image
    lambda4: Image
    history: ConvergenceHistory = field(default_factory=ConvergenceHistory)

    @classmethod
    def zeros(cls, shape: tuple[int, int], n_dirs_l: int, n_dirs_s: int) -> Self:
        """All-zero state.

        Args:
            shape (tuple[int, int]): lattice dims
            n_dirs_l (int): directions of the cartoon's total variation
            n_dirs_s (int): directions of the texture field

        Returns:
            Self: zero state
        """
        return cls(
            u=np.zeros(shape),
            v=np.zeros(shape),
            eps=np.zeros(shape),
            r=np.zeros((n_dirs_l, *shape)),
            w=np.zeros((n_dirs_s, *shape)),
            g=np.zeros((n_dirs_s, *shape)),
            lambda1=np.zeros((n_dirs_l, *shape)),
            lambda2=np.zeros((n_dirs_s, *shape)),
            lambda3=np.zeros(shape),
            lambda4=np.zeros(shape),
        )

    @classmethod
    def initial(cls, f: Image, n_dirs_l: int, n_dirs_s: int) -> Self:
        """Zero state except u = f."""
        state = cls.zeros(f.shape, n_dirs_l, n_dirs_s)
        state.u = f.copy()
        return state

    def constraint(self, f: Image) -> Image:
        """Residual f - u - v - eps."""
        return f - self.u - self.v - self.eps


@dataclass
class ShtState:
    """Iterate of the single-level multiphase model.

    The bias b = u - sum_n c_n p_n is derived, never stored.
    """

    u: Image
    v: Image
    eps: Image
    phases: np.ndarray
    means: np.ndarray
    r: DualState
    g: DualState
    q: list[DualState]
    lam: Image
    mu2: float
    history: ConvergenceHistory = field(default_factory=ConvergenceHistory)

    @property
    def piecewise_constant(self) -> Image:
        """Segmented image sum_n c_n p_n."""
        return np.tensordot(self.means, self.phases, axes=1)

    @property
    def b(self) -> Image:
        return self.u - self.piecewise_constant

    def constraint(self, f: Image) -> Image:
        """Residual f - u - v - eps."""
        return f - self.u - self.v - self.eps


@dataclass
class BilevelState:
    """Iterate of the bilevel model: a decomposition plus its segmentation."""

    dg3pd: Dg3pdState
    phases: np.ndarray
    means: np.ndarray
    q: list[DualState]

    @property
    def u(self) -> Image:
        return self.dg3pd.u

    @property
    def piecewise_constant(self) -> Image:
        return np.tensordot(self.means, self.phases, axes=1)

    @property
    def b(self) -> Image:
        return self.dg3pd.u - self.piecewise_constant

    @property
    def history(self) -> ConvergenceHistory:
        return self.dg3pd.history
