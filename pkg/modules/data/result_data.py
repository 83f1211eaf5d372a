from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from typing_extensions import Self

from modules import metrics
from modules.operators.lattice import Image

from .state_data import BilevelState, ConvergenceHistory, Dg3pdState, ShtState, TwoPhaseState


def _one_hot(phases: np.ndarray) -> np.ndarray:
    labels = metrics.label_map(phases)
    return (labels[None, :, :] == np.arange(phases.shape[0])[:, None, None]).astype(np.float64)


def _format_values(values: np.ndarray | list[float]) -> str:
    return ",".join(f"{value:.6g}" for value in values)


@dataclass
class SegmentationResult:
    """Uniform record of a finished run, intensities on the [0, 1] scale.

    Phases, means and labels are None for a decomposition-only run.
    """

    pipeline: str
    f: Image
    u: Image
    v: Image
    eps: Image
    history: ConvergenceHistory
    phases: np.ndarray | None = None
    means: np.ndarray | None = None
    labels: np.ndarray | None = None
    segmented: Image | None = field(default=None, repr=False)
    intensity_scale: float = 255.0

    @classmethod
    def from_twophase(
        cls, f: Image, state: TwoPhaseState, labels: np.ndarray, segmented: Image, scale: float
    ) -> Self:
        """Build the result of a two-phase run.

        Args:
            f (Image): input image on the [0, 1] scale
            state (TwoPhaseState): final state on the internal scale
            labels (np.ndarray): (2, d1, d2) binarized indicator and complement
            segmented (Image): texture-marked display on the internal scale
            scale (float): internal intensity scale

        Returns:
            Self: the result
        """
        return cls(
            pipeline="twophase",
            f=f,
            u=state.cartoon / scale,
            v=state.v / scale,
            eps=state.eps / scale,
            history=state.history,
            phases=np.stack([state.p, 1.0 - state.p]),
            means=np.array([state.c1, state.c2]) / scale,
            labels=labels,
            segmented=segmented / scale,
            intensity_scale=scale,
        )

    @classmethod
    def from_sht(cls, f: Image, state: ShtState, scale: float) -> Self:
        """Build the result of a multiphase run; labels are the phase argmax."""
        return cls(
            pipeline="sht",
            f=f,
            u=state.u / scale,
            v=state.v / scale,
            eps=state.eps / scale,
            history=state.history,
            phases=state.phases,
            means=state.means / scale,
            labels=_one_hot(state.phases),
            intensity_scale=scale,
        )

    @classmethod
    def from_bilevel(cls, f: Image, state: BilevelState, labels: np.ndarray, scale: float) -> Self:
        """Build the result of a bilevel run with its final hard partition."""
        return cls(
            pipeline="bilevel",
            f=f,
            u=state.dg3pd.u / scale,
            v=state.dg3pd.v / scale,
            eps=state.dg3pd.eps / scale,
            history=state.history,
            phases=state.phases,
            means=state.means / scale,
            labels=labels,
            intensity_scale=scale,
        )

    @classmethod
    def from_decomposition(cls, f: Image, state: Dg3pdState, scale: float) -> Self:
        """Build the result of a decomposition without segmentation."""
        return cls(
            pipeline="dg3pd-only",
            f=f,
            u=state.u / scale,
            v=state.v / scale,
            eps=state.eps / scale,
            history=state.history,
            intensity_scale=scale,
        )

    @property
    def f_seg(self) -> Image | None:
        """Segmented image, sum_n c_n p_n unless a display was supplied."""
        if self.segmented is not None:
            return self.segmented
        if self.phases is None:
            return None
        return np.tensordot(self.means, self.phases, axes=1)

    @property
    def b(self) -> Image | None:
        """Bias field u - sum_n c_n p_n."""
        if self.phases is None:
            return None
        return self.u - np.tensordot(self.means, self.phases, axes=1)

    @property
    def reconstruction(self) -> Image:
        """b + sum_n c_n p_n + v + eps, which equals u + v + eps."""
        return self.u + self.v + self.eps

    @property
    def v_bin(self) -> Image:
        return (self.v != 0).astype(np.float64)

    @property
    def label_map(self) -> np.ndarray | None:
        if self.labels is None:
            return None
        return metrics.label_map(self.labels)

    def to_metrics_df(self) -> pd.DataFrame:
        """Convert the scalar metrics to a pandas DataFrame.

        Returns:
            pd.DataFrame: one-row metrics table
        """
        return metrics.summary_frame(self)

    def manifest(self) -> dict[str, str]:
        """Metrics as ordered key: value text fields.

        Keys: pipeline, shape, iterations, mse, mse_8bit, sparsity_pct,
        residual, err_u_final, then means and means_8bit when phases exist,
        and err_u_trace last.

        Returns:
            dict[str, str]: manifest fields in a stable order
        """
        row = self.to_metrics_df().iloc[0]
        fields = {
            "pipeline": self.pipeline,
            "shape": f"{self.f.shape[0]}x{self.f.shape[1]}",
            "iterations": str(int(row["iterations"])),
            "mse": f"{row['mse']:.6g}",
            "mse_8bit": f"{row['mse_8bit']:.6g}",
            "sparsity_pct": f"{row['sparsity_pct']:.6g}",
            "residual": f"{row['residual']:.6g}",
            "err_u_final": f"{row['err_u']:.6g}",
        }
        if self.means is not None:
            fields["means"] = _format_values(self.means)
            fields["means_8bit"] = _format_values(self.means * self.intensity_scale)
        fields["err_u_trace"] = _format_values(self.history.err_u)
        return fields
