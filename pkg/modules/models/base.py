from abc import ABC, abstractmethod
from typing import ClassVar

from modules.data.base import ParamsBase
from modules.data.result_data import SegmentationResult
from modules.operators.lattice import Image


class SegmentationModel(ABC):
    "Base class of decomposition and segmentation pipelines"

    params_type: ClassVar[type[ParamsBase]]

    @abstractmethod
    def run(self, f: Image) -> SegmentationResult:
        """Decompose and segment an image.

        Args:
            f (Image): grayscale image on the [0, 1] scale

        Returns:
            SegmentationResult: components, phases and convergence history
        """
        pass
