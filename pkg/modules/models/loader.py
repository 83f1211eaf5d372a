from collections.abc import Mapping
from enum import Enum
from typing import Type

from modules.utils import SettingsError

from .base import SegmentationModel
from .bilevel import BilevelModel
from .dg3pd import Dg3pdModel
from .sht import ShtModel
from .twophase import TwoPhaseModel


class PipelineNames(Enum):
    """Available pipeline names."""

    TWOPHASE = "twophase"
    SHT = "sht"
    BILEVEL = "bilevel"
    DG3PD_ONLY = "dg3pd-only"


PIPELINES_LOADER: dict[PipelineNames, Type[SegmentationModel]] = {
    PipelineNames.TWOPHASE: TwoPhaseModel,
    PipelineNames.SHT: ShtModel,
    PipelineNames.BILEVEL: BilevelModel,
    PipelineNames.DG3PD_ONLY: Dg3pdModel,
}


def get_pipeline_class(name: str | PipelineNames) -> Type[SegmentationModel]:
    """Look up a pipeline class by name.

    Args:
        name (str | PipelineNames): pipeline name

    Raises:
        SettingsError: if the name is not recognized

    Returns:
        Type[SegmentationModel]: the pipeline class
    """
    try:
        if isinstance(name, str):
            name = PipelineNames(name)
    except ValueError:
        pass

    if name not in PIPELINES_LOADER:
        valid = ", ".join(p.value for p in PipelineNames)
        raise SettingsError(f"Pipeline name is not recognized {name}, expected one of {valid}")
    return PIPELINES_LOADER[name]


def load_pipeline(name: str | PipelineNames, store: Mapping[str, str]) -> SegmentationModel:
    """Build a pipeline with parameters read from flat settings.

    Args:
        name (str | PipelineNames): pipeline name
        store (Mapping[str, str]): settings holding the solver parameters

    Returns:
        SegmentationModel: the configured pipeline
    """
    pipeline_class = get_pipeline_class(name)
    return pipeline_class(pipeline_class.params_type.from_settings(store))
