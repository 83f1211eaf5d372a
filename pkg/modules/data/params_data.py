from collections.abc import Mapping
from dataclasses import dataclass, field, fields, replace

from typing_extensions import Self

from modules.utils import SolverError

from .base import ParamsBase

NO_TOLERANCE = float("-inf")


def _check_fraction(name: str, value: float, low: float = 0.0, high: float = 1.0) -> None:
    if not low <= value <= high:
        raise SolverError(f"Parameter {name} must lie in [{low}, {high}], got {value}")


def _check_at_least(name: str, value: float, minimum: float) -> None:
    if value < minimum:
        raise SolverError(f"Parameter {name} must be at least {minimum}, got {value}")


def _check_positive(name: str, value: float) -> None:
    if not value > 0:
        raise SolverError(f"Parameter {name} must be positive, got {value}")


@dataclass
class SplittingParams(ParamsBase):
    """Weights shared by the split texture/cartoon solvers.

    The quadratic penalties are generated from beta4 and theta:
    beta3 = theta / (1 - theta) * beta4, beta1 = c_beta1 * beta4 and
    beta2 = c_beta2 * beta3. The shrinkage thresholds of the texture
    channels adapt every iteration as c_mu1, c_mu2 times the largest
    magnitude of their argument.
    """

    n_dirs_l: int = 9
    n_dirs_s: int = 9
    theta: float = 0.9
    beta4: float = 0.04
    c_beta1: float = 1.0
    c_beta2: float = 1.3
    c_mu1: float = 0.03
    c_mu2: float = 0.03
    nu: float = 16.0
    iters: int = 100
    wavelet: str = "haar"
    intensity_scale: float = 255.0
    tol: float = NO_TOLERANCE

    @property
    def beta1(self) -> float:
        return self.c_beta1 * self.beta4

    @property
    def beta3(self) -> float:
        return self.theta / (1.0 - self.theta) * self.beta4

    @property
    def beta2(self) -> float:
        return self.c_beta2 * self.beta3

    def validate(self) -> None:
        _check_at_least("n_dirs_l", self.n_dirs_l, 1)
        _check_at_least("n_dirs_s", self.n_dirs_s, 1)
        if not 0.0 < self.theta < 1.0:
            raise SolverError(f"Parameter theta must lie in (0, 1), got {self.theta}")
        _check_positive("beta4", self.beta4)
        _check_positive("c_beta1", self.c_beta1)
        _check_positive("c_beta2", self.c_beta2)
        _check_fraction("c_mu1", self.c_mu1)
        _check_fraction("c_mu2", self.c_mu2)
        _check_at_least("nu", self.nu, 0.0)
        _check_at_least("iters", self.iters, 1)
        _check_positive("intensity_scale", self.intensity_scale)


@dataclass
class Dg3pdParams(SplittingParams):
    """Parameters of the three-part cartoon/texture/residual decomposition.

    Setting texture to False keeps v at zero, so f splits into u and the
    residual only.
    """

    gamma: float = 1.0
    texture: bool = True

    def validate(self) -> None:
        super().validate()
        if not 0.0 < self.gamma < 2.0:
            raise SolverError(f"Parameter gamma must lie in (0, 2), got {self.gamma}")


@dataclass
class TwoPhaseParams(SplittingParams):
    """Parameters of the two-phase piecewise constant and texture model."""

    n_dirs_l: int = 150
    beta4: float = 0.03
    nu: float = 0.0
    threshold: float = 0.5
    texture_mark: float = 50.0

    def validate(self) -> None:
        super().validate()
        if not 0.0 < self.threshold < 1.0:
            raise SolverError(f"Parameter threshold must lie in (0, 1), got {self.threshold}")


@dataclass
class ShtParams(ParamsBase):
    """Parameters of the single-level multiphase model.

    mu2 is the texture weight. With mu2_iters > 0 it is only the starting
    value: during the first mu2_iters iterations it moves halfway towards
    the value re-derived from c_mu2, afterwards it is held.
    """

    n_dirs_l: int = 2
    n_dirs_s: int = 2
    n_dirs_m: int = 2
    n_phases: int = 3
    alpha: float = 0.1
    beta: float = 0.04
    mu1: float = 0.1
    mu2: float = 1.0
    mu3: float = 0.1
    mu4: float = 0.01
    c_mu2: float = 0.14
    mu2_iters: int = 0
    nu: float = 10.0
    xi: float = 0.001
    tau: float = 0.1
    iters: int = 500
    wavelet: str = "haar"
    intensity_scale: float = 255.0
    tol: float = NO_TOLERANCE

    def validate(self) -> None:
        _check_at_least("n_dirs_l", self.n_dirs_l, 1)
        _check_at_least("n_dirs_s", self.n_dirs_s, 1)
        _check_at_least("n_dirs_m", self.n_dirs_m, 1)
        _check_at_least("n_phases", self.n_phases, 2)
        for name in ("alpha", "beta", "mu2", "mu3", "mu4", "xi", "tau", "intensity_scale"):
            _check_positive(name, getattr(self, name))
        _check_at_least("mu1", self.mu1, 0.0)
        _check_at_least("nu", self.nu, 0.0)
        _check_fraction("c_mu2", self.c_mu2)
        _check_at_least("mu2_iters", self.mu2_iters, 0)
        _check_at_least("iters", self.iters, 1)
        _check_at_least("intensity_scale", self.intensity_scale, self.n_phases)


@dataclass
class ShtmsParams(ParamsBase):
    """Parameters of the multiphase segmentation level of the bilevel model."""

    n_dirs_m: int = 2
    n_phases: int = 3
    xi: float = 0.001
    mu3: float = 0.1
    tau: float = 0.1

    def validate(self) -> None:
        _check_at_least("n_dirs_m", self.n_dirs_m, 1)
        _check_at_least("n_phases", self.n_phases, 2)
        _check_positive("xi", self.xi)
        _check_positive("mu3", self.mu3)
        _check_positive("tau", self.tau)


@dataclass
class BilevelParams(ParamsBase):
    """Parameters of the bilevel model.

    iters counts outer iterations; each runs inner_iters decomposition
    steps followed by one segmentation step. With segment set to False the
    segmentation level is skipped entirely.
    """

    iters: int = 100
    inner_iters: int = 100
    beta5: float = 100.0
    segment: bool = True
    decomposition: Dg3pdParams = field(default_factory=Dg3pdParams)
    segmentation: ShtmsParams = field(default_factory=ShtmsParams)

    @classmethod
    def setting_keys(cls) -> list[str]:
        own = [f.name for f in fields(cls) if f.name not in ("decomposition", "segmentation")]
        nested = [
            key
            for key in Dg3pdParams.setting_keys() + ShtmsParams.setting_keys()
            if key not in own
        ]
        return own + nested

    @classmethod
    def from_settings(cls, store: Mapping[str, str]) -> Self:
        own = {key: value for key, value in store.items() if key != "iters"}
        params = super().from_settings(store)
        return replace(
            params,
            decomposition=Dg3pdParams.from_settings(own),
            segmentation=ShtmsParams.from_settings(own),
        )

    @property
    def intensity_scale(self) -> float:
        return self.decomposition.intensity_scale

    @property
    def tol(self) -> float:
        return self.decomposition.tol

    def validate(self) -> None:
        _check_at_least("iters", self.iters, 1)
        _check_at_least("inner_iters", self.inner_iters, 1)
        _check_positive("beta5", self.beta5)
        self.decomposition.validate()
        self.segmentation.validate()
