from collections.abc import Callable, Iterable
from pathlib import Path
from typing import Generic

from typing_extensions import TypeVar

from modules.utils import SettingsError

from .base import parse_bool

T = TypeVar("T")
V = TypeVar("V", default=None)

# flat key -> raw string settings of the current run
settings: dict[str, str] = {}


class ConfigEntry(Generic[T, V]):
    """Helper class to interact with one key of the run settings."""

    def __init__(self, key: str, parse: Callable[[str], T], default: V = None) -> None:
        """Create new setting entry.

        Args:
            key (str): the setting key
            parse (Callable[[str], T]): converts the raw string value
            default (V, optional): The value used when the key is absent.
                Defaults to None.
        """
        self.key = key
        self.parse = parse
        self.default = default

    def get(self) -> T | V:
        """Get the parsed setting value.

        Raises:
            SettingsError: if the raw value cannot be parsed

        Returns:
            T | V: current value
        """
        if self.key not in settings:
            return self.default
        raw = settings[self.key]
        try:
            return self.parse(raw)
        except ValueError as err:
            raise SettingsError(f"Invalid value for {self.key}: {raw!r}") from err

    def set(self, value: T) -> None:
        """Set the setting value.

        Args:
            value (T): the new value
        """
        settings[self.key] = str(value).lower() if isinstance(value, bool) else str(value)

    def reset(self) -> None:
        """Remove the setting so the default applies."""
        settings.pop(self.key, None)

    def get_once(self) -> T | V:
        """Get the setting value and reset.

        Returns:
            T | V: current value
        """
        ret = self.get()
        self.reset()
        return ret


pipeline = ConfigEntry[str]("pipeline", str)
input_path = ConfigEntry[Path]("input", Path)
synthetic = ConfigEntry[str]("synthetic", str)
out = ConfigEntry[Path, Path]("out", Path, Path("out"))
seed = ConfigEntry[int, int]("seed", int, 0)
noise_sigma = ConfigEntry[float, float]("noise_sigma", float, 0.0)
threads = ConfigEntry[int, int]("threads", int, 1)
log_level = ConfigEntry[str, str]("log_level", str, "INFO")
raw_dumps = ConfigEntry[bool, bool]("raw_dumps", parse_bool, False)
size = ConfigEntry[int, int]("size", int, 64)

RUN_ENTRIES: tuple[ConfigEntry, ...] = (
    pipeline,
    input_path,
    synthetic,
    out,
    seed,
    noise_sigma,
    threads,
    log_level,
    raw_dumps,
    size,
)
RUN_KEYS = tuple(entry.key for entry in RUN_ENTRIES)


def clear() -> None:
    """Drop every setting."""
    settings.clear()


def parse_config_text(text: str) -> dict[str, str]:
    """Parse flat key=value lines; '#' starts a comment.

    Args:
        text (str): config file content

    Raises:
        SettingsError: if a non-empty line has no '=' or an empty key

    Returns:
        dict[str, str]: settings in file order, later lines win
    """
    values: dict[str, str] = {}
    for number, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip()
        if not sep or not key:
            raise SettingsError(f"Line {number}: expected key=value, got {line!r}")
        values[key] = value.strip()
    return values


def load_config_file(path: Path) -> dict[str, str]:
    """Read a config file into settings.

    Args:
        path (Path): config file path

    Raises:
        SettingsError: if the file cannot be read or parsed

    Returns:
        dict[str, str]: the values read
    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise SettingsError(f"Cannot read config file {path}: {err}") from err
    values = parse_config_text(text)
    settings.update(values)
    return values


def check_keys(pipeline_keys: Iterable[str]) -> None:
    """Reject settings that neither the run nor the pipeline reads.

    Args:
        pipeline_keys (Iterable[str]): keys of the pipeline parameters

    Raises:
        SettingsError: listing the unknown and the valid keys
    """
    valid = sorted(set(RUN_KEYS) | set(pipeline_keys))
    unknown = sorted(set(settings) - set(valid))
    if unknown:
        raise SettingsError(
            f"Unknown settings {', '.join(unknown)}; valid keys are {', '.join(valid)}"
        )


def check_required() -> None:
    """Require a pipeline and exactly one of input or synthetic.

    Raises:
        SettingsError: if a required key is missing or both sources are given
    """
    if pipeline.get() is None:
        raise SettingsError("Missing required setting: pipeline")
    has_input = input_path.key in settings
    has_synthetic = synthetic.key in settings
    if has_input == has_synthetic:
        raise SettingsError("Exactly one of input or synthetic must be set")
