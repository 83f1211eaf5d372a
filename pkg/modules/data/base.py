from collections.abc import Mapping
from dataclasses import dataclass, fields
from typing import Any, get_type_hints

from typing_extensions import Self

from modules.utils import SettingsError


def parse_bool(text: str) -> bool:
    """Parse a boolean setting value."""
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text}")


_PARSERS = {int: int, float: float, bool: parse_bool, str: str}


@dataclass
class ParamsBase:
    """Base class of solver parameter sets built from flat string settings."""

    @classmethod
    def setting_keys(cls) -> list[str]:
        """Names of the settings this parameter set reads.

        Returns:
            list[str]: setting keys
        """
        return [f.name for f in fields(cls)]

    @classmethod
    def from_settings(cls, store: Mapping[str, str]) -> Self:
        """Build the parameter set from a key -> string store.

        Keys that are absent keep their defaults; keys belonging to other
        parameter sets are ignored.

        Args:
            store (Mapping[str, str]): flat settings

        Raises:
            SettingsError: if a value cannot be parsed

        Returns:
            Self: validated parameters
        """
        hints = get_type_hints(cls)
        values: dict[str, Any] = {}
        for f in fields(cls):
            parser = _PARSERS.get(hints[f.name])
            if parser is None or f.name not in store:
                continue
            try:
                values[f.name] = parser(store[f.name])
            except ValueError as err:
                raise SettingsError(f"Invalid value for {f.name}: {store[f.name]!r}") from err
        params = cls(**values)
        params.validate()
        return params

    def validate(self) -> None:
        """Check parameter ranges.

        Raises:
            SolverError: if a parameter is out of range
        """
        pass
