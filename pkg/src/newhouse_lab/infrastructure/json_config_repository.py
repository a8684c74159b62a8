"""A JSON file-based implementation of the config repository interface."""

import json
from typing import Any

from newhouse_lab.domain.errors import ConfigError
from newhouse_lab.domain.interval_cantor import MarkovSystem
from newhouse_lab.ports.repository_interfaces import ConfigRepositoryInterface


class JsonConfigRepository(ConfigRepositoryInterface):
    """Reads run configurations and Markov systems from JSON files."""

    def load(self, path: str) -> dict[str, Any]:
        """Read a JSON object.

        Raises:
            ConfigError: If the file is not valid JSON or not an object.
            OSError: If the file cannot be read.
        """
        with open(path, encoding="utf-8") as f:
            try:
                data = json.load(f)
            except json.JSONDecodeError as e:
                raise ConfigError(f"{path}: invalid JSON ({e})") from e
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a JSON object")
        return data

    def load_system(self, path: str) -> MarkovSystem:
        """Read a MarkovSystem given as {"label": ..., "branches": [...]}.

        Raises:
            ConfigError: If the branch data are malformed.
        """
        data = self.load(path)
        try:
            return MarkovSystem.from_dict(data)
        except (KeyError, TypeError, ValueError) as e:
            raise ConfigError(f"{path}: invalid Markov system ({e})") from e
