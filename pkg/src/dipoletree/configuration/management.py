"""
Filename: management.py

Description:
    Automatically finds and loads the .dipoletree file from the
    working directory (or any parent) and merges it over the
    packaged defaults.
"""

from __future__ import annotations

import logging
from configparser import ConfigParser, Error as ParserError
from pathlib import Path
from typing import Any

from dipoletree.configuration.defaults import CONFIG_FILENAME, DEFAULTS
from dipoletree.utilities.errors import ConfigError

logger = logging.getLogger(__name__)


# Effective settings after first load
_effective_settings: dict[str, dict[str, Any]] | None = None
_effective_source: Path | None = None


def get_settings() -> dict[str, dict[str, Any]]:
    """ Gets the effective settings, loading them on first use """
    if _effective_settings is None:
        _load_config()

    return {section: dict(values) for section, values in _effective_settings.items()}


def get_setting(section: str, key: str) -> Any:
    """ Gets a single effective value """
    return get_settings()[section][key]


def get_config_source() -> Path | None:
    """ The .dipoletree file in use, or None when running on defaults """
    if _effective_settings is None:
        _load_config()

    return _effective_source


def reload_config() -> None:
    """ reloads configuration """
    global _effective_settings, _effective_source
    _effective_settings, _effective_source = None, None

    _load_config()


def _load_config() -> None:
    """ Loads the configuration """
    global _effective_settings, _effective_source
    settings = {section: dict(values) for section, values in DEFAULTS.items()}
    local_file = find_config_file()

    if local_file:
        for section, values in load_from_file(local_file).items():
            settings[section].update(values)
        logger.debug("Using settings from %s", local_file)

    _effective_settings, _effective_source = settings, local_file


def find_config_file(start: Path | None = None) -> Path | None:
    """ Search upwards from cwd for .dipoletree """
    cwd = start or Path.cwd()
    for path in [cwd, *cwd.parents]:
        candidate = path / CONFIG_FILENAME
        if candidate.is_file():
            return candidate

    # Returns none for no results
    return None


def load_from_file(filepath: Path) -> dict[str, dict[str, Any]]:
    """ Parses every known section of a .dipoletree file """
    config = ConfigParser(delimiters=(":", "="), comment_prefixes=("#", ";"))
    try:
        config.read(filepath, encoding="utf-8")
    except ParserError as e:
        raise ConfigError("file", str(filepath), str(e).splitlines()[0]) from e

    parsed: dict[str, dict[str, Any]] = {}
    for section in config.sections():
        if section not in DEFAULTS:
            raise ConfigError(section, "*", f"unknown section, expected one of {list(DEFAULTS)}")

        parsed[section] = {
            key.strip().lower(): _parse_value(section, key.strip().lower(), raw)
            for key, raw in config[section].items()
        }

    return parsed


def _parse_value(section: str, key: str, raw: str) -> Any:
    """ Converts a raw entry to the type of its packaged default """
    if key not in DEFAULTS[section]:
        raise ConfigError(section, key, f"unknown key, expected one of {list(DEFAULTS[section])}")

    default = DEFAULTS[section][key]
    text = raw.strip()

    try:
        if isinstance(default, tuple):
            items = [item.strip() for item in text.split(",") if item.strip()]
            if default and isinstance(default[0], float):
                return tuple(float(item) for item in items)
            return tuple(items)

        if isinstance(default, bool):
            return text.lower() in ("1", "true", "yes", "on")

        if isinstance(default, int):
            return int(text)

        if isinstance(default, float):
            return float(text)

    except ValueError as e:
        raise ConfigError(section, key, f"cannot parse {text!r} as {type(default).__name__}") from e

    if not text:
        raise ConfigError(section, key, "value is empty")

    return text
