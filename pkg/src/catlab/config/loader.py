"""Experiment configuration loader with defaults and environment overrides."""

import os
from collections.abc import Mapping
from pathlib import Path
from typing import Any

import yaml

from catlab.exceptions import ConfigError

TEMPLATE_DIR = Path(__file__).parent / "templates"
DEFAULTS_FILE = TEMPLATE_DIR / "default.yaml"

ENV_PREFIX = "CATLAB_"

# Keys accepting more than the type of their default
_UNION_TYPES: dict[tuple[str, str], tuple[type, ...]] = {
    ("transform", "A"): (str, float),
}

_CHOICES: dict[tuple[str, str], tuple[str, ...]] = {
    ("space", "kind"): ("model", "grid", "graph", "tree", "line"),
    ("transform", "kind"): ("none", "nonpos", "main", "custom"),
}


def _mark_position(mark: Any) -> tuple[int | None, int | None]:
    if mark is None:
        return None, None
    return mark.line + 1, mark.column + 1


def _parse_yaml(text: str, source: str) -> tuple[dict, dict[tuple[str, ...], tuple[int, int]]]:
    """
    Parse YAML text and record the position of every section and key.

    Returns
    -------
    tuple
        ``(content, positions)`` where positions maps ``(section,)`` and
        ``(section, key)`` to 1-based ``(line, column)``.

    Raises
    ------
    ConfigError
        On YAML syntax errors, with the position of the problem.
    """
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        content = yaml.safe_load(text)
    except yaml.MarkedYAMLError as e:
        line, column = _mark_position(e.problem_mark)
        raise ConfigError(f"Invalid YAML in {source}: {e.problem}", line, column) from None
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in {source}: {e}") from None

    positions: dict[tuple[str, ...], tuple[int, int]] = {}
    if content is None:
        return {}, positions
    if not isinstance(content, dict):
        line, column = _mark_position(node.start_mark)
        raise ConfigError(f"{source} must be a mapping of sections", line, column)
    for key_node, value_node in node.value:
        section = str(key_node.value)
        positions[(section,)] = _mark_position(key_node.start_mark)
        if isinstance(value_node, yaml.MappingNode):
            for sub_key, sub_value in value_node.value:
                positions[(section, str(sub_key.value))] = _mark_position(sub_key.start_mark)
                if not isinstance(sub_value, yaml.ScalarNode):
                    line, column = _mark_position(sub_value.start_mark)
                    raise ConfigError(
                        f"{section}.{sub_key.value} must be a scalar; nested structures are not accepted",
                        line,
                        column,
                    )
    return content, positions


def load_defaults() -> dict[str, dict[str, Any]]:
    """Packaged defaults: every section and key an experiment file may set."""
    content, _ = _parse_yaml(DEFAULTS_FILE.read_text(encoding="utf-8"), str(DEFAULTS_FILE))
    return content


def _coerce(section: str, key: str, value: Any, default: Any) -> Any:
    """
    Check ``value`` against the type of ``default``.

    Integers are accepted for float keys and converted; booleans are never
    accepted as numbers.

    Raises
    ------
    ConfigError
        On a type mismatch or a value outside the key's choices.
    """
    allowed = _UNION_TYPES.get((section, key), (type(default),))
    name = f"{section}.{key}"
    if isinstance(value, bool):
        if bool in allowed:
            return value
        raise ConfigError(f"{name} must be {' or '.join(t.__name__ for t in allowed)}, got a boolean")
    if float in allowed and isinstance(value, int):
        value = float(value)
    if not isinstance(value, allowed):
        raise ConfigError(
            f"{name} must be {' or '.join(t.__name__ for t in allowed)}, got {type(value).__name__}"
        )
    choices = _CHOICES.get((section, key))
    if choices is not None and value not in choices:
        raise ConfigError(f"{name} must be one of {', '.join(choices)}, got {value!r}")
    if (section, key) == ("transform", "A") and isinstance(value, str) and value != "auto":
        raise ConfigError(f"{name} must be 'auto' or a number, got {value!r}")
    return value


def normalize_config(config: Mapping[str, Mapping[str, Any]], defaults: dict | None = None) -> dict:
    """
    Canonical form of a configuration: every default filled in, values typed,
    sections and keys sorted.

    Parameters
    ----------
    config : mapping
        Sections of flat key/value pairs (any subset of the defaults).
    defaults : dict, optional
        Defaults to validate against; the packaged defaults when omitted.

    Returns
    -------
    dict
        Normalized configuration.

    Raises
    ------
    ConfigError
        On unknown sections or keys and wrong value types.

    Examples
    --------
    >>> normalize_config({"check": {"n_triangles": 10}})["check"]["n_triangles"]
    10
    """
    defaults = load_defaults() if defaults is None else defaults
    result: dict[str, dict[str, Any]] = {}
    for section in config:
        if section not in defaults:
            raise ConfigError(f"Unknown section: {section!r}")
    for section in sorted(defaults):
        given = config.get(section) or {}
        if not isinstance(given, Mapping):
            raise ConfigError(f"Section {section!r} must be a mapping")
        values = {}
        for key in given:
            if key not in defaults[section]:
                raise ConfigError(f"Unknown key: {section}.{key}")
        for key in sorted(defaults[section]):
            default = defaults[section][key]
            value = given.get(key, default)
            values[key] = _coerce(section, key, value, default)
        result[section] = values
    return result


def dump_config(config: Mapping[str, Mapping[str, Any]]) -> str:
    """
    YAML text of a normalized configuration.

    ``normalize_config(yaml.safe_load(dump_config(c))) == c`` for normalized ``c``.
    """
    return yaml.safe_dump(
        {s: dict(v) for s, v in config.items()}, sort_keys=True, default_flow_style=False
    )


class ConfigLoader:
    """
    Load and merge experiment configuration from multiple sources.

    Merge order (lowest to highest priority):
    1. Packaged defaults (templates/default.yaml)
    2. Experiment file
    3. Environment variables (CATLAB_<SECTION>_<KEY>)
    4. Command-line overrides (``--seed``)

    Attributes
    ----------
    config_path : Path or None
        Experiment file.
    overrides : dict
        ``{"section.key": value}`` pairs from the command line.
    environ : mapping
        Environment to read overrides from.
    """

    def __init__(
        self,
        config_path: Path | None = None,
        overrides: Mapping[str, Any] | None = None,
        environ: Mapping[str, str] | None = None,
    ):
        self.config_path = Path(config_path) if config_path is not None else None
        self.overrides = dict(overrides or {})
        self.environ = os.environ if environ is None else environ
        self._positions: dict[tuple[str, ...], tuple[int, int]] = {}

    def _load_file(self) -> dict:
        """
        Load the experiment file.

        Raises
        ------
        ConfigError
            If the file is missing or not valid YAML.
        """
        if self.config_path is None:
            return {}
        if not self.config_path.exists():
            raise ConfigError(f"Config file not found: {self.config_path}")
        content, self._positions = _parse_yaml(
            self.config_path.read_text(encoding="utf-8"), str(self.config_path)
        )
        return content

    def _deep_merge(self, base: dict, override: dict) -> dict:
        """Merge section dictionaries; override values replace base values."""
        result = {k: dict(v) if isinstance(v, dict) else v for k, v in base.items()}
        for key, value in override.items():
            if key in result and isinstance(result[key], dict) and isinstance(value, dict):
                result[key] = {**result[key], **value}
            else:
                result[key] = value
        return result

    def _env_overrides(self, defaults: dict) -> dict:
        """
        Overrides from ``CATLAB_<SECTION>_<KEY>`` variables.

        The key part matches a key exactly first (``CATLAB_TRANSFORM_R`` is
        ``transform.R``), otherwise case-insensitively. Values are parsed as
        YAML scalars, so ``CATLAB_CHECK_N_TRIANGLES=200`` is an integer.
        ``CATLAB_OUT`` and the logging variables are not config keys.
        """
        overrides: dict[str, dict[str, Any]] = {}
        for env_key, raw in sorted(self.environ.items()):
            if not env_key.startswith(ENV_PREFIX):
                continue
            section, sep, key = env_key[len(ENV_PREFIX) :].partition("_")
            section = section.lower()
            if not sep or section not in defaults:
                continue
            keys = defaults[section]
            if key not in keys:
                matches = [k for k in keys if k.lower() == key.lower()]
                if len(matches) != 1:
                    raise ConfigError(f"Unknown key in environment override {env_key}")
                key = matches[0]
            try:
                value = yaml.safe_load(raw) if raw.strip() else ""
            except yaml.YAMLError:
                raise ConfigError(f"Invalid value in environment override {env_key}: {raw!r}") from None
            overrides.setdefault(section, {})[key] = value
        return overrides

    def _cli_overrides(self) -> dict:
        out: dict[str, dict[str, Any]] = {}
        for path, value in self.overrides.items():
            if value is None:
                continue
            section, _, key = path.partition(".")
            out.setdefault(section, {})[key] = value
        return out

    def _locate(self, error: ConfigError) -> ConfigError:
        """Attach the file position of the offending key to a validation error."""
        if error.line is not None:
            return error
        for words in (error.message.replace("'", " ").split()):
            parts = tuple(words.rstrip(",:").split("."))
            if parts in self._positions:
                line, column = self._positions[parts]
                return ConfigError(error.message, line, column)
        return error

    def load(self) -> dict:
        """
        Load, merge and normalize configuration from all sources.

        Returns
        -------
        dict
            Normalized configuration (see :func:`normalize_config`).

        Raises
        ------
        ConfigError
            On missing files, YAML errors, unknown keys or bad values, with
            the file position when the problem is in the experiment file.
        """
        defaults = load_defaults()
        config = self._deep_merge({}, defaults)
        file_config = self._load_file()
        for section, values in file_config.items():
            if not isinstance(values, dict) and values is not None:
                line, column = self._positions.get((str(section),), (None, None))
                raise ConfigError(f"Section {section!r} must be a mapping of keys", line, column)
        config = self._deep_merge(config, {k: v or {} for k, v in file_config.items()})
        config = self._deep_merge(config, self._env_overrides(defaults))
        config = self._deep_merge(config, self._cli_overrides())
        try:
            return normalize_config(config, defaults)
        except ConfigError as e:
            raise self._locate(e) from None


def get_config_value(config: dict, key_path: str, default: Any = None) -> Any:
    """
    Get configuration value using dot notation path.

    Parameters
    ----------
    config : dict
        Configuration dictionary to query.
    key_path : str
        Key path in dot notation (e.g., "check.n_triangles").
    default : Any, optional
        Default value to return if key doesn't exist, by default None.

    Returns
    -------
    Any
        Configuration value if found, default value otherwise.

    Examples
    --------
    >>> config = {"check": {"kappa": -1.0}}
    >>> get_config_value(config, "check.kappa")
    -1.0
    >>> get_config_value(config, "nonexistent.key", "default")
    'default'
    """
    value = config
    for key in key_path.split("."):
        if isinstance(value, dict) and key in value:
            value = value[key]
        else:
            return default
    return value

