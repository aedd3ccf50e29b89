"""Configuration management for catlab."""

from catlab.config.loader import ConfigLoader, dump_config, get_config_value, load_defaults, normalize_config

__all__ = ["ConfigLoader", "dump_config", "get_config_value", "load_defaults", "normalize_config"]
