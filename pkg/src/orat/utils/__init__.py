from .formatters import (
    format_duration,
    format_float,
    format_percent,
    parse_optional_float,
)
from .logging_config import setup_logging
from .rng import Rng, derive_rng, derive_seed, make_rng, spawn_seed, standard_normal

__all__ = [
    # formatters.py
    "format_duration",
    "format_float",
    "format_percent",
    "parse_optional_float",

    # logging_config.py
    "setup_logging",

    # rng.py
    "Rng",
    "derive_rng",
    "derive_seed",
    "make_rng",
    "spawn_seed",
    "standard_normal",
]
