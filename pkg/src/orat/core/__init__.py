from .config import (
    DEFAULT_OUTPUT_DIR,
    MNIST_DIR_ENV,
    format_schedule,
    mnist_dir,
    parse_bool,
    parse_float,
    parse_int,
    parse_int_list,
    parse_key_value_text,
    parse_optional_float,
    parse_schedule,
    read_key_value_file,
)
from .enums import AttackKind, NoiseKind, TrainMode, parse_enum
from .events import EpochRecord, StepCompletedEvent
from .exceptions import (
    AttackError,
    CheckpointError,
    ConfigError,
    ContractError,
    DataError,
    DegenerateCovarianceError,
    DimensionError,
    IdxCountMismatchError,
    IdxFormatError,
    IdxMagicError,
    IdxTruncatedError,
    LabelIndexError,
    NumericError,
    OratError,
    TrainingError,
    VerificationError,
)
from .protocols import Classifier, MarginLoss
from .signals import Signal

__all__ = [
    # config.py
    "DEFAULT_OUTPUT_DIR",
    "MNIST_DIR_ENV",
    "format_schedule",
    "mnist_dir",
    "parse_bool",
    "parse_float",
    "parse_int",
    "parse_int_list",
    "parse_key_value_text",
    "parse_optional_float",
    "parse_schedule",
    "read_key_value_file",

    # enums.py
    "AttackKind",
    "NoiseKind",
    "TrainMode",
    "parse_enum",

    # events.py
    "EpochRecord",
    "StepCompletedEvent",

    # exceptions.py
    "AttackError",
    "CheckpointError",
    "ConfigError",
    "ContractError",
    "DataError",
    "DegenerateCovarianceError",
    "DimensionError",
    "IdxCountMismatchError",
    "IdxFormatError",
    "IdxMagicError",
    "IdxTruncatedError",
    "LabelIndexError",
    "NumericError",
    "OratError",
    "TrainingError",
    "VerificationError",

    # protocols.py
    "Classifier",
    "MarginLoss",

    # signals.py
    "Signal",
]
