from .cli import (
    EXIT_OK,
    EXIT_RUNTIME,
    EXIT_USAGE,
    EXIT_VERIFICATION,
    OratArgumentParser,
    build_parser,
)
from .commands import (
    COMMANDS,
    cmd_eval,
    cmd_gen_data,
    cmd_grid_search,
    cmd_train,
    cmd_verify,
)
from .context import ProgressLogger, TrainingContext, build_training_context

__all__ = [
    # cli.py
    "EXIT_OK",
    "EXIT_RUNTIME",
    "EXIT_USAGE",
    "EXIT_VERIFICATION",
    "OratArgumentParser",
    "build_parser",

    # commands.py
    "COMMANDS",
    "cmd_eval",
    "cmd_gen_data",
    "cmd_grid_search",
    "cmd_train",
    "cmd_verify",

    # context.py
    "ProgressLogger",
    "TrainingContext",
    "build_training_context",
]
