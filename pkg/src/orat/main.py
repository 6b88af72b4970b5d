import logging
import sys
from collections.abc import Sequence

from orat.app import (
    COMMANDS,
    EXIT_RUNTIME,
    EXIT_USAGE,
    EXIT_VERIFICATION,
    build_parser,
)
from orat.core import ConfigError, OratError, VerificationError
from orat.utils import setup_logging

logger = logging.getLogger(__name__)


# ==================== MAIN ====================
def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run the chosen command and map failures onto exit codes.

    Returns:
        0 on success, 1 for usage or configuration errors, 2 for runtime,
        numeric or data errors, 3 when verification fails.

    """
    args = build_parser().parse_args(argv)

    try:
        setup_logging(verbose=args.verbose, log_file=args.log_file)
    except OSError as e:
        print(  # noqa: T201
            f"orat: cannot open log file {args.log_file}: {e}", file=sys.stderr,
        )
        return EXIT_USAGE

    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        logger.error("Configuration error: %s", e)
        return EXIT_USAGE
    except VerificationError as e:
        logger.error("Verification failed: %s", e)
        return EXIT_VERIFICATION
    except OratError as e:
        logger.error("%s failed: %s", args.command, e)
        return EXIT_RUNTIME


def main() -> None:
    """Console entry point."""
    sys.exit(run())


if __name__ == "__main__":
    main()
