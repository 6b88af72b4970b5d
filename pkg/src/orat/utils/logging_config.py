import logging
from pathlib import Path


def setup_logging(verbose: bool = False, log_file: str | Path | None = None) -> None:
    """Configure the root logger for a command-line run.

    Args:
        verbose: If True, the console shows DEBUG records; otherwise INFO and above.
        log_file: Optional path that receives every DEBUG record of the run.

    """
    logger = logging.getLogger()
    logger.setLevel(level=logging.DEBUG)

    formatter = logging.Formatter(
        fmt="%(asctime)s.%(msecs)03d "
            "- [%(threadName)s] "
            "- %(levelname)s"
            "- %(name)s: %(message)s",
        datefmt="%H:%M:%S",
    )

    # Repeated calls (tests, library embedding) must not stack handlers
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()

    console_handler = logging.StreamHandler()
    console_handler.setLevel(level=logging.DEBUG if verbose else logging.INFO)
    console_handler.setFormatter(formatter)
    logger.addHandler(console_handler)

    if log_file is not None:
        file_handler = logging.FileHandler(log_file, mode="w", encoding="utf-8")
        file_handler.setLevel(level=logging.DEBUG)
        file_handler.setFormatter(formatter)
        logger.addHandler(file_handler)
