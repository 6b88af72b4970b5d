import logging
import os
from pathlib import Path

from .exceptions import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_OUTPUT_DIR = Path("runs")
MNIST_DIR_ENV = "ORAT_MNIST_DIR"

MNIST_TRAIN_IMAGES = "train-images-idx3-ubyte"
MNIST_TRAIN_LABELS = "train-labels-idx1-ubyte"
MNIST_TEST_IMAGES = "t10k-images-idx3-ubyte"
MNIST_TEST_LABELS = "t10k-labels-idx1-ubyte"

_TRUE_WORDS = {"1", "true", "yes", "on"}
_FALSE_WORDS = {"0", "false", "no", "off"}
_NONE_WORDS = {"none", "null", ""}


def mnist_dir() -> Path | None:
    """Directory holding the MNIST IDX files, taken from ``ORAT_MNIST_DIR``."""
    value = os.environ.get(MNIST_DIR_ENV)
    return Path(value) if value else None


# ==================== KEY-VALUE FILES ====================
def read_key_value_file(path: str | Path) -> dict[str, str]:
    """Parse a flat ``key = value`` config file.

    Blank lines and ``#`` comments (whole-line or trailing) are ignored. Keys are
    lower-cased; values keep their spelling with surrounding whitespace removed.

    Raises:
        ConfigError: The file is unreadable, a line has no ``=``, or a key repeats.

    """
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e

    return parse_key_value_text(text, source=str(path))


def parse_key_value_text(text: str, *, source: str = "<string>") -> dict[str, str]:
    entries: dict[str, str] = {}
    for line_no, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue

        key, sep, value = line.partition("=")
        key = key.strip().lower()
        if not sep or not key:
            raise ConfigError(
                f"{source}:{line_no}: expected 'key = value', got {raw_line!r}",
            )

        if key in entries:
            raise ConfigError(f"{source}:{line_no}: duplicate key '{key}'")

        entries[key] = value.strip()

    logger.debug("Read %d config entries from %s.", len(entries), source)

    return entries


# ==================== VALUE PARSERS ====================
def parse_bool(key: str, value: str) -> bool:
    word = value.strip().lower()
    if word in _TRUE_WORDS:
        return True

    if word in _FALSE_WORDS:
        return False

    raise ConfigError(f"'{key}' expects a boolean, got '{value}'")


def parse_int(key: str, value: str) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConfigError(f"'{key}' expects an integer, got '{value}'") from None


def parse_float(key: str, value: str) -> float:
    try:
        return float(value)
    except ValueError:
        raise ConfigError(f"'{key}' expects a number, got '{value}'") from None


def parse_optional_float(key: str, value: str) -> float | None:
    if value.strip().lower() in _NONE_WORDS:
        return None

    return parse_float(key, value)


def parse_int_list(key: str, value: str) -> tuple[int, ...]:
    """Parse ``"128, 64"`` into ``(128, 64)``; an empty value gives ``()``."""
    if value.strip().lower() in _NONE_WORDS:
        return ()

    return tuple(parse_int(key, item) for item in value.split(","))


def parse_schedule(key: str, value: str) -> dict[int, float]:
    """Parse an ``epoch:multiplier`` table such as ``"20:0.1, 40:0.01"``."""
    schedule: dict[int, float] = {}
    if value.strip().lower() in _NONE_WORDS:
        return schedule

    for item in value.split(","):
        epoch, sep, multiplier = item.partition(":")
        if not sep:
            raise ConfigError(
                f"'{key}' entries must look like 'epoch:multiplier', got '{item}'",
            )

        schedule[parse_int(key, epoch)] = parse_float(key, multiplier)

    return schedule


def format_schedule(schedule: dict[int, float]) -> str:
    items = sorted(schedule.items())
    return ", ".join(f"{epoch}:{multiplier!r}" for epoch, multiplier in items)
