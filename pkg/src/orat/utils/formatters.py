def format_duration(duration: int | float) -> str:
    """Convert a wall-clock duration in seconds to ``HH:MM:SS.mmm``.

    Args:
        duration: Duration in seconds.

    Returns:
        Formatted time string (e.g., "00:01:05.250").

    """
    total_ms = round(duration * 1000)
    ms_in_hr = 3_600_000
    ms_in_min = 60_000
    ms_in_sec = 1000

    hours, remainder = divmod(total_ms, ms_in_hr)
    minutes, remainder = divmod(remainder, ms_in_min)
    seconds, millis = divmod(remainder, ms_in_sec)

    return f"{hours:02d}:{minutes:02d}:{seconds:02d}.{millis:03d}"


def format_float(value: float | None) -> str:
    """Render a float for CSV output.

    ``repr`` is the shortest string that parses back to the same 64-bit value, so
    written files round-trip exactly and are byte-stable across runs. ``None``
    becomes an empty cell.
    """
    if value is None:
        return ""

    return repr(float(value))


def parse_optional_float(cell: str) -> float | None:
    return None if cell == "" else float(cell)


def format_percent(fraction: float) -> str:
    return f"{100.0 * fraction:6.2f}%"
