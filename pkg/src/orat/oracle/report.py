import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from orat.core import DataError
from orat.core.constants import ORACLE_CSV_HEADER
from orat.utils import format_float

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one verifier.

    ``worst`` embeds the worst instance so it can be replayed as a regression case.
    """

    check: str
    trials: int
    failures: int
    max_deviation: float
    tolerance: float
    worst: str = ""
    note: str = ""

    @property
    def passed(self) -> bool:
        return self.failures == 0


class CheckTally:
    """Accumulates per-trial deviations against a tolerance."""

    def __init__(self, check: str, tolerance: float):
        self._check = check
        self._tolerance = tolerance
        self._trials = 0
        self._failures = 0
        self._max_deviation = 0.0
        self._worst = ""

    def record(self, deviation: float, instance: str) -> None:
        self._trials += 1
        if not math.isfinite(deviation):
            deviation = math.inf

        if deviation > self._tolerance:
            self._failures += 1
            logger.debug("%s failed by %r on %s", self._check, deviation, instance)

        if deviation > self._max_deviation or not self._worst:
            self._max_deviation = deviation
            self._worst = instance

    def result(self, note: str = "") -> CheckResult:
        return CheckResult(
            check=self._check,
            trials=self._trials,
            failures=self._failures,
            max_deviation=self._max_deviation,
            tolerance=self._tolerance,
            worst=self._worst,
            note=note,
        )


@dataclass
class OracleReport:
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failed_checks(self) -> list[str]:
        return [result.check for result in self.results if not result.passed]

    def summary_lines(self) -> list[str]:
        lines = []
        for r in self.results:
            status = "PASS" if r.passed else "FAIL"
            line = (
                f"{status}  {r.check:<26} trials={r.trials:<6} "
                f"failures={r.failures:<4} "
                f"max_dev={r.max_deviation:.3e} tol={r.tolerance:.0e}"
            )
            lines.append(f"{line}  ({r.note})" if r.note else line)

        return lines


def write_oracle_csv(path: str | Path, report: OracleReport) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as file:
            writer = csv.writer(file, lineterminator="\n")
            writer.writerow(ORACLE_CSV_HEADER)
            for r in report.results:
                writer.writerow([
                    r.check,
                    r.trials,
                    r.failures,
                    format_float(r.max_deviation),
                    format_float(r.tolerance),
                    r.worst,
                ])
    except OSError as e:
        raise DataError(f"cannot write oracle report {path}: {e}") from e

    return path
