import csv
import logging
import math
import time
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from orat.attacks import AttackConfig
from orat.core import DataError
from orat.core.constants import DEFAULT_EVAL_PGD_STEPS, REPORT_CSV_HEADER
from orat.data import Dataset
from orat.models import MLPParams
from orat.utils import derive_rng, format_float, format_percent

from .metrics import accuracy, robust_accuracy

logger = logging.getLogger(__name__)


# ==================== ROWS ====================
@dataclass(frozen=True)
class EvalRow:
    """One accuracy cell; ``attack`` is ``natural``, ``fgsm`` or ``pgd<P>``."""

    defense: str
    noise_kind: str
    gamma: float
    epsilon: float
    attack: str
    accuracy: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.accuracy <= 1.0:
            raise DataError(f"accuracy must lie in [0, 1], got {self.accuracy}")

    @property
    def cell(self) -> tuple[str, str, float, float, str]:
        return self.defense, self.noise_kind, self.gamma, self.epsilon, self.attack


@dataclass(frozen=True)
class EvalReport:
    """Accuracy rows plus run metadata (seed, sizes, runtime) kept out of the CSV."""

    rows: tuple[EvalRow, ...]
    metadata: dict[str, str] = field(default_factory=dict)

    def accuracy_of(self, attack: str) -> float | None:
        return next((row.accuracy for row in self.rows if row.attack == attack), None)


def standard_attacks(epsilon: float) -> tuple[AttackConfig, ...]:
    """Natural, FGSM and PGD^20 (step ε/4, random start) at radius ε."""
    return (
        AttackConfig.none(),
        AttackConfig.fgsm(epsilon),
        AttackConfig.pgd(epsilon, DEFAULT_EVAL_PGD_STEPS),
    )


def evaluate_model(
        params: MLPParams,
        ds: Dataset,
        attacks: Sequence[AttackConfig],
        *,
        seed: int,
        defense: str,
        noise_kind: str = "none",
        gamma: float = 0.0,
) -> EvalReport:
    """Accuracy under each attack.

    Attack ``i`` draws from stream ``(seed, "eval", i)``. The metadata keeps
    the wall-clock seconds spent next to the seed.
    """
    started = time.perf_counter()
    rows = []
    for index, attack in enumerate(attacks):
        if attack.epsilon == 0 or attack.describe() == "natural":
            value = accuracy(params, ds)
        else:
            value = robust_accuracy(params, ds, attack, derive_rng(seed, "eval", index))

        name = attack.describe()
        rows.append(EvalRow(defense, noise_kind, gamma, attack.epsilon, name, value))

    runtime = time.perf_counter() - started
    logger.info(
        "Evaluated %d attacks on n=%d in %.2fs.", len(rows), ds.n, runtime,
    )
    metadata = {"seed": str(seed), "n": str(ds.n), "runtime_s": format_float(runtime)}

    return EvalReport(rows=tuple(rows), metadata=metadata)


def format_summary(report: EvalReport) -> str:
    """Single table-shaped line: defense, noise, ε, then one accuracy per attack."""
    if not report.rows:
        return "(empty report)"

    first = report.rows[0]
    epsilon = max(row.epsilon for row in report.rows)
    cells = " | ".join(
        f"{row.attack} {format_percent(row.accuracy)}" for row in report.rows
    )
    noise = f"{first.noise_kind} gamma={first.gamma!r}"

    return f"{first.defense} | {noise} | eps={epsilon!r} | {cells}"


# ==================== CSV ====================
def write_report_csv(path: str | Path, report: EvalReport) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as file:
            writer = csv.writer(file, lineterminator="\n")
            writer.writerow(REPORT_CSV_HEADER)
            for row in report.rows:
                writer.writerow([
                    row.defense,
                    row.noise_kind,
                    format_float(row.gamma),
                    format_float(row.epsilon),
                    row.attack,
                    format_float(row.accuracy),
                ])
    except OSError as e:
        raise DataError(f"cannot write report {path}: {e}") from e

    logger.info("Wrote %d report rows to %s.", len(report.rows), path)

    return path


def read_report_csv(path: str | Path) -> EvalReport:
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as file:
            reader = csv.DictReader(file)
            if tuple(reader.fieldnames or ()) != REPORT_CSV_HEADER:
                raise DataError(f"{path}: unexpected report header {reader.fieldnames}")

            rows = tuple(
                EvalRow(
                    defense=row["defense"],
                    noise_kind=row["noise_kind"],
                    gamma=float(row["gamma"]),
                    epsilon=float(row["epsilon"]),
                    attack=row["attack"],
                    accuracy=float(row["accuracy"]),
                )
                for row in reader
            )
    except OSError as e:
        raise DataError(f"cannot read report {path}: {e}") from e
    except (KeyError, ValueError) as e:
        raise DataError(f"{path}: malformed report row: {e}") from e

    return EvalReport(rows=rows)


# ==================== MULTI-SEED ====================
@dataclass(frozen=True)
class SeedSummary:
    defense: str
    noise_kind: str
    gamma: float
    epsilon: float
    attack: str
    mean: float
    std: float
    count: int


def summarize_over_seeds(reports: Iterable[EvalReport]) -> list[SeedSummary]:
    """Mean and sample standard deviation of every cell, in first-seen order."""
    cells: dict[tuple[str, str, float, float, str], list[float]] = {}
    for report in reports:
        for row in report.rows:
            cells.setdefault(row.cell, []).append(row.accuracy)

    summaries = []
    for (defense, noise_kind, gamma, epsilon, attack), values in cells.items():
        std = float(np.std(values, ddof=1)) if len(values) > 1 else 0.0
        summaries.append(
            SeedSummary(
                defense=defense,
                noise_kind=noise_kind,
                gamma=gamma,
                epsilon=epsilon,
                attack=attack,
                mean=math.fsum(values) / len(values),
                std=std,
                count=len(values),
            ),
        )

    return summaries
