import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path

from orat.core import DataError, EpochRecord, NumericError
from orat.core.constants import HISTORY_CSV_HEADER
from orat.utils import format_float, parse_optional_float

logger = logging.getLogger(__name__)


@dataclass
class TrainHistory:
    """One ``EpochRecord`` per completed epoch, in epoch order."""

    records: list[EpochRecord] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.records)

    def append(self, record: EpochRecord) -> None:
        values = (
            record.objective,
            record.lambda_,
            record.lambda_hat,
            record.train_acc,
            record.lr,
        )
        if not all(math.isfinite(value) for value in values):
            raise NumericError(
                f"epoch {record.epoch}: non-finite history values {values}",
            )

        self.records.append(record)

    @property
    def objectives(self) -> list[float]:
        return [record.objective for record in self.records]

    @property
    def last(self) -> EpochRecord | None:
        return self.records[-1] if self.records else None


# ==================== CSV ====================
def write_history_csv(path: str | Path, history: TrainHistory) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as file:
            writer = csv.writer(file, lineterminator="\n")
            writer.writerow(HISTORY_CSV_HEADER)
            for r in history.records:
                writer.writerow([
                    r.epoch,
                    format_float(r.objective),
                    format_float(r.lambda_),
                    format_float(r.lambda_hat),
                    format_float(r.train_acc),
                    format_float(r.robust_acc),
                    format_float(r.lr),
                ])
    except OSError as e:
        raise DataError(f"cannot write history {path}: {e}") from e

    return path


def read_history_csv(path: str | Path) -> TrainHistory:
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as file:
            reader = csv.DictReader(file)
            if tuple(reader.fieldnames or ()) != HISTORY_CSV_HEADER:
                raise DataError(
                    f"{path}: unexpected history header {reader.fieldnames}",
                )

            history = TrainHistory()
            for row in reader:
                history.append(
                    EpochRecord(
                        epoch=int(row["epoch"]),
                        objective=float(row["objective"]),
                        lambda_=float(row["lambda"]),
                        lambda_hat=float(row["lambda_hat"]),
                        train_acc=float(row["train_acc"]),
                        robust_acc=parse_optional_float(row["robust_acc"]),
                        lr=float(row["lr"]),
                    ),
                )
    except OSError as e:
        raise DataError(f"cannot read history {path}: {e}") from e
    except (KeyError, ValueError) as e:
        raise DataError(f"{path}: malformed history row: {e}") from e

    return history
