import logging
import time
from dataclasses import dataclass

from orat.core import EpochRecord, StepCompletedEvent
from orat.training import ORATConfig, ORATTrainer
from orat.utils import format_duration

logger = logging.getLogger(__name__)


class ProgressLogger:
    """Turns trainer events into log lines.

    One line per step at DEBUG, one per epoch at INFO.
    """

    def __init__(self, epochs: int):
        self._epochs = epochs
        self._started = time.perf_counter()
        self._epoch_started = self._started

    def on_step(self, event: StepCompletedEvent) -> None:
        logger.debug(
            "epoch %d batch %d (step %d): objective=%.6f lambda=%.6f lambda_hat=%.6f",
            event.epoch, event.batch, event.step,
            event.objective, event.lambda_, event.lambda_hat,
        )

    def on_epoch(self, record: EpochRecord) -> None:
        now = time.perf_counter()
        robust = ""
        if record.robust_acc is not None:
            robust = f" robust_acc={record.robust_acc:.4f}"
        logger.info(
            "Epoch %d/%d [%s]: objective=%.6f lambda=%.4f lambda_hat=%.4f "
            "train_acc=%.4f%s lr=%g",
            record.epoch, self._epochs, format_duration(now - self._epoch_started),
            record.objective, record.lambda_, record.lambda_hat,
            record.train_acc, robust, record.lr,
        )
        self._epoch_started = now

    def elapsed(self) -> float:
        return time.perf_counter() - self._started


@dataclass
class TrainingContext:
    """Holds a trainer and the subscribers wired to it."""

    trainer: ORATTrainer
    progress: ProgressLogger


def build_training_context(config: ORATConfig) -> TrainingContext:
    """Construct the trainer and wire its signals to a progress logger."""
    trainer = ORATTrainer(config)
    progress = ProgressLogger(config.epochs)

    # -- Wiring --
    trainer.step_completed.connect(progress.on_step)
    trainer.epoch_completed.connect(progress.on_epoch)

    return TrainingContext(trainer=trainer, progress=progress)
