from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray


@dataclass(frozen=True)
class StepCompletedEvent:
    """Emitted by the trainer after every mini-batch update.

    ``parameters`` is a read-only snapshot of every θ tensor after the update,
    in layer order (weight, bias, weight, bias, ...).
    """

    epoch: int
    batch: int
    step: int
    objective: float
    lambda_: float
    lambda_hat: float
    parameters: tuple[NDArray[np.float64], ...]


@dataclass(frozen=True)
class EpochRecord:
    """One row of the training history, emitted when an epoch completes."""

    epoch: int
    objective: float
    lambda_: float
    lambda_hat: float
    train_acc: float
    robust_acc: float | None
    lr: float
