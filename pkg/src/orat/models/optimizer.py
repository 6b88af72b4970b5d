from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from orat.autograd import Array
from orat.core import DimensionError, TrainingError

from .mlp import MLPParams


@dataclass(frozen=True)
class OptimizerState:
    """Momentum buffers (one per parameter tensor) and SGD hyperparameters."""

    velocity: tuple[Array, ...]
    lr: float
    momentum: float
    weight_decay: float

    @classmethod
    def zeros_like(
            cls,
            params: MLPParams,
            *,
            lr: float,
            momentum: float,
            weight_decay: float,
    ) -> "OptimizerState":
        return cls(
            velocity=tuple(np.zeros_like(t.data) for t in params.tensors()),
            lr=lr,
            momentum=momentum,
            weight_decay=weight_decay,
        )


def sgd_step(
        params: MLPParams,
        grads: Sequence[Array],
        state: OptimizerState,
        *,
        lr: float | None = None,
        step: int | None = None,
) -> tuple[MLPParams, OptimizerState]:
    """Apply one SGD-with-momentum update.

    ``v ← μ·v + (g + wd·p)`` then ``p ← p − η·v``; decay enters as an additive
    gradient term. Each tensor is updated independently of the others.

    Args:
        params: Current parameters θ.
        grads: One gradient array per tensor, in ``params.tensors()`` order.
        state: Velocity buffers and hyperparameters.
        lr: Learning rate for this step (e.g. after a schedule); defaults to
            ``state.lr``.
        step: Global step index, used only in error messages.

    Returns:
        New parameters and new optimizer state; the inputs are left untouched.

    Raises:
        DimensionError: A gradient or velocity shape does not match its parameter.
        TrainingError: A gradient contains NaN or Inf.

    """
    tensors = params.tensors()
    if len(grads) != len(tensors) or len(state.velocity) != len(tensors):
        raise DimensionError(
            f"sgd_step: {len(tensors)} parameters, {len(grads)} gradients, "
            f"{len(state.velocity)} velocity buffers",
        )

    eta = state.lr if lr is None else lr
    new_arrays: list[Array] = []
    new_velocity: list[Array] = []
    triples = zip(tensors, grads, state.velocity, strict=True)
    for index, (tensor, grad, velocity) in enumerate(triples):
        if grad.shape != tensor.shape or velocity.shape != tensor.shape:
            raise DimensionError(
                f"sgd_step: tensor {index} has shape {tensor.shape}, "
                f"gradient {grad.shape}, velocity {velocity.shape}",
            )

        if not np.isfinite(grad).all():
            raise TrainingError(
                f"non-finite gradient for parameter tensor {index}", step=step,
            )

        decayed = grad + state.weight_decay * tensor.data
        updated_velocity = state.momentum * velocity + decayed
        new_velocity.append(updated_velocity)
        new_arrays.append(tensor.data - eta * updated_velocity)

    new_state = OptimizerState(
        velocity=tuple(new_velocity),
        lr=state.lr,
        momentum=state.momentum,
        weight_decay=state.weight_decay,
    )

    return MLPParams.from_arrays(new_arrays), new_state
