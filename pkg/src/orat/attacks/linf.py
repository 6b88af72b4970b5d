import logging
from typing import Any

import numpy as np
from numpy.typing import ArrayLike

from orat.autograd import Array, Tape, Tensor, cross_entropy, reduce_sum
from orat.core import AttackError, AttackKind, Classifier, DimensionError
from orat.core.constants import FEASIBILITY_SLACK, INPUT_HIGH, INPUT_LOW
from orat.utils import Rng

from .config import AttackConfig

logger = logging.getLogger(__name__)


# ==================== PROJECTION ====================
def project_linf(
        x_adv: Tensor,
        x_orig: Tensor,
        epsilon: float,
        bounds: tuple[float, float] = (INPUT_LOW, INPUT_HIGH),
) -> Tensor:
    """Clamp into the ε-ball around ``x_orig``, then into the input box. Idempotent."""
    if x_adv.shape != x_orig.shape:
        raise DimensionError(f"project_linf: {x_adv.shape} vs {x_orig.shape}")

    return Tensor(_project(x_adv.data, x_orig.data, epsilon, bounds))


def _project(
        x_adv: Array,
        x_orig: Array,
        epsilon: float,
        bounds: tuple[float, float],
) -> Array:
    in_ball = np.clip(x_adv, x_orig - epsilon, x_orig + epsilon)
    return np.clip(in_ball, bounds[0], bounds[1])


def feasibility_violation(
        x_adv: Array,
        x_orig: Array,
        epsilon: float,
        bounds: tuple[float, float] = (INPUT_LOW, INPUT_HIGH),
) -> float:
    """Largest amount by which ``x_adv`` leaves the ε-ball or the input box.

    0 when every coordinate is feasible.
    """
    if x_adv.size == 0:
        return 0.0

    ball = float(np.max(np.abs(x_adv - x_orig))) - epsilon
    box = max(bounds[0] - float(x_adv.min()), float(x_adv.max()) - bounds[1])

    return max(0.0, ball, box)


def _check_feasible(x_adv: Array, x_orig: Array, cfg: AttackConfig) -> None:
    violation = feasibility_violation(x_adv, x_orig, cfg.epsilon, cfg.bounds)
    if violation > FEASIBILITY_SLACK:
        raise AttackError(f"adversarial batch left the feasible set by {violation:.3e}")


# ==================== GRADIENTS ====================
def input_gradient(
        model: Classifier,
        params: Any,
        x: Array,
        y: ArrayLike,
        *,
        step: int | None = None,
) -> Array:
    """Gradient of the summed per-sample cross-entropy with respect to the inputs.

    Samples do not interact in the forward pass, so row i of the result is the
    gradient of sample i's own loss.
    """
    frozen = model.without_tracking(params)
    with Tape() as tape:
        x_tracked = Tensor(x, requires_grad=True)
        losses = cross_entropy(model.forward(frozen, x_tracked), y)
        tape.backward(reduce_sum(losses))

    grad = x_tracked.grad
    if grad is None or not np.isfinite(grad).all():
        raise AttackError("non-finite input gradient", step=step)

    return grad


def _sign_ascent(
        model: Classifier,
        params: Any,
        x_adv: Array,
        x_orig: Array,
        y: ArrayLike,
        step_size: float,
        cfg: AttackConfig,
        step: int,
) -> Array:
    grad = input_gradient(model, params, x_adv, y, step=step)
    return _project(x_adv + step_size * np.sign(grad), x_orig, cfg.epsilon, cfg.bounds)


# ==================== ATTACKS ====================
def fgsm(
        model: Classifier,
        params: Any,
        x: Tensor,
        y: ArrayLike,
        epsilon: float,
        bounds: tuple[float, float] = (INPUT_LOW, INPUT_HIGH),
) -> Tensor:
    """Single signed-gradient step of size ε, projected; ``sign(0) = 0``."""
    if epsilon == 0:
        return Tensor(x.data)

    cfg = AttackConfig(
        kind=AttackKind.FGSM,
        epsilon=epsilon,
        alpha=epsilon,
        steps=1,
        random_start=False,
        bounds=bounds,
    )

    x_adv = _sign_ascent(model, params, x.data, x.data, y, epsilon, cfg, step=1)
    _check_feasible(x_adv, x.data, cfg)

    return Tensor(x_adv)


def pgd(
        model: Classifier,
        params: Any,
        x: Tensor,
        y: ArrayLike,
        cfg: AttackConfig,
        rng: Rng,
) -> Tensor:
    """Projected signed-gradient ascent on the per-sample loss.

    With ``random_start`` the iterate begins at ``x + u``, u uniform on ``[−ε, ε]``
    per coordinate (projected); every sample then takes ``cfg.steps`` steps of
    size ``cfg.step_size`` against the given parameters.

    Raises:
        AttackError: A gradient turns non-finite; carries the 1-based step index.

    """
    if cfg.epsilon == 0:
        return Tensor(x.data)

    x_orig = x.data
    x_adv = x_orig
    if cfg.random_start:
        noise = rng.uniform(-cfg.epsilon, cfg.epsilon, size=x_orig.shape)
        x_adv = _project(x_orig + noise, x_orig, cfg.epsilon, cfg.bounds)

    for step in range(1, cfg.steps + 1):
        x_adv = _sign_ascent(model, params, x_adv, x_orig, y, cfg.step_size, cfg, step)

    _check_feasible(x_adv, x_orig, cfg)

    logger.debug(
        "PGD finished: %d steps of %r within eps=%r on %d samples.",
        cfg.steps, cfg.step_size, cfg.epsilon, x_orig.shape[0],
    )

    return Tensor(x_adv)


def perturb(
        model: Classifier,
        params: Any,
        x: Tensor,
        y: ArrayLike,
        cfg: AttackConfig,
        rng: Rng,
) -> Tensor:
    """Dispatch on ``cfg.kind``; ``none`` returns the clean inputs."""
    if cfg.kind == AttackKind.FGSM:
        return fgsm(model, params, x, y, cfg.epsilon, cfg.bounds)

    if cfg.kind == AttackKind.PGD:
        return pgd(model, params, x, y, cfg, rng)

    return Tensor(x.data)
