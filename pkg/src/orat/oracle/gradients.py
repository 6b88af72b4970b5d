import logging
import math
from collections.abc import Callable
from fractions import Fraction

import numpy as np
from numpy.typing import ArrayLike

from orat.autograd import Array, Tape, Tensor, cross_entropy, reduce_sum
from orat.core import ConfigError
from orat.core.constants import DUAL_FD_TOLERANCE, KINK_MARGIN, THETA_FD_TOLERANCE
from orat.losses import DualVars, RankRange, orat_subgradient_arrays
from orat.models import MLPParams, mlp_forward, mlp_init
from orat.utils import Rng, derive_rng, spawn_seed

from .report import CheckResult, CheckTally

logger = logging.getLogger(__name__)

_MAX_RESAMPLES = 100
_ABSOLUTE_FLOOR = 1e-9


# ==================== FINITE DIFFERENCES ====================
def fd_audit(
        objective: Callable[[Array], float | Fraction],
        gradient: Callable[[Array], Array],
        point: ArrayLike,
        step: float = 1e-5,
) -> float:
    """Largest relative gap between ``gradient`` and central differences of
    ``objective``.

    Each coordinate's error is ``|a − fd| / max(|a|, |fd|)``, or the plain gap
    ``|a − fd|`` when both sides are below 1e-9. An objective returning
    ``Fraction`` is differenced exactly.
    """
    if step <= 0:
        raise ConfigError(f"step must be > 0, got {step}")

    p = np.array(point, dtype=np.float64)
    analytic = np.asarray(gradient(p.copy()), dtype=np.float64).reshape(p.shape)

    worst = 0.0
    for index in np.ndindex(p.shape):
        forward, backward = p.copy(), p.copy()
        forward[index] += step
        backward[index] -= step
        fd = float(objective(forward) - objective(backward)) / (2.0 * step)

        a = float(analytic[index])
        gap, scale = abs(a - fd), max(abs(a), abs(fd))
        error = gap / scale if scale > _ABSOLUTE_FLOOR else gap
        worst = max(worst, error)

    return worst


# ==================== SADDLE SUBGRADIENTS ====================
def _reference_saddle_sum(
        values: list[float],
        k: int,
        m: int,
        lam: float,
        lam_hat: float,
) -> Fraction:
    """Inner saddle sum in exact arithmetic over the float inputs."""
    n = len(values)
    lam_q, lam_hat_q = Fraction(lam), Fraction(lam_hat)
    base = Fraction(k - m, n) * lam_q + Fraction(n - m, n) * lam_hat_q
    zero = Fraction(0)
    return sum(
        (base - max(lam_hat_q - max(Fraction(v) - lam_q, zero), zero) for v in values),
        zero,
    )


def _clear_of_kinks(values: list[float], lam: float, lam_hat: float) -> bool:
    return all(
        abs(v - lam) > KINK_MARGIN and abs(lam_hat - max(v - lam, 0.0)) > KINK_MARGIN
        for v in values
    )


def saddle_point_fd_error(
        values: list[float],
        rank_range: RankRange,
        lam: float,
        lam_hat: float,
        step: float,
) -> float:
    """FD error over the point ``(λ, λ̂, ℓ_1, …, ℓ_n)``."""
    k, m = rank_range.k, rank_range.m

    def objective(p: Array) -> Fraction:
        values = [float(v) for v in p[2:]]
        return _reference_saddle_sum(values, k, m, float(p[0]), float(p[1]))

    def gradient(p: Array) -> Array:
        duals = DualVars(float(p[0]), float(p[1]))
        sub = orat_subgradient_arrays(p[2:], duals, rank_range)
        dual_part = [sub.g_lambda.sum(), sub.g_lambda_hat.sum()]
        return np.concatenate([dual_part, sub.coef_theta])

    return fd_audit(objective, gradient, [lam, lam_hat, *values], step)


def audit_subgradients(
        n_points: int,
        n_max: int,
        rng: Rng,
        *,
        tolerance: float = DUAL_FD_TOLERANCE,
        step: float = 1e-5,
) -> CheckResult:
    """Check the closed-form subgradients in (λ, λ̂, ℓ) at random points.

    Points closer than ``KINK_MARGIN`` to a kink are resampled.
    """
    tally = CheckTally("saddle_subgradients", tolerance)
    base = spawn_seed(rng)
    for point in range(n_points):
        point_rng = derive_rng(base, point)
        n = int(point_rng.integers(1, n_max + 1))
        k = int(point_rng.integers(1, n + 1))
        m = int(point_rng.integers(0, k))

        for _ in range(_MAX_RESAMPLES):
            values = [float(v) for v in point_rng.uniform(0.0, 2.0, size=n)]
            lam = float(point_rng.uniform(-0.5, 2.0))
            lam_hat = float(point_rng.uniform(-0.5, 2.5))
            if _clear_of_kinks(values, lam, lam_hat):
                break
        else:
            continue

        error = saddle_point_fd_error(values, RankRange(k, m, n), lam, lam_hat, step)
        instance = f"k={k} m={m} lambda={lam!r} lambda_hat={lam_hat!r} values={values}"
        tally.record(error, instance)

    return tally.result()


# ==================== NETWORK GRADIENTS ====================
def _reference_loss(arrays: list[Array], x: Array, y: Array) -> float:
    """Summed cross-entropy through a plain numpy forward pass."""
    hidden = x
    for index in range(0, len(arrays), 2):
        hidden = hidden @ arrays[index] + arrays[index + 1]
        if index + 2 < len(arrays):
            hidden = np.maximum(hidden, 0.0)

    shift = hidden.max(axis=1, keepdims=True)
    log_norm = np.log(np.exp(hidden - shift).sum(axis=1)) + shift[:, 0]

    return float(np.sum(log_norm - hidden[np.arange(y.size), y]))


def _min_preactivation(arrays: list[Array], x: Array) -> float:
    hidden, smallest = x, math.inf
    for index in range(0, len(arrays) - 2, 2):
        pre = hidden @ arrays[index] + arrays[index + 1]
        smallest = min(smallest, float(np.abs(pre).min()))
        hidden = np.maximum(pre, 0.0)

    return smallest


def _autograd_grads(params: MLPParams, x: Array, y: Array) -> tuple[list[Array], Array]:
    with Tape() as tape:
        x_tracked = Tensor(x, requires_grad=True)
        tape.backward(reduce_sum(cross_entropy(mlp_forward(params, x_tracked), y)))

    grads = [
        np.zeros_like(t.data) if t.grad is None else t.grad for t in params.tensors()
    ]
    x_grad = np.zeros_like(x) if x_tracked.grad is None else x_tracked.grad

    return grads, x_grad


def _audit_network(params: MLPParams, x: Array, y: Array, step: float) -> float:
    """Worst FD error over every parameter coordinate and every input coordinate."""
    arrays = [t.numpy() for t in params.tensors()]
    grads, x_grad = _autograd_grads(params, x, y)

    worst = fd_audit(
        lambda p: _reference_loss(arrays, p, y),
        lambda _: x_grad,
        x,
        step,
    )

    for index, grad in enumerate(grads):
        def objective(p: Array, index: int = index) -> float:
            swapped = list(arrays)
            swapped[index] = p
            return _reference_loss(swapped, x, y)

        error = fd_audit(objective, lambda _, grad=grad: grad, arrays[index], step)
        worst = max(worst, error)

    return worst


def audit_mlp_gradients(
        n_trials: int,
        rng: Rng,
        *,
        tolerance: float = THETA_FD_TOLERANCE,
        step: float = 1e-5,
) -> CheckResult:
    """Backward gradients of random MLPs (up to 3 layers) against central differences.

    Inputs are resampled until every hidden pre-activation clears ``KINK_MARGIN``.
    """
    tally = CheckTally("mlp_gradients", tolerance)
    base = spawn_seed(rng)
    for trial in range(n_trials):
        trial_rng = derive_rng(base, trial)
        depth = int(trial_rng.integers(1, 4))
        sizes = [int(s) for s in trial_rng.integers(2, 9, size=depth + 1)]
        params = mlp_init(sizes, trial_rng)
        arrays = [t.numpy() for t in params.tensors()]
        y = trial_rng.integers(0, sizes[-1], size=3)

        for _ in range(_MAX_RESAMPLES):
            x = trial_rng.uniform(0.0, 1.0, size=(3, sizes[0]))
            if _min_preactivation(arrays, x) > KINK_MARGIN:
                break
        else:
            continue

        worst = _audit_network(params, x, y, step)
        tally.record(worst, f"sizes={sizes} seed_trial={trial}")

    return tally.result()
