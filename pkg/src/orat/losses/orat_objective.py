"""Saddle-point form of the ranked-range adversarial objective.

With auxiliary scalars λ (tracks the k-th largest loss) and λ̂ (tracks the gap
up to the m-th largest), the average of the ranked range equals, up to the
factor ``1/(k−m)``,

    min_λ max_λ̂  Σ_i [ (k−m)/n·λ + (n−m)/n·λ̂ − [λ̂ − [ℓ_i − λ]_+]_+ ]

which removes the sort from the training objective.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike

from orat.core import ConfigError, NumericError

from .ranking import (
    LossVector,
    RankRange,
    Values,
    check_range,
    pick_optimum,
    scan_topk_objective,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DualVars:
    """The auxiliary scalars (λ, λ̂); unconstrained during optimization."""

    lambda_: float
    lambda_hat: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lambda_) and math.isfinite(self.lambda_hat)):
            raise NumericError(
                "dual variables must be finite, "
                f"got ({self.lambda_}, {self.lambda_hat})",
            )


@dataclass(frozen=True)
class SubgradientArrays:
    """Per-sample subgradients: θ-coefficient, ∂/∂λ and ∂/∂λ̂."""

    coef_theta: Values
    g_lambda: Values
    g_lambda_hat: Values


# ==================== OBJECTIVE ====================
def orat_inner_objective(
        losses: LossVector,
        rank_range: RankRange,
        duals: DualVars,
) -> float:
    """Sum of the per-sample saddle terms, without the ``1/(k−m)`` factor."""
    check_range(rank_range, losses.n)
    return float(_per_sample_terms(losses.values, rank_range, duals).sum())


def orat_batch_objective(
        losses: ArrayLike,
        rank_range: RankRange,
        duals: DualVars,
) -> float:
    """Mean of the per-sample saddle term over a mini-batch of any size."""
    values = np.asarray(losses, dtype=np.float64)
    return float(_per_sample_terms(values, rank_range, duals).mean())


def _per_sample_terms(values: Values, rank_range: RankRange, duals: DualVars) -> Values:
    k, m, n = rank_range.k, rank_range.m, rank_range.n
    inner = np.maximum(values - duals.lambda_, 0.0)
    outer = np.maximum(duals.lambda_hat - inner, 0.0)

    return (k - m) / n * duals.lambda_ + (n - m) / n * duals.lambda_hat - outer


def orat_saddle_value(
        losses: LossVector,
        rank_range: RankRange,
) -> tuple[float, DualVars]:
    """Solve ``min_λ max_λ̂`` of the inner objective by exhaustive candidate scan.

    λ ranges over the losses and 0; for a fixed λ, λ̂ ranges over
    ``{[ℓ_i − λ]_+} ∪ {0}``.
    Ties resolve to the largest candidate on both levels.

    Returns:
        The saddle value (equal to ``(k−m)·aorr``) and the optimal duals.

    """
    check_range(rank_range, losses.n)

    values = losses.values
    k, m, n = rank_range.k, rank_range.m, rank_range.n
    lambda_candidates = np.unique(np.append(values, 0.0))

    inner_values = np.empty(lambda_candidates.size)
    inner_argmax = np.empty(lambda_candidates.size)
    for index, lam in enumerate(lambda_candidates):
        gaps = np.maximum(values - lam, 0.0)
        hat_candidates = np.unique(np.append(gaps, 0.0))
        outer = np.maximum(hat_candidates[:, None] - gaps[None, :], 0.0).sum(axis=1)
        objective = (k - m) * lam + (n - m) * hat_candidates - outer
        inner_values[index], inner_argmax[index] = pick_optimum(
            hat_candidates, objective, maximize=True,
        )

    value, lambda_star = pick_optimum(lambda_candidates, inner_values, maximize=False)
    lambda_hat_star = float(inner_argmax[lambda_candidates == lambda_star][0])

    if not lambda_hat_star > lambda_star:
        logger.debug(
            "Saddle optimum has lambda_hat*=%r <= lambda*=%r for n=%d, k=%d, m=%d.",
            lambda_hat_star, lambda_star, n, k, m,
        )

    return value, DualVars(lambda_star, lambda_hat_star)


def risk_difference_form(losses: LossVector, rank_range: RankRange) -> float:
    """AoRR as a difference of two top-sum minimizations.

    ``(min_λ{kλ + Σ[ℓ_i−λ]_+} − min_λ̂{mλ̂ + Σ[ℓ_i−λ̂]_+}) / (k−m)``
    """
    check_range(rank_range, losses.n)
    top_k, _ = scan_topk_objective(losses.values, rank_range.k)
    top_m, _ = scan_topk_objective(losses.values, rank_range.m)

    return (top_k - top_m) / rank_range.width


# ==================== SUBGRADIENTS ====================
def orat_subgradient_arrays(
        losses: ArrayLike,
        duals: DualVars,
        rank_range: RankRange,
) -> SubgradientArrays:
    """Vectorized subgradients of the per-sample saddle term.

    Indicators use strict inequalities, so a hinge exactly at its kink
    contributes 0.
    """
    values = np.asarray(losses, dtype=np.float64)
    k, m, n = rank_range.k, rank_range.m, rank_range.n

    gaps = np.maximum(values - duals.lambda_, 0.0)
    below_cap = (duals.lambda_hat > gaps).astype(np.float64)
    above_floor = (values > duals.lambda_).astype(np.float64)
    coef_theta = below_cap * above_floor

    return SubgradientArrays(
        coef_theta=coef_theta,
        g_lambda=(k - m) / n - coef_theta,
        g_lambda_hat=(n - m) / n - below_cap,
    )


def orat_subgradients(
        loss_i: float,
        duals: DualVars,
        rank_range: RankRange,
) -> tuple[float, float, float]:
    """``(coef_theta, g_lambda, g_lambda_hat)`` for a single sample loss."""
    if not (math.isfinite(loss_i) and loss_i >= 0):
        raise ConfigError(f"sample loss must be finite and non-negative, got {loss_i}")

    grads = orat_subgradient_arrays([loss_i], duals, rank_range)

    return (
        float(grads.coef_theta[0]),
        float(grads.g_lambda[0]),
        float(grads.g_lambda_hat[0]),
    )
