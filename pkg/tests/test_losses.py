import math

import numpy as np
import pytest

from orat.core import ConfigError, DimensionError, NumericError
from orat.losses import (
    MARGIN_LOSSES,
    DualVars,
    LossVector,
    PhiParams,
    RankRange,
    aorr,
    bce_margin_loss,
    bottom_sum_variational,
    hinge_margin_loss,
    logistic_margin_loss,
    orat_batch_objective,
    orat_inner_objective,
    orat_saddle_value,
    orat_subgradient_arrays,
    orat_subgradients,
    phi_orat,
    risk_difference_form,
    topk_sum_sorted,
    topk_sum_variational,
)

LOSSES = LossVector.of([0.9, 0.1, 0.5, 0.3])


# ==================== RANKING ====================
def test_topk_sum_sorted() -> None:
    assert topk_sum_sorted(LOSSES, 2) == pytest.approx(1.4)


def test_topk_sum_with_k_equal_n_is_plain_sum() -> None:
    assert topk_sum_sorted(LOSSES, 4) == pytest.approx(1.8)


def test_topk_sum_of_constant_vector() -> None:
    assert topk_sum_sorted(LossVector.of([0.7] * 5), 3) == pytest.approx(2.1)


@pytest.mark.parametrize("k", [0, 5])
def test_topk_sum_rejects_k_out_of_range(k: int) -> None:
    with pytest.raises(ConfigError):
        topk_sum_sorted(LOSSES, k)


def test_topk_variational_minimizer_is_kth_largest() -> None:
    value, lam = topk_sum_variational(LOSSES, 2)

    assert value == pytest.approx(1.4)
    assert lam == 0.5


def test_topk_variational_with_k_equal_n() -> None:
    value, lam = topk_sum_variational(LOSSES, 4)

    assert value == pytest.approx(1.8)
    assert 4 * lam + sum(max(v - lam, 0.0) for v in LOSSES.values) == pytest.approx(1.8)


def test_bottom_variational() -> None:
    value, lam_hat = bottom_sum_variational(LOSSES, 1)

    assert value == pytest.approx(0.9)
    assert lam_hat == 0.9


def test_bottom_variational_with_m_zero_is_full_sum() -> None:
    value, _ = bottom_sum_variational(LOSSES, 0)
    assert value == pytest.approx(1.8)


def test_aorr() -> None:
    assert aorr(LOSSES, RankRange(3, 1, 4)) == pytest.approx(0.4)


def test_aorr_full_range_is_mean() -> None:
    assert aorr(LOSSES, RankRange(4, 0, 4)) == pytest.approx(0.45)


@pytest.mark.parametrize(("k", "m"), [(1, 0), (3, 2), (5, 0), (5, 4)])
def test_aorr_of_constant_vector(k: int, m: int) -> None:
    assert aorr(LossVector.of([0.25] * 5), RankRange(k, m, 5)) == pytest.approx(0.25)


@pytest.mark.parametrize(("k", "m", "n"), [(2, 2, 4), (5, 0, 4), (0, 0, 1), (3, -1, 4)])
def test_rank_range_validation(k: int, m: int, n: int) -> None:
    with pytest.raises(ConfigError):
        RankRange(k, m, n)


def test_aorr_rejects_range_for_other_size() -> None:
    with pytest.raises(DimensionError):
        aorr(LOSSES, RankRange(2, 0, 5))


@pytest.mark.parametrize("values", [[], [[0.1], [0.2]]])
def test_loss_vector_rejects_bad_shapes(values: list) -> None:
    with pytest.raises(DimensionError):
        LossVector.of(values)


@pytest.mark.parametrize("values", [[0.1, -0.2], [0.1, math.nan]])
def test_loss_vector_rejects_bad_values(values: list[float]) -> None:
    with pytest.raises(ConfigError):
        LossVector.of(values)


# ==================== SADDLE OBJECTIVE ====================
def test_inner_objective_at_given_duals() -> None:
    value = orat_inner_objective(LOSSES, RankRange(3, 1, 4), DualVars(0.3, 0.6))
    assert value == pytest.approx(0.8)


def test_inner_objective_with_both_hinges_vanishing() -> None:
    rank_range = RankRange(3, 1, 4)
    value = orat_inner_objective(LOSSES, rank_range, DualVars(1.5, 0.0))

    assert value == pytest.approx(2 * 1.5)


def test_inner_objective_with_hinge_arms_resolved() -> None:
    value = orat_inner_objective(LOSSES, RankRange(3, 1, 4), DualVars(0.0, 2.0))
    assert value == pytest.approx(1.8 - 1 * 2.0)


def test_batch_objective_is_per_sample_mean() -> None:
    rank_range = RankRange(3, 1, 4)
    duals = DualVars(0.3, 0.6)

    objective = orat_batch_objective(LOSSES.values, rank_range, duals)

    assert objective == pytest.approx(0.8 / 4)


def test_saddle_value() -> None:
    rank_range = RankRange(3, 1, 4)
    value, duals = orat_saddle_value(LOSSES, rank_range)

    assert value == pytest.approx(0.8)
    assert orat_inner_objective(LOSSES, rank_range, duals) == pytest.approx(0.8)
    at_reference_duals = orat_inner_objective(LOSSES, rank_range, DualVars(0.3, 0.6))
    assert at_reference_duals == pytest.approx(value)


def test_saddle_value_reduces_to_sum() -> None:
    value, _ = orat_saddle_value(LOSSES, RankRange(4, 0, 4))
    assert value == pytest.approx(1.8)


def test_risk_difference_form() -> None:
    assert risk_difference_form(LOSSES, RankRange(3, 1, 4)) == pytest.approx(0.4)


def test_risk_difference_form_without_top_removal() -> None:
    expected = topk_sum_sorted(LOSSES, 3) / 3
    assert risk_difference_form(LOSSES, RankRange(3, 0, 4)) == pytest.approx(expected)


def test_dual_vars_must_be_finite() -> None:
    with pytest.raises(NumericError):
        DualVars(math.inf, 0.0)


# ==================== SUBGRADIENTS ====================
def test_subgradients_interior_sample() -> None:
    grads = orat_subgradients(0.5, DualVars(0.3, 0.6), RankRange(3, 1, 4))

    assert grads == pytest.approx((1.0, -0.5, -0.25))


def test_subgradients_below_lambda() -> None:
    duals, rank_range = DualVars(0.3, 0.6), RankRange(3, 1, 4)
    coef, g_lambda, g_lambda_hat = orat_subgradients(0.1, duals, rank_range)

    assert coef == 0.0
    assert g_lambda == pytest.approx(2 / 4)
    assert g_lambda_hat == pytest.approx(3 / 4 - 1)


def test_subgradients_with_saturated_outer_hinge() -> None:
    duals, rank_range = DualVars(0.3, 0.6), RankRange(3, 1, 4)
    coef, _, g_lambda_hat = orat_subgradients(0.9, duals, rank_range)

    assert coef == 0.0
    assert g_lambda_hat == pytest.approx(3 / 4)


def test_subgradient_arrays_match_scalar_form() -> None:
    rank_range = RankRange(3, 1, 4)
    duals = DualVars(0.3, 0.6)
    arrays = orat_subgradient_arrays(LOSSES.values, duals, rank_range)

    for index, loss in enumerate(LOSSES.values):
        expected = orat_subgradients(float(loss), duals, rank_range)
        actual = (
            arrays.coef_theta[index],
            arrays.g_lambda[index],
            arrays.g_lambda_hat[index],
        )
        assert actual == pytest.approx(expected)


def test_subgradients_reject_negative_loss() -> None:
    with pytest.raises(ConfigError):
        orat_subgradients(-0.1, DualVars(0.3, 0.6), RankRange(3, 1, 4))


# ==================== SURROGATE ====================
def test_margin_losses() -> None:
    assert hinge_margin_loss(0.25) == 0.75
    assert hinge_margin_loss(3.0) == 0.0
    assert logistic_margin_loss(0.0) == pytest.approx(math.log(2.0))
    assert logistic_margin_loss(-1000.0) == pytest.approx(1000.0)
    assert bce_margin_loss(-1000.0) == pytest.approx(1000.0)
    assert set(MARGIN_LOSSES) == {"hinge", "logistic", "bce"}


def test_phi_saturates_at_lambda_hat() -> None:
    assert phi_orat(-0.2, PhiParams(0.3, 0.6, hinge_margin_loss)) == pytest.approx(0.6)


def test_phi_in_linear_regime() -> None:
    assert phi_orat(0.5, PhiParams(0.3, 0.6, hinge_margin_loss)) == pytest.approx(0.2)


def test_phi_is_zero_below_lambda() -> None:
    params = PhiParams(0.3, 0.6, hinge_margin_loss)

    assert phi_orat(0.8, params) == 0.0
    assert phi_orat(50.0, params) == 0.0


def test_phi_tail_for_very_negative_margins() -> None:
    assert phi_orat(-1e6, PhiParams(0.3, 0.6, logistic_margin_loss)) == 0.6


def test_phi_equals_clamp_bit_for_bit() -> None:
    params = PhiParams(0.1, 0.7, logistic_margin_loss)
    for t in np.linspace(-3.0, 3.0, 61):
        clamp = min(max(logistic_margin_loss(float(t)) - 0.1, 0.0), 0.7)
        assert phi_orat(float(t), params) == clamp


def test_phi_params_validation() -> None:
    with pytest.raises(ConfigError):
        PhiParams(0.6, 0.3, hinge_margin_loss)
