import numpy as np
import pytest

from orat.attacks import (
    AttackConfig,
    feasibility_violation,
    fgsm,
    input_gradient,
    perturb,
    pgd,
    project_linf,
)
from orat.autograd import Tensor, cross_entropy
from orat.core import AttackKind, ConfigError, TrainMode
from orat.data import BLOBS_BALANCED, gen_gaussian_2d
from orat.models import MLP, MLPParams, mlp_init
from orat.training import ORATConfig, train
from orat.utils import make_rng

MODEL = MLP()


def _line_model() -> MLPParams:
    """1-D two-class logits (x, −x); the loss of label 1 grows with x."""
    return MLPParams.from_arrays([np.array([[1.0, -1.0]]), np.zeros(2)])


# ==================== CONFIG ====================
def test_default_step_is_quarter_radius() -> None:
    cfg = AttackConfig.pgd(0.2, 10)

    assert cfg.step_size == pytest.approx(0.05)
    assert cfg.describe() == "pgd10"


def test_fgsm_and_natural_names() -> None:
    assert AttackConfig.fgsm(0.1).describe() == "fgsm"
    assert AttackConfig.none().describe() == "natural"


@pytest.mark.parametrize(
    "kwargs",
    [
        {"epsilon": -0.1},
        {"steps": 0},
        {"bounds": (1.0, 0.0)},
        {"kind": AttackKind.PGD, "epsilon": 0.1, "alpha": -0.01},
    ],
)
def test_config_validation(kwargs: dict) -> None:
    with pytest.raises(ConfigError):
        AttackConfig(**kwargs)


# ==================== PROJECTION ====================
def test_projection_clamps_to_ball() -> None:
    out = project_linf(Tensor([[0.75]]), Tensor([[0.5]]), 0.1)
    assert out.data[0, 0] == pytest.approx(0.6)


def test_projection_box_dominates() -> None:
    out = project_linf(Tensor([[-0.2]]), Tensor([[0.05]]), 0.1)
    assert out.data[0, 0] == 0.0


def test_projection_is_idempotent() -> None:
    x = Tensor(make_rng(3).uniform(0.0, 1.0, size=(5, 4)))
    x_adv = Tensor(x.data + make_rng(4).uniform(-0.5, 0.5, size=(5, 4)))

    once = project_linf(x_adv, x, 0.1)
    twice = project_linf(once, x, 0.1)

    np.testing.assert_array_equal(once.data, twice.data)
    assert feasibility_violation(once.data, x.data, 0.1) == 0.0


def test_projection_keeps_feasible_points() -> None:
    x = Tensor([[0.4, 0.6]])
    inside = Tensor([[0.45, 0.55]])

    np.testing.assert_array_equal(project_linf(inside, x, 0.1).data, inside.data)


# ==================== ATTACKS ====================
def test_fgsm_with_zero_radius_is_identity(small_params: MLPParams) -> None:
    x = Tensor([[0.3, 0.7], [0.1, 0.2]])
    x_adv = fgsm(MODEL, small_params, x, [0, 1], 0.0)

    np.testing.assert_array_equal(x_adv.data, x.data)


def test_fgsm_follows_gradient_sign() -> None:
    params = _line_model()
    x = Tensor([[0.5], [0.95]])

    grad = input_gradient(MODEL, params, x.data, [1, 1])
    x_adv = fgsm(MODEL, params, x, [1, 1], 0.1)

    assert (grad > 0).all()
    np.testing.assert_allclose(x_adv.data, [[0.6], [1.0]])


def test_fgsm_descends_for_the_other_label() -> None:
    params = _line_model()
    x_adv = fgsm(MODEL, params, Tensor([[0.5], [0.05]]), [0, 0], 0.1)

    np.testing.assert_allclose(x_adv.data, [[0.4], [0.0]])


def test_pgd_with_zero_radius_is_identity(small_params: MLPParams) -> None:
    x = Tensor([[0.3, 0.7]])
    out = pgd(MODEL, small_params, x, [1], AttackConfig.pgd(0.0, 7), make_rng(0))

    np.testing.assert_array_equal(out.data, x.data)


def test_pgd_is_deterministic_and_feasible() -> None:
    params = mlp_init((4, 8, 3), make_rng(2))
    x = Tensor(make_rng(9).uniform(0.0, 1.0, size=(32, 4)))
    y = make_rng(10).integers(0, 3, size=32)
    cfg = AttackConfig.pgd(0.1, 10)

    first = pgd(MODEL, params, x, y, cfg, make_rng(42)).data
    second = pgd(MODEL, params, x, y, cfg, make_rng(42)).data

    np.testing.assert_array_equal(first, second)
    assert feasibility_violation(first, x.data, 0.1) <= 1e-12


def test_pgd_walks_to_the_ball_edge_on_a_line() -> None:
    params = _line_model()
    cfg = AttackConfig.pgd(0.2, 5, random_start=False)
    x_adv = pgd(MODEL, params, Tensor([[0.5]]), [1], cfg, make_rng(0))

    assert x_adv.data[0, 0] == pytest.approx(0.7)


def test_perturb_without_attack_returns_clean_inputs(small_params: MLPParams) -> None:
    x = Tensor([[0.2, 0.4]])
    out = perturb(MODEL, small_params, x, [0], AttackConfig.none(), make_rng(0))

    np.testing.assert_array_equal(out.data, x.data)


def test_perturb_dispatches_fgsm(small_params: MLPParams) -> None:
    x = Tensor([[0.2, 0.4], [0.9, 0.1]])
    config = AttackConfig.fgsm(0.05)
    via_perturb = perturb(MODEL, small_params, x, [0, 1], config, make_rng(0))
    direct = fgsm(MODEL, small_params, x, [0, 1], 0.05)

    np.testing.assert_array_equal(via_perturb.data, direct.data)


# ==================== LOSS ASCENT ====================
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_attacks_do_not_lower_the_mean_loss_of_a_trained_model(seed: int) -> None:
    ds = gen_gaussian_2d(BLOBS_BALANCED, make_rng(seed))
    config = ORATConfig(
        mode=TrainMode.ST,
        eta=0.1,
        epochs=200,
        batch_size=ds.n,
        seed=seed,
        hidden_sizes=(8,),
    )
    params, _, _ = train(config, ds)
    x = Tensor(ds.features)

    def mean_loss(inputs: Tensor) -> float:
        losses = cross_entropy(MODEL.forward(params, inputs), ds.labels)
        return float(losses.data.mean())

    clean = mean_loss(x)
    for attack in (
        AttackConfig.fgsm(0.02),
        AttackConfig.pgd(0.02, 10, random_start=False),
    ):
        x_adv = perturb(MODEL, params, x, ds.labels, attack, make_rng(seed))
        assert mean_loss(x_adv) >= clean - 1e-9
