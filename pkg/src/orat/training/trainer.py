import logging
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from orat.attacks import perturb
from orat.autograd import Array, Tape, Tensor, cross_entropy, weighted_sum
from orat.core import (
    AttackKind,
    EpochRecord,
    NumericError,
    Signal,
    StepCompletedEvent,
    TrainingError,
    TrainMode,
)
from orat.data import Dataset, minibatches
from orat.evaluation.metrics import accuracy, robust_accuracy
from orat.losses import (
    DualVars,
    RankRange,
    orat_batch_objective,
    orat_subgradient_arrays,
)
from orat.models import MLP, MLPParams, OptimizerState, mlp_init, sgd_step
from orat.utils import Rng, derive_rng, spawn_seed

from .config import ORATConfig
from .history import TrainHistory

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainResult:
    params: MLPParams
    duals: DualVars
    history: TrainHistory
    config: ORATConfig  # resolved against the training set


@dataclass(frozen=True)
class _BatchUpdate:
    params: MLPParams
    state: OptimizerState
    duals: DualVars
    objective: float


class ORATTrainer:
    """Mini-batch SGD over (θ, λ, λ̂) with an adversarial inner loop.

    Per batch: attack the inputs against the current θ, take per-sample
    cross-entropy losses, weight each sample's θ-gradient by its ranked-range
    indicator, step θ with momentum, then move λ down and λ̂ up along their
    batch subgradients. ``at`` and ``st`` modes weight every sample by 1 and
    keep the duals fixed.
    """

    def __init__(self, config: ORATConfig):
        self.step_completed = Signal()
        self.epoch_completed = Signal()

        self._config = config
        self._model = MLP()

    # -- Public methods --
    @property
    def config(self) -> ORATConfig:
        return self._config

    def train(self, ds: Dataset, rng: Rng | None = None) -> TrainResult:
        """Train on ``ds``; the run is a pure function of (config, dataset, seed).

        Args:
            ds: Training set.
            rng: Root stream; when omitted, ``config.seed`` is the root seed.

        Raises:
            ConfigError: The config is invalid against ``ds``.
            TrainingError: A loss or gradient turns non-finite; names epoch and batch.

        """
        config = self._config.resolve(ds.n)
        rank_range = config.rank_range(ds.n)
        root = config.seed if rng is None else spawn_seed(rng)

        layer_sizes = (ds.dim, *config.hidden_sizes, ds.num_classes)
        params = mlp_init(layer_sizes, derive_rng(root, "init"))
        state = OptimizerState.zeros_like(
            params,
            lr=config.eta,
            momentum=config.momentum,
            weight_decay=config.weight_decay,
        )
        duals = DualVars(config.lambda_init, config.lambda_hat_init)
        attack_rng = derive_rng(root, "attack")
        history = TrainHistory()

        logger.info(
            "Training mode=%s on n=%d (k=%d, m=%d) with %s eps=%r for %d epochs.",
            config.mode.value, ds.n, rank_range.k, rank_range.m,
            config.attack.describe(), config.attack.epsilon, config.epochs,
        )

        step = 0
        for epoch in range(1, config.epochs + 1):
            lr = config.learning_rate(epoch)
            objective_total = 0.0

            batch_rng = derive_rng(root, "batches", epoch)
            batches = minibatches(ds, config.batch_size, batch_rng)
            for batch, indices in enumerate(batches, start=1):
                step += 1
                try:
                    update = self._step(
                        config, rank_range, ds, indices,
                        params, state, duals, lr, attack_rng,
                    )
                except NumericError as e:
                    raise TrainingError(
                        f"training aborted: {e}", epoch=epoch, batch=batch, step=step,
                    ) from e

                params, state, duals = update.params, update.state, update.duals
                objective_total += update.objective * indices.size

                if self.step_completed.handler_count:
                    self.step_completed.emit(
                        StepCompletedEvent(
                            epoch=epoch,
                            batch=batch,
                            step=step,
                            objective=update.objective,
                            lambda_=duals.lambda_,
                            lambda_hat=duals.lambda_hat,
                            parameters=params.arrays(),
                        ),
                    )

            record = self._epoch_record(
                config, ds, params, duals, epoch, objective_total / ds.n, lr, root,
            )
            try:
                history.append(record)
            except NumericError as e:
                raise TrainingError(str(e), epoch=epoch) from e

            logger.debug(
                "Epoch %d/%d: objective=%.6f lambda=%.4f lambda_hat=%.4f "
                "train_acc=%.4f lr=%g",
                epoch, config.epochs, record.objective, record.lambda_,
                record.lambda_hat, record.train_acc, record.lr,
            )
            self.epoch_completed.emit(record)

        return TrainResult(params=params, duals=duals, history=history, config=config)

    # -- Private methods --
    def _step(
            self,
            config: ORATConfig,
            rank_range: RankRange,
            ds: Dataset,
            indices: NDArray[np.int64],
            params: MLPParams,
            state: OptimizerState,
            duals: DualVars,
            lr: float,
            attack_rng: Rng,
    ) -> _BatchUpdate:
        labels = ds.labels[indices]
        x = Tensor(ds.features[indices])
        x_adv = perturb(self._model, params, x, labels, config.attack, attack_rng)
        size = indices.size
        uses_duals = config.mode == TrainMode.ORAT

        with Tape() as tape:
            losses = cross_entropy(self._model.forward(params, x_adv), labels)
            loss_values = losses.numpy()
            if not np.isfinite(loss_values).all():
                raise NumericError("non-finite per-sample loss")

            subgradients = None
            if uses_duals:
                subgradients = orat_subgradient_arrays(loss_values, duals, rank_range)
            coef = np.ones(size) if subgradients is None else subgradients.coef_theta
            tape.backward(weighted_sum(losses, coef / size))

        grads = [_grad_or_zero(t) for t in params.tensors()]
        if uses_duals:
            objective = orat_batch_objective(loss_values, rank_range, duals)
        else:
            objective = float(loss_values.mean())

        new_params, new_state = sgd_step(params, grads, state, lr=lr)

        new_duals = duals
        if subgradients is not None and not config.freeze_duals:
            new_duals = _dual_step(
                duals,
                subgradients.g_lambda,
                subgradients.g_lambda_hat,
                lr / size,
                config,
            )

        return _BatchUpdate(new_params, new_state, new_duals, objective)

    def _epoch_record(
            self,
            config: ORATConfig,
            ds: Dataset,
            params: MLPParams,
            duals: DualVars,
            epoch: int,
            objective: float,
            lr: float,
            root: int,
    ) -> EpochRecord:
        robust = None
        if config.track_robust_acc and config.attack.kind != AttackKind.NONE:
            robust_rng = derive_rng(root, "robust-acc", epoch)
            robust = robust_accuracy(params, ds, config.attack, robust_rng)

        return EpochRecord(
            epoch=epoch,
            objective=objective,
            lambda_=duals.lambda_,
            lambda_hat=duals.lambda_hat,
            train_acc=accuracy(params, ds),
            robust_acc=robust,
            lr=lr,
        )


def _grad_or_zero(tensor: Tensor) -> Array:
    return np.zeros_like(tensor.data) if tensor.grad is None else tensor.grad


def _dual_step(
        duals: DualVars,
        g_lambda: Array,
        g_lambda_hat: Array,
        step_size: float,
        config: ORATConfig,
) -> DualVars:
    """λ descends and λ̂ ascends along their summed batch subgradients."""
    lambda_ = duals.lambda_ - step_size * float(np.sum(g_lambda))
    lambda_hat = duals.lambda_hat + step_size * float(np.sum(g_lambda_hat))

    if config.dual_clamp is not None:
        lambda_ = min(max(lambda_, 0.0), config.dual_clamp)
        lambda_hat = min(max(lambda_hat, 0.0), config.dual_clamp)

    return DualVars(lambda_, lambda_hat)


def train(
        config: ORATConfig,
        ds: Dataset,
        rng: Rng | None = None,
) -> tuple[MLPParams, DualVars, TrainHistory]:
    """Functional front end to ``ORATTrainer``."""
    result = ORATTrainer(config).train(ds, rng)
    return result.params, result.duals, result.history
