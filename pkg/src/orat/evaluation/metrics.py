import logging

import numpy as np
from numpy.typing import NDArray

from orat.attacks import AttackConfig, feasibility_violation, perturb
from orat.autograd import Array, Tensor
from orat.core import AttackError, DataError, DimensionError
from orat.core.constants import FEASIBILITY_SLACK
from orat.data import Dataset
from orat.models import MLP, MLPParams, mlp_forward
from orat.utils import Rng

logger = logging.getLogger(__name__)


def predict(params: MLPParams, features: Array) -> NDArray[np.int64]:
    """Argmax class per row; ties go to the lowest class index."""
    logits = mlp_forward(params.constant(), Tensor(features))
    return np.argmax(logits.data, axis=1).astype(np.int64)


def accuracy(params: MLPParams, ds: Dataset) -> float:
    """Fraction of samples whose predicted class equals the observed label."""
    _check_compatible(params, ds)
    return _hit_rate(params, ds.features, ds)


def robust_accuracy(
        params: MLPParams,
        ds: Dataset,
        attack: AttackConfig,
        rng: Rng,
) -> float:
    """Accuracy on inputs attacked against ``params`` itself.

    Raises:
        AttackError: An attacked input leaves the ε-ball or the input box.

    """
    _check_compatible(params, ds)

    x_adv = perturb(MLP(), params, Tensor(ds.features), ds.labels, attack, rng).data
    violation = feasibility_violation(x_adv, ds.features, attack.epsilon, attack.bounds)
    if violation > FEASIBILITY_SLACK:
        raise AttackError(f"evaluation attack left the feasible set by {violation:.3e}")

    robust = _hit_rate(params, x_adv, ds)
    logger.debug(
        "Robust accuracy under %s eps=%r: %r.",
        attack.describe(), attack.epsilon, robust,
    )

    return robust


def _hit_rate(params: MLPParams, features: Array, ds: Dataset) -> float:
    hits = int(np.count_nonzero(predict(params, features) == ds.labels))
    return hits / ds.n


def _check_compatible(params: MLPParams, ds: Dataset) -> None:
    if ds.n == 0:
        raise DataError("cannot evaluate on an empty dataset")

    if params.input_dim != ds.dim or params.num_classes != ds.num_classes:
        raise DimensionError(
            f"model maps {params.input_dim} -> {params.num_classes} "
            f"but the dataset has d={ds.dim}, C={ds.num_classes}",
        )
