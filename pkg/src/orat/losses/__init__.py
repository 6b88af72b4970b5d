from .orat_objective import (
    DualVars,
    SubgradientArrays,
    orat_batch_objective,
    orat_inner_objective,
    orat_saddle_value,
    orat_subgradient_arrays,
    orat_subgradients,
    risk_difference_form,
)
from .ranking import (
    LossVector,
    RankRange,
    aorr,
    bottom_sum_variational,
    descending,
    topk_sum_sorted,
    topk_sum_variational,
)
from .surrogate import (
    MARGIN_LOSSES,
    PhiParams,
    bce_margin_loss,
    hinge_margin_loss,
    logistic_margin_loss,
    phi_orat,
)

__all__ = [
    # orat_objective.py
    "DualVars",
    "SubgradientArrays",
    "orat_batch_objective",
    "orat_inner_objective",
    "orat_saddle_value",
    "orat_subgradient_arrays",
    "orat_subgradients",
    "risk_difference_form",

    # ranking.py
    "LossVector",
    "RankRange",
    "aorr",
    "bottom_sum_variational",
    "descending",
    "topk_sum_sorted",
    "topk_sum_variational",

    # surrogate.py
    "MARGIN_LOSSES",
    "PhiParams",
    "bce_margin_loss",
    "hinge_margin_loss",
    "logistic_margin_loss",
    "phi_orat",
]
