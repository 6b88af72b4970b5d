import logging

import numpy as np

from orat.core import ConfigError
from orat.losses import MARGIN_LOSSES, PhiParams
from orat.utils import derive_rng

from .contracts import verify_attack_feasibility, verify_phi_clamp
from .gradients import audit_mlp_gradients, audit_subgradients
from .identities import (
    verify_bottom_identity,
    verify_saddle_equivalence,
    verify_topk_identity,
)
from .report import OracleReport

logger = logging.getLogger(__name__)

DEFAULT_TRIALS = 1000
DEFAULT_N_MAX = 20
DEFAULT_SADDLE_N_MAX = 12  # every (k, m) of every vector is scanned

# (λ*, λ̂*) pairs the surrogate clamp is checked at, for every margin loss
_PHI_DUALS = ((0.3, 0.6), (0.0, 1.0), (0.5, 2.0))
_PHI_GRID = np.linspace(-2.0, 2.0, 10_001)


def run_oracle_suite(
        trials: int = DEFAULT_TRIALS,
        seed: int = 0,
        n_max: int = DEFAULT_N_MAX,
) -> OracleReport:
    """Run every verifier on its own ``(seed, check)`` stream.

    ``trials`` sets the identity checks directly and scales the rest: 10 subgradient
    points and 10 attacked samples per trial, one network per 20 trials. The
    saddle check caps vector length at ``DEFAULT_SADDLE_N_MAX``.
    """
    if trials < 1 or n_max < 1:
        raise ConfigError(f"trials and n_max must be >= 1, got {trials}, {n_max}")

    report = OracleReport()
    results = report.results
    results.append(verify_topk_identity(trials, n_max, derive_rng(seed, "topk")))
    results.append(verify_bottom_identity(trials, n_max, derive_rng(seed, "bottom")))
    saddle_n_max = min(n_max, DEFAULT_SADDLE_N_MAX)
    saddle_rng = derive_rng(seed, "saddle")
    results.append(verify_saddle_equivalence(trials, saddle_n_max, saddle_rng))

    subgradient_rng = derive_rng(seed, "subgradients")
    results.append(audit_subgradients(10 * trials, n_max, subgradient_rng))
    results.append(audit_mlp_gradients(max(1, trials // 20), derive_rng(seed, "mlp")))

    for name, loss in MARGIN_LOSSES.items():
        for lambda_star, lambda_hat_star in _PHI_DUALS:
            params = PhiParams(lambda_star, lambda_hat_star, loss)
            check = f"phi_clamp[{name},{lambda_star},{lambda_hat_star}]"
            results.append(verify_phi_clamp(_PHI_GRID, params, check=check))

    results.append(verify_attack_feasibility(10 * trials, derive_rng(seed, "attacks")))

    logger.info(
        "Oracle suite: %d checks, %d failed.",
        len(report.results), len(report.failed_checks),
    )

    return report

