import logging
from collections.abc import Sequence

import numpy as np

from orat.attacks import AttackConfig, feasibility_violation, fgsm, pgd
from orat.autograd import Tensor
from orat.core import AttackError
from orat.core.constants import FEASIBILITY_SLACK
from orat.losses import PhiParams, phi_orat
from orat.models import MLP, mlp_init
from orat.utils import Rng, derive_rng, spawn_seed

from .report import CheckResult, CheckTally

logger = logging.getLogger(__name__)

DEFAULT_EPSILONS = (0.0, 0.01, 0.1, 0.3)


# ==================== SURROGATE CLAMP ====================
def verify_phi_clamp(
        t_grid: Sequence[float],
        params: PhiParams,
        *,
        check: str = "phi_clamp",
) -> CheckResult:
    """``φ(t) == clamp(ℓ(t) − λ*, 0, λ̂*)`` exactly, with range and monotonicity.

    φ must stay in ``[0, λ̂*]`` and never increase along the grid sorted ascending.
    """
    tally = CheckTally(check, 0.0)
    low, high = 0.0, params.lambda_hat_star

    previous: float | None = None
    for t in sorted(float(value) for value in t_grid):
        phi = phi_orat(t, params)
        clamp = min(max(params.base_loss(t) - params.lambda_star, low), high)

        deviation = max(
            abs(phi - clamp),
            max(low - phi, phi - high, 0.0),
            0.0 if previous is None else max(phi - previous, 0.0),
        )
        tally.record(deviation, f"t={t!r} phi={phi!r} clamp={clamp!r}")
        previous = phi

    return tally.result()


# ==================== ATTACK CONTRACTS ====================
def verify_attack_feasibility(
        n_samples: int,
        rng: Rng,
        *,
        epsilons: Sequence[float] = DEFAULT_EPSILONS,
        pgd_steps: int = 5,
) -> CheckResult:
    """Attack outputs stay in the ε-ball and the input box; FGSM is one unit PGD step.

    Per radius this records three deviations against a random 4-8-3 network:
    the feasibility violation of PGD, the largest gap between FGSM and
    PGD(P=1, α=ε, no random start), and, at ε = 0, the distance from the clean input.
    """
    tally = CheckTally("attack_feasibility", FEASIBILITY_SLACK)
    base = spawn_seed(rng)
    model = MLP()
    params = mlp_init((4, 8, 3), derive_rng(base, "model"))

    data_rng = derive_rng(base, "data")
    x = Tensor(data_rng.uniform(0.0, 1.0, size=(n_samples, 4)))
    y = data_rng.integers(0, 3, size=n_samples)

    for epsilon in epsilons:
        cfg = AttackConfig.pgd(epsilon, pgd_steps)
        unit_step = AttackConfig.pgd(epsilon, 1, alpha=epsilon, random_start=False)
        try:
            pgd_rng = derive_rng(base, f"pgd:{epsilon!r}")
            unit_rng = derive_rng(base, f"unit:{epsilon!r}")
            x_pgd = pgd(model, params, x, y, cfg, pgd_rng).data
            x_fgsm = fgsm(model, params, x, y, epsilon).data
            x_unit = pgd(model, params, x, y, unit_step, unit_rng).data
        except AttackError as e:
            tally.record(float("inf"), f"eps={epsilon!r}: {e}")
            continue

        violation = feasibility_violation(x_pgd, x.data, epsilon)
        tally.record(violation, f"pgd eps={epsilon!r}")
        unit_gap = float(np.max(np.abs(x_fgsm - x_unit)))
        tally.record(unit_gap, f"fgsm-vs-pgd1 eps={epsilon!r}")
        if epsilon == 0:
            tally.record(float(np.max(np.abs(x_pgd - x.data))), "eps=0 identity")

    return tally.result(f"{n_samples} samples per radius")
