"""Brute-force checks of the ranking identities.

Everything on the reference side is plain Python over lists (``sorted``,
``math.fsum``, explicit candidate loops) so a bug in the vectorised
production scans cannot hide itself.
"""

import logging
import math

from orat.core import ConfigError
from orat.core.constants import IDENTITY_TOLERANCE
from orat.losses import (
    LossVector,
    RankRange,
    aorr,
    bottom_sum_variational,
    orat_saddle_value,
    risk_difference_form,
    topk_sum_sorted,
    topk_sum_variational,
)
from orat.utils import Rng, derive_rng, spawn_seed

from .report import CheckResult, CheckTally

logger = logging.getLogger(__name__)

_DUPLICATE_POOL = 3


# ==================== REFERENCE ARITHMETIC ====================
def reference_topk_sum(values: list[float], k: int) -> float:
    return math.fsum(sorted(values, reverse=True)[:k])


def reference_aorr(values: list[float], k: int, m: int) -> float:
    ranked = sorted(values, reverse=True)
    return math.fsum(ranked[m:k]) / (k - m)


def reference_topk_objective(values: list[float], k: int, lam: float) -> float:
    return k * lam + math.fsum(max(v - lam, 0.0) for v in values)


def reference_bottom_objective(values: list[float], m: int, lam: float) -> float:
    return (len(values) - m) * lam - math.fsum(max(lam - v, 0.0) for v in values)


def trial_vector(rng: Rng, n_max: int, trial: int) -> list[float]:
    """Random non-negative vector.

    Every tenth trial is constant and the one after it repeats a small pool of values.
    """
    n = int(rng.integers(1, n_max + 1))
    if trial % 10 == 0:
        return [float(rng.uniform(0.0, 2.0))] * n

    if trial % 10 == 1:
        pool = [float(v) for v in rng.uniform(0.0, 2.0, size=_DUPLICATE_POOL)]
        return [pool[int(i)] for i in rng.integers(0, _DUPLICATE_POOL, size=n)]

    return [float(v) for v in rng.uniform(0.0, 2.0, size=n)]


def _describe(values: list[float], **params: int) -> str:
    head = " ".join(f"{name}={value}" for name, value in params.items())
    return f"{head} values=[{', '.join(repr(v) for v in values)}]"


# ==================== VERIFIERS ====================
def verify_topk_identity(
        n_trials: int,
        n_max: int,
        rng: Rng,
        *,
        tolerance: float = IDENTITY_TOLERANCE,
) -> CheckResult:
    """Top-k sum by sorting equals the variational minimum.

    The minimum is attained at the k-th largest value.
    """
    if n_trials < 1:
        raise ConfigError(f"n_trials must be >= 1, got {n_trials}")

    tally = CheckTally("topk_identity", tolerance)
    base = spawn_seed(rng)
    for trial in range(n_trials):
        trial_rng = derive_rng(base, trial)
        values = trial_vector(trial_rng, n_max, trial)
        k = int(trial_rng.integers(1, len(values) + 1))

        expected = reference_topk_sum(values, k)
        losses = LossVector.of(values)
        variational, _ = topk_sum_variational(losses, k)

        kth = sorted(values, reverse=True)[k - 1]
        brute_min = min(
            reference_topk_objective(values, k, lam) for lam in [*values, 0.0]
        )

        deviation = max(
            abs(topk_sum_sorted(losses, k) - expected),
            abs(variational - expected),
            abs(reference_topk_objective(values, k, kth) - brute_min),
        )
        tally.record(deviation, _describe(values, k=k))

    return tally.result()


def verify_bottom_identity(
        n_trials: int,
        n_max: int,
        rng: Rng,
        *,
        tolerance: float = IDENTITY_TOLERANCE,
) -> CheckResult:
    """Sum of all but the m largest equals the variational maximum.

    The maximum is attained at the m-th largest value when m >= 1.
    """
    tally = CheckTally("bottom_identity", tolerance)
    base = spawn_seed(rng)
    for trial in range(n_trials):
        trial_rng = derive_rng(base, trial)
        values = trial_vector(trial_rng, n_max, trial)
        m = int(trial_rng.integers(0, len(values)))

        expected = math.fsum(sorted(values, reverse=True)[m:])
        variational, _ = bottom_sum_variational(LossVector.of(values), m)
        deviation = abs(variational - expected)

        if m >= 1:
            mth = sorted(values, reverse=True)[m - 1]
            brute_max = max(
                reference_bottom_objective(values, m, lam) for lam in values
            )
            at_mth = reference_bottom_objective(values, m, mth)
            deviation = max(deviation, abs(at_mth - brute_max))

        tally.record(deviation, _describe(values, m=m))

    return tally.result()


def verify_saddle_equivalence(
        n_trials: int,
        n_max: int,
        rng: Rng,
        *,
        tolerance: float = IDENTITY_TOLERANCE,
) -> CheckResult:
    """Saddle value / (k−m) and the difference form both equal the ranked-range average.

    Covers every valid (k, m) of each sampled vector. Whether the optimal duals
    satisfy λ̂* > λ* is counted and reported, never asserted.
    """
    tally = CheckTally("saddle_equivalence", tolerance)
    held = total = 0
    base = spawn_seed(rng)
    for trial in range(n_trials):
        values = trial_vector(derive_rng(base, trial), n_max, trial)
        losses = LossVector.of(values)
        n = len(values)

        for k in range(1, n + 1):
            for m in range(k):
                rank_range = RankRange(k, m, n)
                expected = reference_aorr(values, k, m)
                saddle, duals = orat_saddle_value(losses, rank_range)

                deviation = max(
                    abs(saddle / (k - m) - expected),
                    abs(risk_difference_form(losses, rank_range) - expected),
                    abs(aorr(losses, rank_range) - expected),
                )
                tally.record(deviation, _describe(values, k=k, m=m))

                total += 1
                held += duals.lambda_hat > duals.lambda_

    note = f"lambda_hat* > lambda* held in {held} of {total} cases"
    logger.info("Saddle-point duals: %s.", note)

    return tally.result(note)
