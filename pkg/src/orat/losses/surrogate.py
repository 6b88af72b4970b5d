import math
from dataclasses import dataclass
from fractions import Fraction

from orat.core import ConfigError, MarginLoss


# ==================== MARGIN LOSSES ====================
def hinge_margin_loss(t: float) -> float:
    return max(0.0, 1.0 - t)


def logistic_margin_loss(t: float) -> float:
    """``log(1 + e^{−t})`` without overflow for large negative margins."""
    if t >= 0:
        return math.log1p(math.exp(-t))

    return -t + math.log1p(math.exp(t))


def bce_margin_loss(t: float) -> float:
    """Binary cross-entropy with labels in {±1}: ``−log σ(t)``."""
    if t >= 0:
        return -math.log(1.0 / (1.0 + math.exp(-t)))

    # log σ(t) = t − log(1 + e^t) for negative margins
    return -(t - math.log1p(math.exp(t)))


MARGIN_LOSSES: dict[str, MarginLoss] = {
    "hinge": hinge_margin_loss,
    "logistic": logistic_margin_loss,
    "bce": bce_margin_loss,
}


# ==================== SURROGATE ====================
@dataclass(frozen=True)
class PhiParams:
    """Population duals ``0 ≤ λ* < λ̂*`` and a non-increasing margin loss."""

    lambda_star: float
    lambda_hat_star: float
    base_loss: MarginLoss

    def __post_init__(self) -> None:
        if not 0 <= self.lambda_star < self.lambda_hat_star:
            raise ConfigError(
                f"surrogate needs 0 <= lambda* < lambda_hat*, "
                f"got ({self.lambda_star}, {self.lambda_hat_star})",
            )


def _hinge(value: Fraction) -> Fraction:
    return max(value, Fraction(0))


def phi_orat(t: float, params: PhiParams) -> float:
    """Nested-hinge surrogate ``λ̂* − [λ̂* − [ℓ(t) − λ*]_+]_+`` at margin t.

    The hinges are evaluated in exact rational arithmetic and rounded once at the
    end, so the result equals ``clamp(ℓ(t) − λ*, 0, λ̂*)`` bit for bit.
    """
    loss = Fraction(params.base_loss(t))
    lambda_star = Fraction(params.lambda_star)
    lambda_hat_star = Fraction(params.lambda_hat_star)

    return float(lambda_hat_star - _hinge(lambda_hat_star - _hinge(loss - lambda_star)))
