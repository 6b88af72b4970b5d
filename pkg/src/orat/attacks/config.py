from dataclasses import dataclass

from orat.core import AttackKind, ConfigError
from orat.core.constants import DEFAULT_TRAIN_PGD_STEPS, INPUT_HIGH, INPUT_LOW


@dataclass(frozen=True)
class AttackConfig:
    """l-infinity threat model and attack schedule.

    Attributes:
        kind: none, fgsm or pgd.
        epsilon: Radius of the l-infinity ball, in input units.
        alpha: PGD step size; ``None`` means ε/4.
        steps: Number of PGD iterations P.
        random_start: Start PGD from a uniform point of the ball.
        bounds: Valid input box (low, high).

    """

    kind: AttackKind = AttackKind.NONE
    epsilon: float = 0.0
    alpha: float | None = None
    steps: int = DEFAULT_TRAIN_PGD_STEPS
    random_start: bool = True
    bounds: tuple[float, float] = (INPUT_LOW, INPUT_HIGH)

    def __post_init__(self) -> None:
        if self.epsilon < 0:
            raise ConfigError(f"epsilon must be >= 0, got {self.epsilon}")

        if self.steps < 1:
            raise ConfigError(f"steps must be >= 1, got {self.steps}")

        low, high = self.bounds
        if not low < high:
            raise ConfigError(
                f"input bounds must satisfy low < high, got {self.bounds}",
            )

        # A zero radius makes every step size harmless, including ε/4 = 0
        if self.kind != AttackKind.NONE and self.epsilon > 0 and self.step_size <= 0:
            raise ConfigError(f"alpha must be > 0, got {self.alpha}")

    @property
    def step_size(self) -> float:
        return self.epsilon / 4 if self.alpha is None else self.alpha

    @classmethod
    def none(cls) -> "AttackConfig":
        return cls()

    @classmethod
    def fgsm(cls, epsilon: float) -> "AttackConfig":
        return cls(
            kind=AttackKind.FGSM,
            epsilon=epsilon,
            alpha=epsilon,
            steps=1,
            random_start=False,
        )

    @classmethod
    def pgd(
            cls,
            epsilon: float,
            steps: int,
            *,
            alpha: float | None = None,
            random_start: bool = True,
    ) -> "AttackConfig":
        return cls(
            kind=AttackKind.PGD,
            epsilon=epsilon,
            alpha=alpha,
            steps=steps,
            random_start=random_start,
        )

    def describe(self) -> str:
        if self.kind == AttackKind.NONE:
            return "natural"

        if self.kind == AttackKind.FGSM:
            return "fgsm"

        return f"pgd{self.steps}"
