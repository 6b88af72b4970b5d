import logging
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

from orat.attacks import AttackConfig
from orat.core import (
    AttackKind,
    ConfigError,
    TrainMode,
    format_schedule,
    parse_bool,
    parse_enum,
    parse_float,
    parse_int,
    parse_int_list,
    parse_optional_float,
    parse_schedule,
    read_key_value_file,
)
from orat.core.constants import (
    DEFAULT_BATCH_SIZE,
    DEFAULT_LAMBDA_HAT_INIT,
    DEFAULT_LAMBDA_INIT,
    DEFAULT_MOMENTUM,
    DEFAULT_TRAIN_PGD_STEPS,
    DEFAULT_WEIGHT_DECAY,
)
from orat.losses import RankRange

logger = logging.getLogger(__name__)

# Keys every mode must set explicitly (file or flags)
REQUIRED_KEYS: dict[TrainMode, tuple[str, ...]] = {
    TrainMode.ORAT: ("k", "m", "epsilon"),
    TrainMode.AT: ("epsilon",),
    TrainMode.ST: (),
}


def _parse_mode(key: str, value: str) -> TrainMode:
    try:
        return parse_enum(TrainMode, value)
    except ValueError as e:
        raise ConfigError(f"'{key}': {e}") from None


def _parse_optional_int(key: str, value: str) -> int | None:
    if value.strip().lower() == "none":
        return None

    return parse_int(key, value)


def _parse_attack(key: str, value: str) -> AttackKind:
    try:
        return parse_enum(AttackKind, value)
    except ValueError as e:
        raise ConfigError(f"'{key}': {e}") from None


_PARSERS: dict[str, Callable[[str, str], Any]] = {
    "mode": _parse_mode,
    "k": _parse_optional_int,
    "m": _parse_optional_int,
    "attack": _parse_attack,
    "epsilon": parse_float,
    "alpha": parse_optional_float,
    "pgd_steps": parse_int,
    "random_start": parse_bool,
    "eta": parse_float,
    "momentum": parse_float,
    "weight_decay": parse_float,
    "epochs": parse_int,
    "batch_size": parse_int,
    "lr_schedule": parse_schedule,
    "seed": parse_int,
    "hidden_sizes": parse_int_list,
    "lambda_init": parse_float,
    "lambda_hat_init": parse_float,
    "freeze_duals": parse_bool,
    "dual_clamp": parse_optional_float,
    "track_robust_acc": parse_bool,
}

CONFIG_KEYS: tuple[str, ...] = tuple(_PARSERS)


@dataclass(frozen=True)
class ORATConfig:
    """Every knob of the three-variable training loop.

    ``k``/``m`` may stay unset until ``resolve`` sees the dataset size; ``at`` and
    ``st`` modes pin them to ``(n, 0)``, and ``st`` also forces ``attack = none``.
    """

    mode: TrainMode = TrainMode.ORAT
    k: int | None = None
    m: int | None = None
    attack: AttackConfig = field(default_factory=AttackConfig)
    eta: float = 0.01
    momentum: float = DEFAULT_MOMENTUM
    weight_decay: float = DEFAULT_WEIGHT_DECAY
    epochs: int = 10
    batch_size: int = DEFAULT_BATCH_SIZE
    lr_schedule: Mapping[int, float] = field(default_factory=dict)
    seed: int = 0
    hidden_sizes: tuple[int, ...] = (64,)
    lambda_init: float = DEFAULT_LAMBDA_INIT
    lambda_hat_init: float = DEFAULT_LAMBDA_HAT_INIT
    freeze_duals: bool = False
    dual_clamp: float | None = None
    track_robust_acc: bool = False

    def __post_init__(self) -> None:
        if self.eta <= 0:
            raise ConfigError(f"eta must be > 0, got {self.eta}")

        if not 0 <= self.momentum < 1:
            raise ConfigError(f"momentum must lie in [0, 1), got {self.momentum}")

        if self.weight_decay < 0:
            raise ConfigError(f"weight_decay must be >= 0, got {self.weight_decay}")

        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError(
                "epochs and batch_size must be >= 1, "
                f"got {self.epochs}, {self.batch_size}",
            )

        if any(size < 1 for size in self.hidden_sizes):
            raise ConfigError(f"hidden_sizes must be positive, got {self.hidden_sizes}")

        if any(epoch < 1 or mult <= 0 for epoch, mult in self.lr_schedule.items()):
            raise ConfigError(
                "lr_schedule needs epochs >= 1 and multipliers > 0, "
                f"got {dict(self.lr_schedule)}",
            )

        if self.dual_clamp is not None and self.dual_clamp <= 0:
            raise ConfigError(f"dual_clamp must be > 0, got {self.dual_clamp}")

    # -- Construction --
    @classmethod
    def from_mapping(cls, entries: Mapping[str, str]) -> "ORATConfig":
        """Build a config from string ``key -> value`` entries, on top of the defaults.

        Raises:
            ConfigError: Unknown key, unparsable value, or a key the mode
                requires is absent.

        """
        unknown = sorted(set(entries) - set(_PARSERS))
        if unknown:
            raise ConfigError(
                f"unknown config key '{unknown[0]}' (valid: {', '.join(CONFIG_KEYS)})",
            )

        values = {key: _PARSERS[key](key, raw) for key, raw in entries.items()}

        mode = values.get("mode", TrainMode.ORAT)
        missing = [key for key in REQUIRED_KEYS[mode] if key not in values]
        if missing:
            raise ConfigError(
                f"missing config key '{missing[0]}' required by mode={mode.value}",
            )

        default_kind = AttackKind.NONE if mode == TrainMode.ST else AttackKind.PGD
        attack = AttackConfig(
            kind=values.pop("attack", default_kind),
            epsilon=values.pop("epsilon", 0.0),
            alpha=values.pop("alpha", None),
            steps=values.pop("pgd_steps", DEFAULT_TRAIN_PGD_STEPS),
            random_start=values.pop("random_start", True),
        )

        return cls(attack=attack, **values)

    @classmethod
    def from_file(
            cls,
            path: str | Path,
            overrides: Mapping[str, str] | None = None,
    ) -> "ORATConfig":
        """Defaults < file < overrides."""
        entries = read_key_value_file(path)
        entries.update(overrides or {})

        return cls.from_mapping(entries)

    def resolve(self, n: int) -> "ORATConfig":
        """Apply the mode rules for a training set of ``n`` samples; validate k and m.

        Raises:
            ConfigError: ``orat`` mode without ``0 <= m < k <= n``.

        """
        if self.mode == TrainMode.ORAT:
            if self.k is None or self.m is None:
                raise ConfigError("mode=orat requires both k and m")

            RankRange(self.k, self.m, n)
            return self

        if (self.k, self.m) not in {(None, None), (n, 0)}:
            logger.warning(
                "mode=%s overrides k=%s, m=%s with (n, 0) = (%d, 0).",
                self.mode.value, self.k, self.m, n,
            )

        attack = self.attack
        if self.mode == TrainMode.ST and attack.kind != AttackKind.NONE:
            logger.warning(
                "mode=st disables the %s training attack.",
                attack.describe(),
            )
            attack = replace(attack, kind=AttackKind.NONE)

        return replace(self, k=n, m=0, attack=attack)

    # -- Queries --
    def rank_range(self, n: int) -> RankRange:
        """Rank range of a config already passed through ``resolve``."""
        if self.k is None or self.m is None:
            raise ConfigError(
                "k and m are unset; resolve the config against the dataset first",
            )

        return RankRange(self.k, self.m, n)

    def lr_multiplier(self, epoch: int) -> float:
        """Multiplier of the last schedule epoch up to ``epoch``; 1 before any."""
        passed = [key for key in self.lr_schedule if key <= epoch]

        return self.lr_schedule[max(passed)] if passed else 1.0

    def learning_rate(self, epoch: int) -> float:
        return self.eta * self.lr_multiplier(epoch)

    def to_mapping(self) -> dict[str, str]:
        """Every key, in file order, rendered so ``from_mapping`` reads it back."""
        attack = self.attack
        return {
            "mode": self.mode.value,
            "k": _text(self.k),
            "m": _text(self.m),
            "attack": attack.kind.value,
            "epsilon": repr(attack.epsilon),
            "alpha": _text(attack.alpha),
            "pgd_steps": str(attack.steps),
            "random_start": str(attack.random_start).lower(),
            "eta": repr(self.eta),
            "momentum": repr(self.momentum),
            "weight_decay": repr(self.weight_decay),
            "epochs": str(self.epochs),
            "batch_size": str(self.batch_size),
            "lr_schedule": format_schedule(dict(self.lr_schedule)),
            "seed": str(self.seed),
            "hidden_sizes": ", ".join(str(size) for size in self.hidden_sizes),
            "lambda_init": repr(self.lambda_init),
            "lambda_hat_init": repr(self.lambda_hat_init),
            "freeze_duals": str(self.freeze_duals).lower(),
            "dual_clamp": _text(self.dual_clamp),
            "track_robust_acc": str(self.track_robust_acc).lower(),
        }


def _text(value: float | None) -> str:
    return "none" if value is None else repr(value)
