from enum import Enum


class TrainMode(Enum):
    """Which objective the trainer optimizes."""

    ST = "st"  # Standard training, no attack
    AT = "at"  # Adversarial training, plain mean loss
    ORAT = "orat"


class AttackKind(Enum):
    """l-infinity attack used to perturb inputs."""

    NONE = "none"
    FGSM = "fgsm"
    PGD = "pgd"


class NoiseKind(Enum):
    """How training labels are corrupted."""

    NONE = "none"
    SYMMETRIC = "symmetric"
    ASYMMETRIC = "asymmetric"


def parse_enum[E: Enum](enum_type: type[E], value: str) -> E:
    """Look up an enum member by its string value.

    Raises:
        ValueError: If the value names no member; the message lists valid values.

    """
    try:
        return enum_type(value.strip().lower())
    except ValueError:
        valid = ", ".join(member.value for member in enum_type)
        raise ValueError(
            f"invalid {enum_type.__name__} '{value}' (valid: {valid})",
        ) from None
