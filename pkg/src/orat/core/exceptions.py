class OratError(Exception):
    pass


class ConfigError(OratError):
    pass


class DimensionError(OratError, ValueError):
    pass


class LabelIndexError(OratError, IndexError):
    pass


class ContractError(OratError):
    pass


class CheckpointError(OratError):
    pass


class VerificationError(OratError):
    pass


# ==================== NUMERIC ====================
class NumericError(OratError):
    pass


class TrainingError(NumericError):
    """Non-finite loss or gradient during training."""

    def __init__(
            self,
            message: str,
            *,
            epoch: int | None = None,
            batch: int | None = None,
            step: int | None = None,
    ):
        location = ", ".join(
            f"{name} {value}"
            for name, value in (("epoch", epoch), ("batch", batch), ("step", step))
            if value is not None
        )
        super().__init__(f"{message} ({location})" if location else message)
        self.epoch = epoch
        self.batch = batch
        self.step = step


class AttackError(NumericError):
    """Non-finite input gradient while generating adversarial examples."""

    def __init__(self, message: str, *, step: int | None = None):
        super().__init__(message if step is None else f"{message} (step {step})")
        self.step = step


# ==================== DATA ====================
class DataError(OratError):
    pass


class DegenerateCovarianceError(DataError):
    pass


class IdxFormatError(DataError):
    """Malformed IDX file; ``offset`` is the byte position where parsing failed."""

    def __init__(self, message: str, *, path: str, offset: int):
        super().__init__(f"{path}: {message} at byte offset {offset}")
        self.path = path
        self.offset = offset


class IdxMagicError(IdxFormatError):
    pass


class IdxTruncatedError(IdxFormatError):
    pass


class IdxCountMismatchError(IdxFormatError):
    pass
