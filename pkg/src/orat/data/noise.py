import logging
from collections.abc import Mapping
from dataclasses import dataclass

import numpy as np

from orat.core import ConfigError, NoiseKind
from orat.utils import Rng

from .dataset import Dataset

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class NoiseSpec:
    """Label-noise recipe; ``kind = none`` leaves a dataset untouched."""

    kind: NoiseKind = NoiseKind.NONE
    gamma: float = 0.0
    flip_map: Mapping[int, int] | None = None

    def __post_init__(self) -> None:
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError(f"gamma must lie in [0, 1], got {self.gamma}")

        if self.kind == NoiseKind.ASYMMETRIC and not self.flip_map:
            raise ConfigError("asymmetric noise requires a flip map")


# ==================== INJECTION ====================
def inject_symmetric_noise(ds: Dataset, gamma: float, rng: Rng) -> Dataset:
    """Select each sample with probability γ and give it a different, uniform class.

    Each sample is considered once, relative to its clean label, so a selected
    label always differs from the ground truth.
    """
    _check_gamma(gamma)
    if ds.num_classes < 2:  # noqa: PLR2004
        raise ConfigError("symmetric noise needs at least two classes")

    clean = ds.ground_truth
    selected = rng.random(ds.n) < gamma
    offsets = rng.integers(1, ds.num_classes, size=ds.n)

    labels = np.where(selected, (clean + offsets) % ds.num_classes, ds.labels)
    noisy = ds.with_labels(labels)

    logger.info(
        "Symmetric noise gamma=%r: %d of %d labels flipped.",
        gamma, int(selected.sum()), ds.n,
    )

    return noisy


def inject_asymmetric_noise(
        ds: Dataset,
        gamma: float,
        flip_map: Mapping[int, int],
        rng: Rng,
) -> Dataset:
    """Flip samples whose clean class is a key of ``flip_map`` with probability γ."""
    _check_gamma(gamma)
    for source, target in flip_map.items():
        if not (0 <= source < ds.num_classes and 0 <= target < ds.num_classes):
            raise ConfigError(
                f"flip map entry {source}->{target} is outside [0, {ds.num_classes})",
            )

        if source == target:
            raise ConfigError(
                f"flip map entry {source}->{target} does not change the class",
            )

    clean = ds.ground_truth
    lookup = np.arange(ds.num_classes)
    for source, target in flip_map.items():
        lookup[source] = target

    eligible = np.isin(clean, list(flip_map))
    selected = eligible & (rng.random(ds.n) < gamma)

    labels = np.where(selected, lookup[clean], ds.labels)
    noisy = ds.with_labels(labels)

    logger.info(
        "Asymmetric noise gamma=%r: %d of %d labels flipped.",
        gamma, int(selected.sum()), ds.n,
    )

    return noisy


def apply_noise(ds: Dataset, spec: NoiseSpec, rng: Rng) -> Dataset:
    if spec.kind == NoiseKind.SYMMETRIC:
        return inject_symmetric_noise(ds, spec.gamma, rng)

    if spec.kind == NoiseKind.ASYMMETRIC:
        assert spec.flip_map is not None
        return inject_asymmetric_noise(ds, spec.gamma, spec.flip_map, rng)

    return ds


def _check_gamma(gamma: float) -> None:
    if not 0.0 <= gamma <= 1.0:
        raise ConfigError(f"gamma must lie in [0, 1], got {gamma}")
