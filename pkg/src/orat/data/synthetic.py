import logging
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from orat.core import ConfigError, DegenerateCovarianceError
from orat.utils import Rng, standard_normal

from .dataset import Dataset

logger = logging.getLogger(__name__)

type Point = tuple[float, ...]
type Covariance = tuple[tuple[float, ...], ...]


# ==================== SPECS ====================
@dataclass(frozen=True)
class ClassSpec:
    """One Gaussian mode. Several modes may share a label (multi-modal class)."""

    label: int
    mean: Point
    cov: Covariance
    count: int

    def __post_init__(self) -> None:
        if self.count < 1:
            raise ConfigError(
                f"class {self.label}: count must be >= 1, got {self.count}",
            )

        dim = len(self.mean)
        if np.shape(self.cov) != (dim, dim):
            raise ConfigError(f"class {self.label}: covariance must be {dim}x{dim}")


@dataclass(frozen=True)
class OutlierInjection:
    """Flip the ``source_class`` sample closest to ``near`` to ``target_class``.

    ``near`` is given in generator coordinates (before rescaling) and defaults
    to the mean of the source class's first mode. ``target_class`` defaults to
    the next class index.
    """

    source_class: int
    near: Point | None = None
    target_class: int | None = None


@dataclass(frozen=True)
class GaussianSpec:
    modes: tuple[ClassSpec, ...]
    outliers: tuple[OutlierInjection, ...] = field(default_factory=tuple)
    margin: float = 0.05

    def __post_init__(self) -> None:
        if not self.modes:
            raise ConfigError("a Gaussian spec needs at least one mode")

        dims = {len(mode.mean) for mode in self.modes}
        if len(dims) != 1:
            raise ConfigError(f"modes disagree on dimension: {sorted(dims)}")

        if not 0 <= self.margin < 0.5:  # noqa: PLR2004
            raise ConfigError(f"margin must lie in [0, 0.5), got {self.margin}")

    @property
    def num_classes(self) -> int:
        return max(mode.label for mode in self.modes) + 1

    @property
    def n(self) -> int:
        return sum(mode.count for mode in self.modes)


# ==================== GENERATOR ====================
def gen_gaussian_2d(spec: GaussianSpec, rng: Rng) -> Dataset:
    """Draw every mode, inject label-flip outliers, then rescale into the unit box.

    Rescaling is a single isotropic affine map onto ``[margin, 1 − margin]``
    so the geometry (and thus ℓ∞ balls) is preserved across axes.

    Raises:
        DegenerateCovarianceError: A covariance is not symmetric positive-definite.
        ConfigError: An outlier names a class with no samples left to flip.

    """
    points: list[NDArray[np.float64]] = []
    labels: list[NDArray[np.int64]] = []

    for mode in spec.modes:
        chol = _cholesky(mode)
        z = standard_normal(rng, (mode.count, len(mode.mean)))
        points.append(np.asarray(mode.mean, dtype=np.float64) + z @ chol.T)
        labels.append(np.full(mode.count, mode.label, dtype=np.int64))

    raw = np.concatenate(points)
    clean = np.concatenate(labels)
    observed = clean.copy()
    is_outlier = np.zeros(spec.n, dtype=np.bool_)

    for injection in spec.outliers:
        index = _nearest_candidate(spec, raw, clean, is_outlier, injection)
        target = injection.target_class
        if target is None:
            target = (injection.source_class + 1) % spec.num_classes

        observed[index] = target
        is_outlier[index] = True
        logger.debug(
            "Flipped sample %d from class %d to %d.",
            index, clean[index], target,
        )

    features = _rescale(raw, spec.margin)

    logger.info(
        "Generated %d samples in %d classes with %d outliers.",
        spec.n, spec.num_classes, int(is_outlier.sum()),
    )

    return Dataset(
        features, observed, spec.num_classes, clean_labels=clean, is_outlier=is_outlier,
    )


def _cholesky(mode: ClassSpec) -> NDArray[np.float64]:
    cov = np.asarray(mode.cov, dtype=np.float64)
    if not np.allclose(cov, cov.T):
        raise DegenerateCovarianceError(
            f"class {mode.label}: covariance is not symmetric",
        )

    try:
        return np.linalg.cholesky(cov)
    except np.linalg.LinAlgError as e:
        raise DegenerateCovarianceError(
            f"class {mode.label}: covariance is not positive-definite",
        ) from e


def _nearest_candidate(
        spec: GaussianSpec,
        raw: NDArray[np.float64],
        clean: NDArray[np.int64],
        taken: NDArray[np.bool_],
        injection: OutlierInjection,
) -> int:
    source = injection.source_class
    candidates = np.flatnonzero((clean == source) & ~taken)
    if candidates.size == 0:
        raise ConfigError(f"no samples of class {source} left to turn into an outlier")

    near = injection.near
    if near is None:
        near = next(mode.mean for mode in spec.modes if mode.label == source)

    offsets = raw[candidates] - np.asarray(near, dtype=np.float64)
    distances = np.linalg.norm(offsets, axis=1)

    return int(candidates[np.argmin(distances)])


def _rescale(raw: NDArray[np.float64], margin: float) -> NDArray[np.float64]:
    low = raw.min(axis=0)
    span = float((raw.max(axis=0) - low).max())
    if span == 0:
        return np.full_like(raw, 0.5)

    scaled = margin + (raw - low) * ((1.0 - 2.0 * margin) / span)

    return np.clip(scaled, 0.0, 1.0)


# ==================== PRESETS ====================
_ISO_TIGHT = ((0.08, 0.0), (0.0, 0.08))
_ISO_WIDE = ((0.35, 0.0), (0.0, 0.35))
_ISO_MODE = ((0.02, 0.0), (0.0, 0.02))
_ISO_POINT = ((1e-6, 0.0), (0.0, 1e-6))

# Each class keeps one lone inlier in the middle of the gap. Both flipped
# samples sit 0.025 (about 0.008 after rescaling) in front of the class-0
# one, so any boundary that fits them leaves that inlier inside an ε = 0.01
# ball of the other class.
BLOBS_BALANCED = GaussianSpec(
    modes=(
        ClassSpec(label=0, mean=(-1.0, 1.0), cov=_ISO_MODE, count=49),
        ClassSpec(label=0, mean=(-1.0, -1.0), cov=_ISO_MODE, count=48),
        ClassSpec(label=0, mean=(-0.08, 0.0), cov=_ISO_POINT, count=1),
        ClassSpec(label=0, mean=(-0.055, 0.0), cov=_ISO_POINT, count=2),
        ClassSpec(label=1, mean=(1.0, 1.0), cov=_ISO_MODE, count=50),
        ClassSpec(label=1, mean=(1.0, -1.0), cov=_ISO_MODE, count=49),
        ClassSpec(label=1, mean=(0.08, 0.0), cov=_ISO_POINT, count=1),
    ),
    outliers=(
        OutlierInjection(source_class=0, near=(-0.055, 0.0), target_class=1),
        OutlierInjection(source_class=0, near=(-0.055, 0.0), target_class=1),
    ),
)

BLOBS_IMBALANCED = GaussianSpec(
    modes=(
        ClassSpec(label=0, mean=(0.0, 0.0), cov=_ISO_WIDE, count=180),
        ClassSpec(label=1, mean=(1.8, 1.8), cov=_ISO_TIGHT, count=20),
    ),
    outliers=(OutlierInjection(source_class=0, near=(0.0, 0.0), target_class=1),),
)

PRESETS: dict[str, GaussianSpec] = {
    "blobs-balanced": BLOBS_BALANCED,
    "blobs-imbalanced": BLOBS_IMBALANCED,
}
