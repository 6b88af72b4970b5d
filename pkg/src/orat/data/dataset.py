import csv
import logging
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from numpy.typing import ArrayLike, NDArray

from orat.core import ConfigError, DataError, LabelIndexError
from orat.core.constants import INPUT_HIGH, INPUT_LOW
from orat.utils import Rng, format_float

logger = logging.getLogger(__name__)

type Labels = NDArray[np.int64]
type Features = NDArray[np.float64]


# ==================== DATASET ====================
@dataclass(frozen=True)
class Dataset:
    """Feature matrix in [0, 1]^{n×d} with observed labels.

    Attributes:
        features: (n, d) inputs.
        labels: Observed (possibly corrupted) class indices.
        num_classes: Number of classes C.
        clean_labels: Labels before corruption, for diagnostics only.
        is_outlier: Mask of injected outliers in synthetic data.

    """

    features: Features
    labels: Labels
    num_classes: int
    clean_labels: Labels | None = None
    is_outlier: NDArray[np.bool_] | None = None

    def __post_init__(self) -> None:
        features = _frozen(np.array(self.features, dtype=np.float64))
        labels = _frozen(np.array(self.labels, dtype=np.int64))
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "labels", labels)

        if features.ndim != 2 or labels.shape != (features.shape[0],):  # noqa: PLR2004
            raise DataError(
                f"features {features.shape} and labels {labels.shape} do not pair up",
            )

        in_box = ((features >= INPUT_LOW) & (features <= INPUT_HIGH)).all()
        if not (np.isfinite(features).all() and in_box):
            raise DataError("features must be finite and lie within [0, 1]")

        _check_labels(labels, self.num_classes, "labels")

        n = features.shape[0]
        if self.clean_labels is not None:
            clean = _frozen(np.array(self.clean_labels, dtype=np.int64))
            if clean.shape != (n,):
                raise DataError(
                    f"clean_labels has shape {clean.shape}, expected ({n},)",
                )

            _check_labels(clean, self.num_classes, "clean_labels")
            object.__setattr__(self, "clean_labels", clean)

        if self.is_outlier is not None:
            mask = _frozen(np.array(self.is_outlier, dtype=np.bool_))
            if mask.shape != (n,):
                raise DataError(f"is_outlier has shape {mask.shape}, expected ({n},)")

            object.__setattr__(self, "is_outlier", mask)

    # -- Properties --
    @property
    def n(self) -> int:
        return int(self.features.shape[0])

    @property
    def dim(self) -> int:
        return int(self.features.shape[1])

    @property
    def ground_truth(self) -> Labels:
        """Clean labels when known, otherwise the observed ones."""
        return self.labels if self.clean_labels is None else self.clean_labels

    @property
    def corrupted(self) -> NDArray[np.bool_]:
        return self.labels != self.ground_truth

    @property
    def corruption_rate(self) -> float:
        """Empirical fraction of labels that differ from the clean labels."""
        return float(self.corrupted.mean()) if self.n else 0.0

    # -- Public methods --
    def subset(self, indices: ArrayLike) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            features=self.features[idx],
            labels=self.labels[idx],
            num_classes=self.num_classes,
            clean_labels=None if self.clean_labels is None else self.clean_labels[idx],
            is_outlier=None if self.is_outlier is None else self.is_outlier[idx],
        )

    def with_labels(self, labels: ArrayLike) -> "Dataset":
        """Copy with new observed labels; the old ground truth becomes clean_labels."""
        return replace(self, labels=np.asarray(labels), clean_labels=self.ground_truth)


def _frozen[T: np.ndarray](array: T) -> T:
    array.setflags(write=False)
    return array


def _check_labels(labels: Labels, num_classes: int, name: str) -> None:
    if num_classes < 1:
        raise DataError(f"num_classes must be >= 1, got {num_classes}")

    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise LabelIndexError(f"{name} must lie in [0, {num_classes})")


# ==================== BATCHING / SPLITS ====================
def minibatches(ds: Dataset, batch_size: int, rng: Rng) -> list[NDArray[np.int64]]:
    """Shuffle the indices, then cut contiguous slices; the last one may be short."""
    if batch_size < 1:
        raise ConfigError(f"batch_size must be >= 1, got {batch_size}")

    order = rng.permutation(ds.n).astype(np.int64)
    return [order[start:start + batch_size] for start in range(0, ds.n, batch_size)]


def holdout_split(ds: Dataset, fraction: float, rng: Rng) -> tuple[Dataset, Dataset]:
    """Split off ``fraction`` of the samples (at least one) as a validation set."""
    if not 0 < fraction < 1:
        raise ConfigError(f"holdout fraction must lie in (0, 1), got {fraction}")

    order = rng.permutation(ds.n)
    n_val = max(1, round(fraction * ds.n))
    val_idx, train_idx = np.sort(order[:n_val]), np.sort(order[n_val:])

    return ds.subset(train_idx), ds.subset(val_idx)


def take_subset(ds: Dataset, size: int, rng: Rng) -> Dataset:
    """Uniformly drawn subset of ``size`` samples, kept in original order."""
    if size >= ds.n:
        return ds

    return ds.subset(np.sort(rng.permutation(ds.n)[:size]))


# ==================== CSV ====================
def write_dataset_csv(path: str | Path, ds: Dataset) -> Path:
    """Write ``feature_0..feature_{d−1},label,clean_label,is_outlier`` rows."""
    path = Path(path)
    header = [f"feature_{j}" for j in range(ds.dim)]
    header += ["label", "clean_label", "is_outlier"]
    clean = ds.ground_truth
    outlier = np.zeros(ds.n, dtype=np.bool_) if ds.is_outlier is None else ds.is_outlier

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as file:
            writer = csv.writer(file, lineterminator="\n")
            writer.writerow(header)
            for i in range(ds.n):
                writer.writerow(
                    [format_float(v) for v in ds.features[i]]
                    + [int(ds.labels[i]), int(clean[i]), int(outlier[i])],
                )
    except OSError as e:
        raise DataError(f"cannot write dataset {path}: {e}") from e

    logger.info("Wrote %d samples to %s.", ds.n, path)

    return path


def read_dataset_csv(path: str | Path, num_classes: int | None = None) -> Dataset:
    """Read a file written by ``write_dataset_csv``.

    Args:
        path: CSV file.
        num_classes: Class count; inferred from the largest label when omitted.

    """
    path = Path(path)
    try:
        with path.open(newline="", encoding="utf-8") as file:
            rows = list(csv.reader(file))
    except OSError as e:
        raise DataError(f"cannot read dataset {path}: {e}") from e

    if not rows:
        raise DataError(f"{path}: empty dataset file")

    header, body = rows[0], rows[1:]
    dim = sum(1 for name in header if name.startswith("feature_"))
    if header[dim:] != ["label", "clean_label", "is_outlier"] or not body:
        raise DataError(f"{path}: unexpected header {header} or no samples")

    try:
        features = np.array([[float(cell) for cell in row[:dim]] for row in body])
        labels = np.array([int(row[dim]) for row in body])
        clean = np.array([int(row[dim + 1]) for row in body])
        outlier = np.array([row[dim + 2] == "1" for row in body])
    except (ValueError, IndexError) as e:
        raise DataError(f"{path}: malformed row: {e}") from e

    classes = num_classes
    if classes is None:
        classes = int(max(labels.max(), clean.max())) + 1

    return Dataset(features, labels, classes, clean_labels=clean, is_outlier=outlier)
