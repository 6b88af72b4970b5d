import gzip
import struct
from collections.abc import Callable
from pathlib import Path

import numpy as np
import pytest

from orat.core import (
    ConfigError,
    DataError,
    DegenerateCovarianceError,
    IdxCountMismatchError,
    IdxMagicError,
    IdxTruncatedError,
    LabelIndexError,
    NoiseKind,
)
from orat.core.constants import MNIST_FLIP_MAP
from orat.data import (
    BLOBS_BALANCED,
    BLOBS_IMBALANCED,
    ClassSpec,
    Dataset,
    GaussianSpec,
    NoiseSpec,
    OutlierInjection,
    apply_noise,
    gen_gaussian_2d,
    holdout_split,
    inject_asymmetric_noise,
    inject_symmetric_noise,
    load_idx,
    minibatches,
    read_dataset_csv,
    take_subset,
    write_dataset_csv,
)
from orat.utils import make_rng


def _ten_class_ds(n: int = 500) -> Dataset:
    rng = make_rng(21)
    features = rng.uniform(0.0, 1.0, size=(n, 3))
    return Dataset(features, rng.integers(0, 10, size=n), num_classes=10)


def _idx_images(images: list[list[int]], rows: int = 2, cols: int = 2) -> bytes:
    header = struct.pack(">IIII", 0x00000803, len(images), rows, cols)
    return header + bytes(pixel for image in images for pixel in image)


def _idx_labels(labels: list[int]) -> bytes:
    return struct.pack(">II", 0x00000801, len(labels)) + bytes(labels)


# ==================== DATASET ====================
def test_dataset_rejects_features_outside_unit_box() -> None:
    with pytest.raises(DataError):
        Dataset(np.array([[0.5, 1.5]]), np.array([0]), num_classes=2)


def test_dataset_rejects_label_out_of_range() -> None:
    with pytest.raises(LabelIndexError):
        Dataset(np.array([[0.5, 0.5]]), np.array([2]), num_classes=2)


def test_dataset_rejects_unpaired_labels() -> None:
    with pytest.raises(DataError):
        Dataset(np.zeros((3, 2)), np.array([0, 1]), num_classes=2)


def test_dataset_arrays_are_read_only(separable_ds: Dataset) -> None:
    with pytest.raises(ValueError):
        separable_ds.labels[0] = 1


def test_with_labels_keeps_ground_truth(separable_ds: Dataset) -> None:
    flipped = separable_ds.with_labels(1 - separable_ds.labels)
    again = flipped.with_labels(flipped.labels)

    np.testing.assert_array_equal(flipped.clean_labels, separable_ds.labels)
    np.testing.assert_array_equal(again.clean_labels, separable_ds.labels)
    assert flipped.corruption_rate == 1.0


# ==================== BATCHING / SPLITS ====================
def test_minibatches_partition_the_indices(separable_ds: Dataset) -> None:
    batches = minibatches(separable_ds, 6, make_rng(1))

    assert [batch.size for batch in batches] == [6, 6, 6, 2]
    np.testing.assert_array_equal(np.sort(np.concatenate(batches)), np.arange(20))


def test_large_batch_is_one_permutation(separable_ds: Dataset) -> None:
    batches = minibatches(separable_ds, 100, make_rng(1))

    assert len(batches) == 1
    np.testing.assert_array_equal(np.sort(batches[0]), np.arange(20))


def test_minibatches_are_deterministic(separable_ds: Dataset) -> None:
    first = minibatches(separable_ds, 7, make_rng(3))
    second = minibatches(separable_ds, 7, make_rng(3))

    for a, b in zip(first, second, strict=True):
        np.testing.assert_array_equal(a, b)


@pytest.mark.parametrize(
    "split",
    [
        lambda ds: minibatches(ds, 0, make_rng(0)),
        lambda ds: holdout_split(ds, 1.0, make_rng(0)),
    ],
)
def test_batching_rejects_out_of_range_arguments(
        separable_ds: Dataset,
        split: Callable[[Dataset], object],
) -> None:
    with pytest.raises(ConfigError):
        split(separable_ds)


def test_holdout_split_sizes(separable_ds: Dataset) -> None:
    train, val = holdout_split(separable_ds, 0.25, make_rng(0))

    assert (train.n, val.n) == (15, 5)
    assert sorted(map(tuple, np.concatenate([train.features, val.features]))) == sorted(
        map(tuple, separable_ds.features),
    )


def test_holdout_split_keeps_at_least_one_sample(separable_ds: Dataset) -> None:
    _, val = holdout_split(separable_ds, 0.001, make_rng(0))
    assert val.n == 1


def test_take_subset(separable_ds: Dataset) -> None:
    subset = take_subset(separable_ds, 8, make_rng(2))

    assert subset.n == 8
    assert take_subset(separable_ds, 50, make_rng(2)) is separable_ds


# ==================== SYNTHETIC ====================
def test_balanced_preset_has_two_flipped_outliers() -> None:
    ds = gen_gaussian_2d(BLOBS_BALANCED, make_rng(7))

    assert ds.n == 200
    assert ds.is_outlier is not None and ds.clean_labels is not None
    assert int(ds.is_outlier.sum()) == 2
    np.testing.assert_array_equal(ds.corrupted, ds.is_outlier)
    assert ds.features.min() >= 0.0 and ds.features.max() <= 1.0


@pytest.mark.parametrize("seed", [0, 1, 2, 3, 4])
def test_balanced_outliers_crowd_a_lone_clean_inlier(seed: int) -> None:
    ds = gen_gaussian_2d(BLOBS_BALANCED, make_rng(seed))

    assert np.bincount(ds.clean_labels).tolist() == [100, 100]
    outliers = ds.features[ds.is_outlier]
    assert (ds.clean_labels[ds.is_outlier] == 0).all()
    assert (ds.labels[ds.is_outlier] == 1).all()

    clean_zero = ds.features[~ds.is_outlier & (ds.labels == 0)]
    gaps = np.abs(outliers[:, None, :] - clean_zero[None, :, :]).max(axis=2)
    nearest = gaps.min(axis=1)
    assert (nearest < 0.01).all()
    assert (np.sort(gaps, axis=1)[:, 1] > 0.1).all()


def test_imbalanced_preset() -> None:
    ds = gen_gaussian_2d(BLOBS_IMBALANCED, make_rng(7))

    assert ds.n == 200
    assert np.bincount(ds.clean_labels).tolist() == [180, 20]
    assert int(ds.is_outlier.sum()) == 1


def test_generator_without_outliers() -> None:
    spec = GaussianSpec(
        modes=(
            ClassSpec(label=0, mean=(0.0, 0.0), cov=((1.0, 0.0), (0.0, 1.0)), count=30),
            ClassSpec(label=1, mean=(3.0, 3.0), cov=((1.0, 0.5), (0.5, 1.0)), count=30),
        ),
    )
    ds = gen_gaussian_2d(spec, make_rng(0))

    assert not ds.is_outlier.any()
    np.testing.assert_array_equal(ds.labels, ds.clean_labels)


def test_generator_is_deterministic() -> None:
    first = gen_gaussian_2d(BLOBS_BALANCED, make_rng(3))
    second = gen_gaussian_2d(BLOBS_BALANCED, make_rng(3))

    np.testing.assert_array_equal(first.features, second.features)
    np.testing.assert_array_equal(first.labels, second.labels)


def test_generator_rejects_degenerate_covariance() -> None:
    singular = ((1.0, 1.0), (1.0, 1.0))
    mode = ClassSpec(label=0, mean=(0.0, 0.0), cov=singular, count=5)
    spec = GaussianSpec(modes=(mode,))

    with pytest.raises(DegenerateCovarianceError):
        gen_gaussian_2d(spec, make_rng(0))


def test_outlier_without_source_samples() -> None:
    spec = GaussianSpec(
        modes=(
            ClassSpec(label=0, mean=(0.0, 0.0), cov=((1.0, 0.0), (0.0, 1.0)), count=1),
        ),
        outliers=(OutlierInjection(source_class=0), OutlierInjection(source_class=0)),
    )

    with pytest.raises(ConfigError):
        gen_gaussian_2d(spec, make_rng(0))


# ==================== NOISE ====================
def test_symmetric_noise_with_zero_rate_is_identity() -> None:
    ds = _ten_class_ds()
    noisy = inject_symmetric_noise(ds, 0.0, make_rng(0))

    np.testing.assert_array_equal(noisy.labels, ds.labels)
    assert noisy.corruption_rate == 0.0


def test_symmetric_noise_with_full_rate_changes_every_label() -> None:
    ds = _ten_class_ds()
    noisy = inject_symmetric_noise(ds, 1.0, make_rng(0))

    assert (noisy.labels != ds.labels).all()
    assert noisy.corruption_rate == 1.0


def test_symmetric_noise_rate_is_close_to_gamma() -> None:
    ds = _ten_class_ds(4000)
    noisy = inject_symmetric_noise(ds, 0.3, make_rng(5))

    assert noisy.corruption_rate == pytest.approx(0.3, abs=0.03)


def test_symmetric_noise_needs_two_classes() -> None:
    ds = Dataset(np.zeros((3, 1)), np.zeros(3, dtype=np.int64), num_classes=1)

    with pytest.raises(ConfigError):
        inject_symmetric_noise(ds, 0.5, make_rng(0))


def test_asymmetric_noise_with_full_rate_follows_the_map() -> None:
    ds = _ten_class_ds()
    noisy = inject_asymmetric_noise(ds, 1.0, MNIST_FLIP_MAP, make_rng(0))

    clean = ds.labels
    assert (noisy.labels[clean == 2] == 7).all()
    assert (noisy.labels[clean == 5] == 6).all()
    assert (noisy.labels[clean == 6] == 5).all()
    assert (noisy.labels[clean == 3] == 8).all()
    untouched = ~np.isin(clean, list(MNIST_FLIP_MAP))
    np.testing.assert_array_equal(noisy.labels[untouched], clean[untouched])


def test_asymmetric_noise_with_zero_rate_is_identity() -> None:
    ds = _ten_class_ds()
    noisy = inject_asymmetric_noise(ds, 0.0, MNIST_FLIP_MAP, make_rng(0))

    np.testing.assert_array_equal(noisy.labels, ds.labels)


@pytest.mark.parametrize("flip_map", [{2: 2}, {2: 10}, {-1: 3}])
def test_asymmetric_noise_validates_map(flip_map: dict[int, int]) -> None:
    with pytest.raises(ConfigError):
        inject_asymmetric_noise(_ten_class_ds(), 0.5, flip_map, make_rng(0))


@pytest.mark.parametrize("gamma", [-0.1, 1.5])
def test_noise_spec_validates_gamma(gamma: float) -> None:
    with pytest.raises(ConfigError):
        NoiseSpec(kind=NoiseKind.SYMMETRIC, gamma=gamma)


def test_noise_spec_requires_flip_map_for_asymmetric() -> None:
    with pytest.raises(ConfigError):
        NoiseSpec(kind=NoiseKind.ASYMMETRIC, gamma=0.2)


def test_apply_noise_none_returns_the_same_dataset() -> None:
    ds = _ten_class_ds()
    assert apply_noise(ds, NoiseSpec(), make_rng(0)) is ds


# ==================== IDX ====================
def test_idx_pixel_scaling(tmp_path: Path) -> None:
    (tmp_path / "images").write_bytes(_idx_images([[0, 255, 255, 0], [255, 0, 0, 255]]))
    (tmp_path / "labels").write_bytes(_idx_labels([3, 7]))

    ds = load_idx(tmp_path / "images", tmp_path / "labels")

    assert (ds.n, ds.dim, ds.num_classes) == (2, 4, 10)
    np.testing.assert_array_equal(
        ds.features, [[0.0, 1.0, 1.0, 0.0], [1.0, 0.0, 0.0, 1.0]],
    )
    np.testing.assert_array_equal(ds.labels, [3, 7])


def test_idx_reads_gzip(tmp_path: Path) -> None:
    with gzip.open(tmp_path / "images.gz", "wb") as file:
        file.write(_idx_images([[0, 51, 102, 255]]))
    with gzip.open(tmp_path / "labels.gz", "wb") as file:
        file.write(_idx_labels([1]))

    ds = load_idx(tmp_path / "images.gz", tmp_path / "labels.gz")

    np.testing.assert_allclose(ds.features, [[0.0, 0.2, 0.4, 1.0]])


def test_idx_count_mismatch(tmp_path: Path) -> None:
    (tmp_path / "images").write_bytes(_idx_images([[0, 0, 0, 0], [1, 1, 1, 1]]))
    (tmp_path / "labels").write_bytes(_idx_labels([1]))

    with pytest.raises(IdxCountMismatchError) as excinfo:
        load_idx(tmp_path / "images", tmp_path / "labels")

    assert excinfo.value.offset == 4


def test_idx_bad_magic(tmp_path: Path) -> None:
    (tmp_path / "images").write_bytes(_idx_labels([1, 2]))
    (tmp_path / "labels").write_bytes(_idx_labels([1, 2]))

    with pytest.raises(IdxMagicError) as excinfo:
        load_idx(tmp_path / "images", tmp_path / "labels")

    assert excinfo.value.offset == 0


def test_idx_truncated_payload(tmp_path: Path) -> None:
    (tmp_path / "images").write_bytes(_idx_images([[0, 0, 0, 0], [1, 1, 1, 1]])[:-3])
    (tmp_path / "labels").write_bytes(_idx_labels([1, 2]))

    with pytest.raises(IdxTruncatedError):
        load_idx(tmp_path / "images", tmp_path / "labels")


def test_idx_missing_file(tmp_path: Path) -> None:
    with pytest.raises(DataError):
        load_idx(tmp_path / "absent", tmp_path / "absent-labels")


@pytest.mark.slow
def test_official_mnist_training_file(mnist_path: Path) -> None:
    names = ("train-images-idx3-ubyte", "train-labels-idx1-ubyte")
    paths = [
        plain if (plain := mnist_path / name).is_file() else mnist_path / f"{name}.gz"
        for name in names
    ]
    ds = load_idx(*paths)

    assert (ds.n, ds.dim) == (60000, 784)


# ==================== CSV ====================
def test_dataset_csv_round_trip(tmp_path: Path) -> None:
    clean = gen_gaussian_2d(BLOBS_BALANCED, make_rng(1))
    ds = inject_symmetric_noise(clean, 0.2, make_rng(2))

    loaded = read_dataset_csv(write_dataset_csv(tmp_path / "ds.csv", ds))

    np.testing.assert_array_equal(loaded.features, ds.features)
    np.testing.assert_array_equal(loaded.labels, ds.labels)
    np.testing.assert_array_equal(loaded.clean_labels, ds.clean_labels)
    np.testing.assert_array_equal(loaded.is_outlier, ds.is_outlier)


def test_dataset_csv_rejects_bad_header(tmp_path: Path) -> None:
    path = tmp_path / "bad.csv"
    path.write_text("x,y,label\n0.1,0.2,0\n", encoding="utf-8")

    with pytest.raises(DataError):
        read_dataset_csv(path)
