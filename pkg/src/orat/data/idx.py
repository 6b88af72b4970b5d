"""IDX (MNIST) file ingestion.

Layout, all integers big-endian::

    images  0000  u32  0x00000803   magic (unsigned byte, 3 dims)
            0004  u32  n            number of images
            0008  u32  rows
            0012  u32  cols
            0016  u8 * n*rows*cols  pixels

    labels  0000  u32  0x00000801   magic (unsigned byte, 1 dim)
            0004  u32  n            number of labels
            0008  u8 * n            labels

Files ending in ``.gz`` are decompressed transparently.
"""

import gzip
import logging
import struct
from pathlib import Path

import numpy as np
from numpy.typing import NDArray

from orat.core import (
    DataError,
    IdxCountMismatchError,
    IdxMagicError,
    IdxTruncatedError,
)
from orat.core.constants import IDX_IMAGES_MAGIC, IDX_LABELS_MAGIC, PIXEL_SCALE

from .dataset import Dataset

logger = logging.getLogger(__name__)

_U32 = struct.Struct(">I")
_IMAGES_HEADER = 16
_LABELS_HEADER = 8
_MNIST_CLASSES = 10


def load_idx(
        images_path: str | Path,
        labels_path: str | Path,
        num_classes: int | None = None,
) -> Dataset:
    """Parse an IDX image/label pair; pixels are divided by 255 into [0, 1].

    Args:
        images_path: 3-dimensional unsigned-byte IDX file.
        labels_path: 1-dimensional unsigned-byte IDX file.
        num_classes: Class count; defaults to 10, or more if a label demands it.

    Raises:
        IdxMagicError: Wrong magic number (offset 0).
        IdxTruncatedError: Header or payload shorter than declared.
        IdxCountMismatchError: Image and label counts differ (offset 4 of labels).

    """
    images_path, labels_path = Path(images_path), Path(labels_path)
    images = _parse_images(_read_bytes(images_path), str(images_path))
    labels = _parse_labels(_read_bytes(labels_path), str(labels_path))

    if images.shape[0] != labels.shape[0]:
        raise IdxCountMismatchError(
            f"{labels.shape[0]} labels for {images.shape[0]} images",
            path=str(labels_path),
            offset=4,
        )

    features = images.reshape(images.shape[0], -1).astype(np.float64) / PIXEL_SCALE
    classes = num_classes
    if classes is None:
        classes = _MNIST_CLASSES
        if labels.size:
            classes = max(_MNIST_CLASSES, int(labels.max()) + 1)

    logger.info(
        "Loaded %d IDX images of %d pixels from %s.",
        features.shape[0], features.shape[1], images_path,
    )

    return Dataset(features, labels.astype(np.int64), classes)


def _read_bytes(path: Path) -> bytes:
    try:
        if path.suffix == ".gz":
            with gzip.open(path, "rb") as file:
                return file.read()

        return path.read_bytes()
    except (OSError, EOFError) as e:
        raise DataError(f"cannot read IDX file {path}: {e}") from e


def _header(buffer: bytes, path: str, magic: int, size: int) -> tuple[int, ...]:
    if len(buffer) < _U32.size:
        raise IdxTruncatedError("missing magic number", path=path, offset=len(buffer))

    (found,) = _U32.unpack_from(buffer, 0)
    if found != magic:
        raise IdxMagicError(
            f"magic 0x{found:08x}, expected 0x{magic:08x}", path=path, offset=0,
        )

    if len(buffer) < size:
        raise IdxTruncatedError("header cut short", path=path, offset=len(buffer))

    return struct.unpack_from(f">{size // _U32.size - 1}I", buffer, _U32.size)


def _payload(buffer: bytes, path: str, start: int, count: int) -> NDArray[np.uint8]:
    if len(buffer) < start + count:
        raise IdxTruncatedError(
            f"payload has {len(buffer) - start} of {count} bytes",
            path=path,
            offset=len(buffer),
        )

    return np.frombuffer(buffer, dtype=np.uint8, count=count, offset=start)


def _parse_images(buffer: bytes, path: str) -> NDArray[np.uint8]:
    n, rows, cols = _header(buffer, path, IDX_IMAGES_MAGIC, _IMAGES_HEADER)
    pixels = _payload(buffer, path, _IMAGES_HEADER, n * rows * cols)

    return pixels.reshape(n, rows, cols)


def _parse_labels(buffer: bytes, path: str) -> NDArray[np.uint8]:
    (n,) = _header(buffer, path, IDX_LABELS_MAGIC, _LABELS_HEADER)

    return _payload(buffer, path, _LABELS_HEADER, n)
