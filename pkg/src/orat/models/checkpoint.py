import logging
import zipfile
from collections.abc import Mapping
from pathlib import Path

import numpy as np

from orat.core import CheckpointError, ConfigError, DimensionError
from orat.core.constants import CHECKPOINT_FORMAT_VERSION

from .mlp import MLPParams

logger = logging.getLogger(__name__)


def save_checkpoint(
        path: str | Path,
        params: MLPParams,
        metadata: Mapping[str, str] | None = None,
) -> Path:
    """Write parameters and string metadata to a versioned ``.npz`` container.

    Arrays are stored as raw float64, so a save/load round trip is value-exact.

    Returns:
        The path actually written (numpy appends ``.npz`` when missing).

    """
    path = Path(path)
    if path.suffix != ".npz":
        path = path.with_name(path.name + ".npz")

    meta = dict(metadata or {})
    payload: dict[str, np.ndarray] = {
        "format_version": np.array(CHECKPOINT_FORMAT_VERSION),
        "layer_sizes": np.array(params.layer_sizes, dtype=np.int64),
        "meta_keys": np.array(sorted(meta), dtype=np.str_),
        "meta_values": np.array([meta[key] for key in sorted(meta)], dtype=np.str_),
    }
    for index, array in enumerate(params.arrays()):
        payload[f"param_{index}"] = array

    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as file:
            np.savez(file, **payload)
    except OSError as e:
        raise CheckpointError(f"cannot write checkpoint {path}: {e}") from e

    logger.info("Saved checkpoint %s (layers %s).", path, params.layer_sizes)

    return path


def load_checkpoint(path: str | Path) -> tuple[MLPParams, dict[str, str]]:
    """Read a checkpoint written by ``save_checkpoint``.

    Raises:
        CheckpointError: Missing file, unknown format version, or inconsistent arrays.

    """
    path = Path(path)
    try:
        with np.load(path, allow_pickle=False) as archive:
            version = int(archive["format_version"])
            if version != CHECKPOINT_FORMAT_VERSION:
                raise CheckpointError(
                    f"{path}: unsupported checkpoint version {version}",
                )

            layer_sizes = tuple(int(size) for size in archive["layer_sizes"])
            if len(layer_sizes) < 2 or min(layer_sizes) < 1:  # noqa: PLR2004
                raise CheckpointError(
                    f"{path}: invalid layer sizes {layer_sizes}",
                )

            arrays = [archive[f"param_{i}"] for i in range(2 * (len(layer_sizes) - 1))]
            metadata = dict(
                zip(
                    (str(key) for key in archive["meta_keys"]),
                    (str(value) for value in archive["meta_values"]),
                    strict=True,
                ),
            )
    except (OSError, KeyError, ValueError, zipfile.BadZipFile) as e:
        raise CheckpointError(f"cannot read checkpoint {path}: {e}") from e

    try:
        params = MLPParams.from_arrays(arrays)
    except (ConfigError, DimensionError) as e:
        raise CheckpointError(f"{path}: inconsistent parameter arrays: {e}") from e

    if params.layer_sizes != layer_sizes:
        raise CheckpointError(
            f"{path}: stored layer sizes {layer_sizes} "
            f"disagree with arrays {params.layer_sizes}",
        )

    logger.debug("Loaded checkpoint %s (layers %s).", path, layer_sizes)

    return params, metadata
