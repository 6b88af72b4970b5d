from .dataset import (
    Dataset,
    holdout_split,
    minibatches,
    read_dataset_csv,
    take_subset,
    write_dataset_csv,
)
from .idx import load_idx
from .noise import (
    NoiseSpec,
    apply_noise,
    inject_asymmetric_noise,
    inject_symmetric_noise,
)
from .synthetic import (
    BLOBS_BALANCED,
    BLOBS_IMBALANCED,
    PRESETS,
    ClassSpec,
    GaussianSpec,
    OutlierInjection,
    gen_gaussian_2d,
)

__all__ = [
    # dataset.py
    "Dataset",
    "holdout_split",
    "minibatches",
    "read_dataset_csv",
    "take_subset",
    "write_dataset_csv",

    # idx.py
    "load_idx",

    # noise.py
    "NoiseSpec",
    "apply_noise",
    "inject_asymmetric_noise",
    "inject_symmetric_noise",

    # synthetic.py
    "BLOBS_BALANCED",
    "BLOBS_IMBALANCED",
    "PRESETS",
    "ClassSpec",
    "GaussianSpec",
    "OutlierInjection",
    "gen_gaussian_2d",
]
