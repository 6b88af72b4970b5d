import argparse
import sys
from typing import NoReturn

from orat.core import AttackKind, NoiseKind, TrainMode
from orat.core.constants import DEFAULT_EVAL_PGD_STEPS, DEFAULT_HOLDOUT_FRACTION
from orat.data import PRESETS
from orat.oracle import DEFAULT_N_MAX, DEFAULT_TRIALS

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_RUNTIME = 2
EXIT_VERIFICATION = 3

FLIP_MAPS = ("mnist", "cifar10")


class OratArgumentParser(argparse.ArgumentParser):
    """``ArgumentParser`` whose usage errors exit with ``EXIT_USAGE``."""

    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


# ==================== SHARED ARGUMENTS ====================
def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--seed", type=int, default=None, help="root seed for every random stream",
    )
    parser.add_argument(
        "--verbose", action="store_true", help="show DEBUG records on the console",
    )
    parser.add_argument(
        "--log-file", default=None, help="also write every DEBUG record here",
    )


def _add_dataset(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument("--data", help="dataset CSV written by gen-data")
    source.add_argument(
        "--preset", choices=sorted(PRESETS), help="synthetic Gaussian preset",
    )
    source.add_argument(
        "--mnist", type=int, metavar="N", help="MNIST subset of N samples (0 = all)",
    )

    parser.add_argument("--mnist-split", choices=("train", "test"), default="train")
    parser.add_argument(
        "--mnist-dir", default=None, help="IDX directory (default: $ORAT_MNIST_DIR)",
    )


def _add_noise(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--noise",
        choices=[kind.value for kind in NoiseKind],
        default=NoiseKind.NONE.value,
    )
    parser.add_argument(
        "--gamma", type=float, default=0.0, help="corruption probability",
    )
    parser.add_argument(
        "--flip-map", choices=FLIP_MAPS, default="mnist", help="asymmetric flip map",
    )


def _add_training(parser: argparse.ArgumentParser) -> None:
    """Flags mirroring config-file keys; only flags actually given override the file."""
    parser.add_argument("--config", default=None, help="key = value config file")
    parser.add_argument("--mode", choices=[mode.value for mode in TrainMode])
    parser.add_argument("--k", type=int)
    parser.add_argument("--m", type=int)
    parser.add_argument(
        "--attack", dest="train_attack", choices=[kind.value for kind in AttackKind],
    )
    parser.add_argument("--epsilon", type=float)
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--pgd-steps", type=int)
    parser.add_argument("--eta", type=float)
    parser.add_argument("--epochs", type=int)
    parser.add_argument("--batch-size", type=int)
    parser.add_argument(
        "--hidden-sizes", help="comma-separated hidden widths, e.g. '64,64'",
    )
    parser.add_argument(
        "--lr-schedule", help="epoch:multiplier table, e.g. '20:0.1, 40:0.01'",
    )


# Flag destination -> config key, for flags that override config-file entries
TRAINING_FLAG_KEYS: dict[str, str] = {
    "mode": "mode",
    "k": "k",
    "m": "m",
    "train_attack": "attack",
    "epsilon": "epsilon",
    "alpha": "alpha",
    "pgd_steps": "pgd_steps",
    "eta": "eta",
    "epochs": "epochs",
    "batch_size": "batch_size",
    "hidden_sizes": "hidden_sizes",
    "lr_schedule": "lr_schedule",
    "seed": "seed",
}


# ==================== PARSER ====================
def build_parser() -> OratArgumentParser:
    parser = OratArgumentParser(
        prog="orat",
        description=(
            "Outlier robust adversarial training: data, training, evaluation "
            "and verification."
        ),
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # -- gen-data --
    gen = subparsers.add_parser(
        "gen-data", help="write a synthetic or noise-corrupted dataset CSV",
    )
    _add_dataset(gen)
    _add_noise(gen)
    _add_common(gen)
    gen.add_argument("--out", required=True, help="output CSV path")

    # -- train --
    train = subparsers.add_parser(
        "train", help="train a model; writes a checkpoint and a history CSV",
    )
    _add_dataset(train)
    _add_noise(train)
    _add_training(train)
    _add_common(train)
    train.add_argument(
        "--out", default=None, help="output directory (default: runs/<mode>)",
    )

    # -- eval --
    evaluate = subparsers.add_parser(
        "eval", help="natural and robust accuracy of a checkpoint",
    )
    evaluate.add_argument("--checkpoint", required=True)
    _add_dataset(evaluate)
    _add_common(evaluate)
    evaluate.add_argument(
        "--attack",
        choices=[*(kind.value for kind in AttackKind), "all"],
        default="all",
        help="attack to evaluate under; 'all' gives natural, fgsm and pgd rows",
    )
    evaluate.add_argument(
        "--epsilon", type=float, default=None, help="default: training epsilon",
    )
    evaluate.add_argument("--pgd-steps", type=int, default=DEFAULT_EVAL_PGD_STEPS)
    evaluate.add_argument(
        "--alpha", type=float, default=None, help="PGD step (default: epsilon/4)",
    )
    evaluate.add_argument(
        "--no-random-start",
        dest="random_start",
        action="store_false",
        help="start PGD from the clean input",
    )
    evaluate.add_argument(
        "--defense", default=None, help="report tag (default: training mode)",
    )
    evaluate.add_argument("--out", default=None, help="report CSV path")

    # -- grid-search --
    grid = subparsers.add_parser(
        "grid-search", help="select (k, m) by validation robust accuracy",
    )
    _add_dataset(grid)
    _add_noise(grid)
    _add_training(grid)
    _add_common(grid)
    grid.add_argument("--k-grid", required=True, help="comma-separated k values")
    grid.add_argument("--m-grid", required=True, help="comma-separated m values")
    grid.add_argument("--holdout", type=float, default=DEFAULT_HOLDOUT_FRACTION)
    grid.add_argument("--workers", type=int, default=1)
    grid.add_argument("--out", default=None, help="ranked table CSV path")

    # -- verify --
    verify = subparsers.add_parser("verify", help="run the brute-force oracle suite")
    _add_common(verify)
    verify.add_argument("--trials", type=int, default=DEFAULT_TRIALS)
    verify.add_argument("--nmax", type=int, default=DEFAULT_N_MAX)
    verify.add_argument("--out", default=None, help="oracle report CSV path")

    return parser
