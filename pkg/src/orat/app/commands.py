import argparse
import logging
from collections.abc import Callable, Mapping
from pathlib import Path

from orat.attacks import AttackConfig
from orat.core import (
    DEFAULT_OUTPUT_DIR,
    AttackKind,
    ConfigError,
    DataError,
    NoiseKind,
    VerificationError,
    mnist_dir,
    parse_enum,
    parse_int_list,
    read_key_value_file,
)
from orat.core.config import (
    MNIST_TEST_IMAGES,
    MNIST_TEST_LABELS,
    MNIST_TRAIN_IMAGES,
    MNIST_TRAIN_LABELS,
)
from orat.core.constants import CIFAR10_FLIP_MAP, MNIST_FLIP_MAP
from orat.data import (
    PRESETS,
    Dataset,
    NoiseSpec,
    apply_noise,
    gen_gaussian_2d,
    holdout_split,
    load_idx,
    read_dataset_csv,
    take_subset,
    write_dataset_csv,
)
from orat.evaluation import (
    evaluate_model,
    format_summary,
    standard_attacks,
    write_report_csv,
)
from orat.models import load_checkpoint, save_checkpoint
from orat.oracle import run_oracle_suite, write_oracle_csv
from orat.training import ORATConfig, grid_search_km, write_grid_csv, write_history_csv
from orat.utils import derive_rng, format_duration, format_percent

from .cli import EXIT_OK, TRAINING_FLAG_KEYS
from .context import build_training_context

logger = logging.getLogger(__name__)

FLIP_MAP_BY_NAME: dict[str, dict[int, int]] = {
    "mnist": MNIST_FLIP_MAP,
    "cifar10": CIFAR10_FLIP_MAP,
}

_MNIST_FILES = {
    "train": (MNIST_TRAIN_IMAGES, MNIST_TRAIN_LABELS),
    "test": (MNIST_TEST_IMAGES, MNIST_TEST_LABELS),
}


# ==================== SHARED HELPERS ====================
def print_settings(settings: Mapping[str, object]) -> None:
    """Print ``key = value`` lines, the same shape the config files use."""
    for key, value in settings.items():
        print(f"{key} = {value}")


def command_seed(args: argparse.Namespace) -> int:
    return 0 if args.seed is None else args.seed


def load_dataset(args: argparse.Namespace, seed: int) -> Dataset:
    """Dataset named by ``--data``, ``--preset`` or ``--mnist``.

    Presets draw from stream ``(seed, "data")``; an MNIST subset from
    ``(seed, "subset")``.

    Raises:
        ConfigError: No MNIST directory is configured.
        DataError: The dataset cannot be read.

    """
    if args.data is not None:
        return read_dataset_csv(args.data)

    if args.preset is not None:
        return gen_gaussian_2d(PRESETS[args.preset], derive_rng(seed, "data"))

    if args.mnist < 0:
        raise ConfigError(f"--mnist expects N >= 0, got {args.mnist}")

    directory = Path(args.mnist_dir) if args.mnist_dir else mnist_dir()
    if directory is None:
        raise ConfigError(
            "--mnist needs --mnist-dir or the ORAT_MNIST_DIR environment variable",
        )

    images_name, labels_name = _MNIST_FILES[args.mnist_split]
    ds = load_idx(_idx_path(directory, images_name), _idx_path(directory, labels_name))
    if 0 < args.mnist < ds.n:
        ds = take_subset(ds, args.mnist, derive_rng(seed, "subset"))

    return ds


def _idx_path(directory: Path, name: str) -> Path:
    for candidate in (directory / name, directory / f"{name}.gz"):
        if candidate.is_file():
            return candidate

    raise DataError(f"{name}[.gz] not found in {directory}")


def noise_spec(args: argparse.Namespace) -> NoiseSpec:
    try:
        kind = parse_enum(NoiseKind, args.noise)
    except ValueError as e:
        raise ConfigError(str(e)) from None

    flip_map = FLIP_MAP_BY_NAME[args.flip_map] if kind == NoiseKind.ASYMMETRIC else None

    return NoiseSpec(kind=kind, gamma=args.gamma, flip_map=flip_map)


def load_training_data(
        args: argparse.Namespace,
        seed: int,
) -> tuple[Dataset, NoiseSpec]:
    """Dataset with the requested label noise drawn from stream ``(seed, "noise")``."""
    spec = noise_spec(args)
    ds = apply_noise(load_dataset(args, seed), spec, derive_rng(seed, "noise"))

    return ds, spec


def config_overrides(args: argparse.Namespace) -> dict[str, str]:
    """Config entries for the training flags actually given on the command line."""
    overrides = {}
    for dest, key in TRAINING_FLAG_KEYS.items():
        value = getattr(args, dest, None)
        if value is not None:
            overrides[key] = value if isinstance(value, str) else repr(value)

    return overrides


def build_config(
        args: argparse.Namespace,
        defaults: Mapping[str, str] | None = None,
) -> ORATConfig:
    """Defaults < ``defaults`` < config file < flags."""
    entries = dict(defaults or {})
    if args.config is not None:
        entries.update(read_key_value_file(args.config))

    entries.update(config_overrides(args))

    return ORATConfig.from_mapping(entries)


def _data_settings(
        args: argparse.Namespace,
        spec: NoiseSpec,
        ds: Dataset,
) -> dict[str, object]:
    if args.data is not None:
        source = f"csv:{args.data}"
    elif args.preset is not None:
        source = f"preset:{args.preset}"
    else:
        source = f"mnist-{args.mnist_split}:{args.mnist}"

    settings: dict[str, object] = {
        "data": source,
        "n": ds.n,
        "dim": ds.dim,
        "num_classes": ds.num_classes,
        "noise": spec.kind.value,
        "gamma": repr(spec.gamma),
    }
    if spec.kind == NoiseKind.ASYMMETRIC:
        settings["flip_map"] = args.flip_map

    return settings


# ==================== COMMANDS ====================
def cmd_gen_data(args: argparse.Namespace) -> int:
    """Write a synthetic or noise-corrupted dataset CSV; prints its corruption rate."""
    seed = command_seed(args)
    ds, spec = load_training_data(args, seed)

    print_settings({"seed": seed, **_data_settings(args, spec, ds), "out": args.out})
    path = write_dataset_csv(args.out, ds)

    rate = format_percent(ds.corruption_rate)
    print(f"corruption rate = {rate} ({int(ds.corrupted.sum())} of {ds.n})")
    logger.info("Dataset written to %s.", path)

    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    """Train one model; writes ``model.npz``, ``history.csv`` and ``config.conf``."""
    config = build_config(args)
    ds, spec = load_training_data(args, config.seed)
    config = config.resolve(ds.n)

    out_dir = Path(args.out) if args.out else DEFAULT_OUTPUT_DIR / config.mode.value
    print_settings({
        **config.to_mapping(),
        **_data_settings(args, spec, ds),
        "out": out_dir,
    })

    ctx = build_training_context(config)
    result = ctx.trainer.train(ds)

    metadata = {
        "mode": config.mode.value,
        "noise_kind": spec.kind.value,
        "gamma": repr(spec.gamma),
        "epsilon": repr(config.attack.epsilon),
        "k": str(config.k),
        "m": str(config.m),
        "seed": str(config.seed),
    }
    save_checkpoint(out_dir / "model.npz", result.params, metadata)
    write_history_csv(out_dir / "history.csv", result.history)
    _write_config(out_dir / "config.conf", config.to_mapping())

    last = result.history.last
    if last is not None:
        print(
            f"final objective = {last.objective!r}, "
            f"train accuracy = {format_percent(last.train_acc)}, "
            f"lambda = {last.lambda_!r}, lambda_hat = {last.lambda_hat!r}",
        )
    logger.info(
        "Training finished in %s; outputs in %s.",
        format_duration(ctx.progress.elapsed()), out_dir,
    )

    return EXIT_OK


def _write_config(path: Path, entries: Mapping[str, str]) -> None:
    try:
        text = "".join(f"{key} = {value}\n" for key, value in entries.items())
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise DataError(f"cannot write config {path}: {e}") from e


def eval_attacks(args: argparse.Namespace, epsilon: float) -> tuple[AttackConfig, ...]:
    """Attacks requested by ``--attack``; ``all`` is natural, FGSM and PGD."""
    pgd = AttackConfig.pgd(
        epsilon, args.pgd_steps, alpha=args.alpha, random_start=args.random_start,
    )
    if args.attack == "all":
        natural, fgsm, _ = standard_attacks(epsilon)
        return natural, fgsm, pgd

    kind = AttackKind(args.attack)
    if kind == AttackKind.NONE:
        return (AttackConfig.none(),)

    if kind == AttackKind.FGSM:
        return (AttackConfig.fgsm(epsilon),)

    return (pgd,)


def cmd_eval(args: argparse.Namespace) -> int:
    """Evaluate a checkpoint; prints one summary line and writes the report CSV."""
    params, metadata = load_checkpoint(args.checkpoint)
    seed = args.seed if args.seed is not None else int(metadata.get("seed", "0"))
    ds = load_dataset(args, seed)

    epsilon = args.epsilon
    if epsilon is None:
        epsilon = float(metadata.get("epsilon", "0.0"))
    attacks = eval_attacks(args, epsilon)
    defense = args.defense or metadata.get("mode", "unknown")
    out = Path(args.out) if args.out else Path(args.checkpoint).with_name("report.csv")

    print_settings({
        "checkpoint": args.checkpoint,
        "seed": seed,
        "defense": defense,
        "epsilon": repr(epsilon),
        "attacks": ", ".join(attack.describe() for attack in attacks),
        "n": ds.n,
        "out": out,
    })

    report = evaluate_model(
        params,
        ds,
        attacks,
        seed=seed,
        defense=defense,
        noise_kind=metadata.get("noise_kind", NoiseKind.NONE.value),
        gamma=float(metadata.get("gamma", "0.0")),
    )
    write_report_csv(out, report)
    print(format_summary(report))

    return EXIT_OK


def cmd_grid_search(args: argparse.Namespace) -> int:
    """Select (k, m) on a held-out split; writes the ranked table CSV."""
    # k and m come from the grid, so the base config need not set them
    config = build_config(args, defaults={"k": "none", "m": "none"})
    k_grid = parse_int_list("k-grid", args.k_grid)
    m_grid = parse_int_list("m-grid", args.m_grid)
    if not 0 < args.holdout < 1:
        raise ConfigError(f"--holdout must lie in (0, 1), got {args.holdout}")

    if args.workers < 1:
        raise ConfigError(f"--workers must be >= 1, got {args.workers}")

    ds, spec = load_training_data(args, config.seed)
    holdout_rng = derive_rng(config.seed, "holdout")
    ds_train, ds_val = holdout_split(ds, args.holdout, holdout_rng)
    out = Path(args.out) if args.out else DEFAULT_OUTPUT_DIR / "grid.csv"

    print_settings({
        **config.to_mapping(),
        **_data_settings(args, spec, ds),
        "k_grid": args.k_grid,
        "m_grid": args.m_grid,
        "n_train": ds_train.n,
        "n_val": ds_val.n,
        "workers": args.workers,
        "out": out,
    })

    result = grid_search_km(
        config, k_grid, m_grid, ds_train, ds_val, workers=args.workers,
    )
    if result.best is None:
        raise ConfigError(f"no valid (k, m) pair for n_train = {ds_train.n}")

    write_grid_csv(out, result)
    for row in result.rows:
        print(
            f"k={row.k:<6} m={row.m:<6} val_acc={format_percent(row.val_accuracy)} "
            f"val_robust_acc={format_percent(row.val_robust_accuracy)}",
        )
    print(f"best: k = {result.best.k}, m = {result.best.m}")

    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Run the oracle suite; any failed check raises ``VerificationError``."""
    seed = command_seed(args)
    if args.trials < 1 or args.nmax < 1:
        raise ConfigError(
            f"--trials and --nmax must be >= 1, got {args.trials}, {args.nmax}",
        )

    print_settings({
        "seed": seed,
        "trials": args.trials,
        "nmax": args.nmax,
        "out": args.out or "-",
    })

    report = run_oracle_suite(trials=args.trials, seed=seed, n_max=args.nmax)
    for line in report.summary_lines():
        print(line)

    if args.out:
        write_oracle_csv(args.out, report)

    if not report.passed:
        raise VerificationError(f"failed checks: {', '.join(report.failed_checks)}")

    print(f"all {len(report.results)} checks passed")

    return EXIT_OK


COMMANDS: dict[str, Callable[[argparse.Namespace], int]] = {
    "gen-data": cmd_gen_data,
    "train": cmd_train,
    "eval": cmd_eval,
    "grid-search": cmd_grid_search,
    "verify": cmd_verify,
}
