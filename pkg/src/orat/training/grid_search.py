import csv
import logging
from collections.abc import Iterable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

from orat.attacks import AttackConfig
from orat.core import AttackKind, ConfigError, DataError, TrainMode
from orat.core.constants import DEFAULT_EVAL_PGD_STEPS, GRID_CSV_HEADER
from orat.data import Dataset
from orat.evaluation.metrics import accuracy, robust_accuracy
from orat.losses import RankRange
from orat.utils import Rng, derive_rng, derive_seed, format_float, spawn_seed

from .config import ORATConfig
from .trainer import ORATTrainer

logger = logging.getLogger(__name__)


# ==================== OUTCOMES ====================
@dataclass(frozen=True)
class GridRow:
    k: int
    m: int
    val_accuracy: float
    val_robust_accuracy: float


@dataclass(frozen=True)
class CellTrained:
    row: GridRow


@dataclass(frozen=True)
class CellSkipped:
    k: int
    m: int
    reason: str


type CellOutcome = CellTrained | CellSkipped


@dataclass(frozen=True)
class GridSearchResult:
    """Trained rows, best validation robust accuracy first (grid order on ties)."""

    rows: tuple[GridRow, ...]
    skipped: tuple[CellSkipped, ...] = field(default_factory=tuple)

    @property
    def best(self) -> GridRow | None:
        return self.rows[0] if self.rows else None


# ==================== SEARCH ====================
def cell_seed(root_seed: int, k: int, m: int) -> int:
    """Seed of the (k, m) cell; cells never share a stream."""
    return derive_seed(root_seed, "grid", k, m)


def default_eval_attack(train_attack: AttackConfig) -> AttackConfig:
    """PGD^20 at the training radius with step ε/4 and a random start.

    Natural accuracy when the training attack is none.
    """
    if train_attack.kind == AttackKind.NONE or train_attack.epsilon == 0:
        return AttackConfig.none()

    return AttackConfig.pgd(train_attack.epsilon, DEFAULT_EVAL_PGD_STEPS)


def grid_pairs(k_grid: Iterable[int], m_grid: Iterable[int]) -> list[tuple[int, int]]:
    """Cartesian product in (k outer, m inner) order with duplicates removed."""
    m_values = list(m_grid)
    return list(dict.fromkeys((k, m) for k in k_grid for m in m_values))


def grid_search_km(
        base: ORATConfig,
        k_grid: Iterable[int],
        m_grid: Iterable[int],
        ds_train: Dataset,
        ds_val: Dataset,
        rng: Rng | None = None,
        *,
        eval_attack: AttackConfig | None = None,
        workers: int = 1,
) -> GridSearchResult:
    """Train one model per valid (k, m) and rank by validation robust accuracy.

    The (n, 0) cell is trained as plain adversarial training. Invalid pairs are
    skipped with a warning rather than aborting the search.

    Args:
        base: Shared training settings; its mode, k and m are replaced per cell.
        k_grid: Candidate k values.
        m_grid: Candidate m values.
        ds_train: Training split.
        ds_val: Validation split.
        rng: Root stream; when omitted, ``base.seed`` is the root seed.
        eval_attack: Validation attack; defaults to
            ``default_eval_attack(base.attack)``.
        workers: Cells trained concurrently on a thread pool.

    """
    root = base.seed if rng is None else spawn_seed(rng)
    attack = eval_attack or default_eval_attack(base.attack)

    def run_cell(pair: tuple[int, int]) -> CellOutcome:
        k, m = pair
        try:
            RankRange(k, m, ds_train.n)
        except ConfigError as e:
            logger.warning("Skipping grid cell k=%d, m=%d: %s", k, m, e)
            return CellSkipped(k, m, str(e))

        seed = cell_seed(root, k, m)
        mode = TrainMode.AT if (k, m) == (ds_train.n, 0) else TrainMode.ORAT
        config = replace(base, mode=mode, k=k, m=m, seed=seed)

        result = ORATTrainer(config).train(ds_train)
        row = GridRow(
            k=k,
            m=m,
            val_accuracy=accuracy(result.params, ds_val),
            val_robust_accuracy=robust_accuracy(
                result.params, ds_val, attack, derive_rng(seed, "validation"),
            ),
        )
        logger.info(
            "Grid cell k=%d, m=%d: val_acc=%.4f val_robust_acc=%.4f",
            k, m, row.val_accuracy, row.val_robust_accuracy,
        )

        return CellTrained(row)

    pairs = grid_pairs(k_grid, m_grid)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="grid") as pool:
            outcomes = list(pool.map(run_cell, pairs))
    else:
        outcomes = [run_cell(pair) for pair in pairs]

    rows = [outcome.row for outcome in outcomes if isinstance(outcome, CellTrained)]
    skipped = tuple(outcome for outcome in outcomes if isinstance(outcome, CellSkipped))

    return GridSearchResult(
        rows=tuple(sorted(rows, key=lambda row: -row.val_robust_accuracy)),
        skipped=skipped,
    )


# ==================== CSV ====================
def write_grid_csv(path: str | Path, result: GridSearchResult) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="", encoding="utf-8") as file:
            writer = csv.writer(file, lineterminator="\n")
            writer.writerow(GRID_CSV_HEADER)
            for row in result.rows:
                writer.writerow([
                    row.k,
                    row.m,
                    format_float(row.val_accuracy),
                    format_float(row.val_robust_accuracy),
                ])
    except OSError as e:
        raise DataError(f"cannot write grid table {path}: {e}") from e

    return path
