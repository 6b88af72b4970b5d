from .config import CONFIG_KEYS, REQUIRED_KEYS, ORATConfig
from .grid_search import (
    CellOutcome,
    CellSkipped,
    CellTrained,
    GridRow,
    GridSearchResult,
    cell_seed,
    default_eval_attack,
    grid_pairs,
    grid_search_km,
    write_grid_csv,
)
from .history import TrainHistory, read_history_csv, write_history_csv
from .trainer import ORATTrainer, TrainResult, train

__all__ = [
    # config.py
    "CONFIG_KEYS",
    "REQUIRED_KEYS",
    "ORATConfig",

    # grid_search.py
    "CellOutcome",
    "CellSkipped",
    "CellTrained",
    "GridRow",
    "GridSearchResult",
    "cell_seed",
    "default_eval_attack",
    "grid_pairs",
    "grid_search_km",
    "write_grid_csv",

    # history.py
    "TrainHistory",
    "read_history_csv",
    "write_history_csv",

    # trainer.py
    "ORATTrainer",
    "TrainResult",
    "train",
]
