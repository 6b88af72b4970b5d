from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from orat.core import ConfigError, DimensionError
from orat.core.constants import TIE_TOLERANCE

type Values = NDArray[np.float64]


# ==================== TYPES ====================
@dataclass(frozen=True)
class LossVector:
    """Per-sample non-negative losses over a batch or a whole dataset."""

    values: Values

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size == 0:
            raise DimensionError(
                f"a loss vector must be 1-D and non-empty, got shape {values.shape}",
            )

        if not np.isfinite(values).all() or (values < 0).any():
            raise ConfigError("losses must be finite and non-negative")

        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self) -> int:
        return int(self.values.size)

    @classmethod
    def of(cls, values: "LossVector | ArrayLike") -> "LossVector":
        return values if isinstance(values, LossVector) else cls(np.asarray(values))


@dataclass(frozen=True)
class RankRange:
    """Ranked range ``(m, k]`` of an n-sample loss vector.

    Drops the m largest and the n−k smallest losses.
    """

    k: int
    m: int
    n: int

    def __post_init__(self) -> None:
        if not 0 <= self.m < self.k <= self.n:
            raise ConfigError(
                "rank range needs 0 <= m < k <= n, "
                f"got k={self.k}, m={self.m}, n={self.n}",
            )

    @property
    def width(self) -> int:
        return self.k - self.m


# ==================== SORT-BASED ====================
def descending(losses: LossVector) -> Values:
    """Losses in descending order; ties keep ascending original index."""
    order = np.argsort(-losses.values, kind="stable")
    return losses.values[order]


def topk_sum_sorted(losses: LossVector, k: int) -> float:
    """Sum of the k largest losses."""
    check_k(k, losses.n)
    return float(descending(losses)[:k].sum())


def aorr(losses: LossVector, rank_range: RankRange) -> float:
    """Average of ranked range: mean of the (m+1)-th through k-th largest losses."""
    check_range(rank_range, losses.n)
    ranked = descending(losses)
    return float(ranked[rank_range.m:rank_range.k].sum() / rank_range.width)


# ==================== VARIATIONAL ====================
def topk_sum_variational(losses: LossVector, k: int) -> tuple[float, float]:
    """Top-k sum as ``min_λ {kλ + Σ[s_i − λ]_+}``, over the candidates ``{s_i} ∪ {0}``.

    Returns:
        The minimum and its minimizer. Among tied minimizers the largest candidate
        is returned, which is always the k-th largest loss.

    """
    check_k(k, losses.n)
    return scan_topk_objective(losses.values, k)


def bottom_sum_variational(losses: LossVector, m: int) -> tuple[float, float]:
    """Sum of all but the m largest losses as ``max_λ {(n−m)λ − Σ[λ − s_i]_+}``.

    Returns:
        The maximum and its maximizer (largest tied candidate; the m-th largest
        loss when m ≥ 1, the largest loss when m = 0).

    """
    n = losses.n
    if not 0 <= m < n:
        raise ConfigError(f"m must satisfy 0 <= m < n={n}, got {m}")

    candidates = np.unique(losses.values)
    gaps = candidates[:, None] - losses.values[None, :]
    shortfall = np.maximum(gaps, 0.0).sum(axis=1)
    objective = (n - m) * candidates - shortfall

    return pick_optimum(candidates, objective, maximize=True)


def scan_topk_objective(values: Values, k: int) -> tuple[float, float]:
    """``min_λ {kλ + Σ[s_i − λ]_+}`` over ``{s_i} ∪ {0}``; k = 0 is allowed."""
    candidates = np.unique(np.append(values, 0.0))
    excess = np.maximum(values[None, :] - candidates[:, None], 0.0).sum(axis=1)
    objective = k * candidates + excess

    return pick_optimum(candidates, objective, maximize=False)


def pick_optimum(
        candidates: Values,
        objective: Values,
        *,
        maximize: bool,
) -> tuple[float, float]:
    """Best objective value and the largest candidate attaining it.

    Candidates within ``TIE_TOLERANCE`` (relative) of the optimum count as tied,
    so round-off in piecewise-linear plateaus cannot change the choice.
    """
    best = float(objective.max() if maximize else objective.min())
    slack = TIE_TOLERANCE * max(1.0, abs(best))
    tied = objective >= best - slack if maximize else objective <= best + slack

    return best, float(candidates[tied].max())


# -- Validation --
def check_k(k: int, n: int) -> None:
    if not 1 <= k <= n:
        raise ConfigError(f"k must satisfy 1 <= k <= n={n}, got {k}")


def check_range(rank_range: RankRange, n: int) -> None:
    if rank_range.n != n:
        raise DimensionError(
            f"rank range is for n={rank_range.n} but {n} losses were given",
        )
