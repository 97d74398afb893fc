"""
Model Weights
MAE-derived voting weights and performance-rank weights, kept as exact rationals
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

from ..errors import FusionError

WEIGHT_FLOOR = Fraction(1, 10**6)


def exact_decimal(value: float) -> Fraction:
    """Rational value of the decimal text of `value` (0.43 -> 43/100)"""
    return Fraction(repr(float(value)))


@dataclass(frozen=True)
class ModelWeights:
    """
    Per-model weights for the weighted and rank votes

    W is max(1 - mae, 1e-6); R ranks the models with 1 for the largest mae;
    RW = R / sum(R). Empty tuples mean that part was not derived.
    """
    names: Tuple[str, ...]
    mae: Tuple[float, ...]
    W: Tuple[float, ...] = ()
    R: Tuple[int, ...] = ()
    RW: Tuple[float, ...] = ()
    W_exact: Tuple[Fraction, ...] = ()
    RW_exact: Tuple[Fraction, ...] = ()

    @property
    def k(self) -> int:
        return len(self.mae)

    @property
    def total_W(self) -> float:
        return float(sum(self.W_exact))


def _check_mae(mae: Sequence[float]) -> Tuple[float, ...]:
    values = tuple(float(value) for value in mae)
    if not values:
        raise FusionError("At least one model's mae is required")
    for value in values:
        if not math.isfinite(value) or value < 0:
            raise FusionError(f"mae must be finite and >= 0, got {value}")
    return values


def _names(names: Optional[Sequence[str]], k: int) -> Tuple[str, ...]:
    if names is None:
        return tuple(f"M{j}" for j in range(1, k + 1))
    if len(names) != k:
        raise FusionError(f"{len(names)} model names for {k} mae values")
    return tuple(names)


def weights_from_mae(mae: Sequence[float], names: Optional[Sequence[str]] = None) -> ModelWeights:
    """W_j = 1 - mae_j, floored at 1e-6"""
    values = _check_mae(mae)
    exact = tuple(max(1 - exact_decimal(value), WEIGHT_FLOOR) for value in values)
    return ModelWeights(
        names=_names(names, len(values)),
        mae=values,
        W=tuple(float(w) for w in exact),
        W_exact=exact,
    )


def rank_weights(mae: Sequence[float], names: Optional[Sequence[str]] = None) -> ModelWeights:
    """Rank 1 to the largest mae, k to the smallest; equal maes rank by registration order"""
    values = _check_mae(mae)
    k = len(values)
    order = sorted(range(k), key=lambda j: (-exact_decimal(values[j]), j))
    ranks = [0] * k
    for position, j in enumerate(order, start=1):
        ranks[j] = position

    total = k * (k + 1) // 2
    exact = tuple(Fraction(r, total) for r in ranks)
    return ModelWeights(
        names=_names(names, k),
        mae=values,
        R=tuple(ranks),
        RW=tuple(float(rw) for rw in exact),
        RW_exact=exact,
    )


def derive_weights(names: Sequence[str], mae: Sequence[float]) -> ModelWeights:
    """All weight parts for the named models"""
    weighted = weights_from_mae(mae, names)
    ranked = rank_weights(mae, names)
    return ModelWeights(
        names=weighted.names,
        mae=weighted.mae,
        W=weighted.W,
        R=ranked.R,
        RW=ranked.RW,
        W_exact=weighted.W_exact,
        RW_exact=ranked.RW_exact,
    )
