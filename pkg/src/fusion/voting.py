"""
Voting Rules
Consensus, strict majority, MAE-weighted and rank-weighted votes, and the fusion of their counts
"""

import logging
from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np

from ..errors import FusionError
from .votes import MAJORITY, VOTING_METHODS, WEIGHTED, VoteMatrix, VoteOutcome
from .weights import ModelWeights

logger = logging.getLogger(__name__)


def consensus(votes: VoteMatrix) -> VoteOutcome:
    """Instants every model votes for"""
    return votes.select(votes.votes.all(axis=1))


def majority_vote(votes: VoteMatrix) -> VoteOutcome:
    """Instants more than half of the models vote for"""
    return votes.select(2 * votes.votes.sum(axis=1, dtype=np.int64) > votes.k)


def _check_part(votes: VoteMatrix, part: Tuple, label: str) -> None:
    if len(part) != votes.k:
        raise FusionError(f"{label} weights cover {len(part)} models, vote matrix has {votes.k}")


def _support(votes: VoteMatrix, weights: Sequence[Fraction]) -> list:
    return [sum((w for w, v in zip(weights, row) if v), Fraction(0)) for row in votes.votes]


def weighted_shares(votes: VoteMatrix, weights: ModelWeights) -> np.ndarray:
    """Per-row weighted mean of votes, sum(W_j v_j) / sum(W)"""
    _check_part(votes, weights.W_exact, "W")
    total = sum(weights.W_exact)
    return np.array([float(s / total) for s in _support(votes, weights.W_exact)], dtype=np.float64)


def rank_shares(votes: VoteMatrix, weights: ModelWeights) -> np.ndarray:
    """Per-row sum of rank weights of the models voting 1"""
    _check_part(votes, weights.RW_exact, "RW")
    return np.array([float(s) for s in _support(votes, weights.RW_exact)], dtype=np.float64)


def weighted_average_vote(votes: VoteMatrix, weights: ModelWeights) -> VoteOutcome:
    """Instants whose weighted vote share strictly exceeds one half"""
    _check_part(votes, weights.W_exact, "W")
    total = sum(weights.W_exact)
    support = _support(votes, weights.W_exact)
    return votes.select(np.array([2 * s > total for s in support], dtype=bool))


def rank_vote(votes: VoteMatrix, weights: ModelWeights) -> VoteOutcome:
    """Instants whose rank-weighted vote strictly exceeds one half"""
    _check_part(votes, weights.RW_exact, "RW")
    support = _support(votes, weights.RW_exact)
    return votes.select(np.array([2 * s > 1 for s in support], dtype=bool))


def fuse_counts(n1: int, n2a: int, n2b: int) -> Tuple[int, str]:
    """
    Majority of the three voting counts

    Two equal counts win, preferring the earlier method (majority, weighted,
    rank); when all three differ the median is taken.

    Returns:
        (N_b, name of the method whose set is selected)
    """
    counts = (int(n1), int(n2a), int(n2b))
    if min(counts) < 0:
        raise FusionError(f"Voting counts must be >= 0, got {counts}")

    if counts[0] == counts[1] or counts[0] == counts[2]:
        return counts[0], MAJORITY
    if counts[1] == counts[2]:
        return counts[1], WEIGHTED

    median = sorted(counts)[1]
    method = VOTING_METHODS[counts.index(median)]
    logger.info(f"Voting counts {counts} all differ; using the median {median} from {method}")
    return median, method

