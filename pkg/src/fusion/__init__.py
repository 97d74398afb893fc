"""
Fusion Module
Voting rules over a panel's binary verdicts and the dual fusion of their results
"""

from .votes import (
    CONSENSUS,
    MAJORITY,
    WEIGHTED,
    RANK,
    METHODS,
    VOTING_METHODS,
    VoteMatrix,
    VoteOutcome,
    build_vote_matrix,
)
from .weights import ModelWeights, weights_from_mae, rank_weights, derive_weights, exact_decimal
from .voting import (
    consensus,
    majority_vote,
    weighted_average_vote,
    rank_vote,
    fuse_counts,
    weighted_shares,
    rank_shares,
)
from .dual import FusionResult, ProvenanceEntry, dual_fusion, pairwise_agreement
from .fixtures import load_vote_table, labels_from_vote_table, load_mae_table

__all__ = [
    'CONSENSUS', 'MAJORITY', 'WEIGHTED', 'RANK', 'METHODS', 'VOTING_METHODS',
    'VoteMatrix', 'VoteOutcome', 'build_vote_matrix',
    'ModelWeights', 'weights_from_mae', 'rank_weights', 'derive_weights', 'exact_decimal',
    'consensus', 'majority_vote', 'weighted_average_vote', 'rank_vote', 'fuse_counts',
    'weighted_shares', 'rank_shares',
    'FusionResult', 'ProvenanceEntry', 'dual_fusion', 'pairwise_agreement',
    'load_vote_table', 'labels_from_vote_table', 'load_mae_table',
]
