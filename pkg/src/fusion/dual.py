"""
Dual Fusion
Consensus anomalies plus the agreed outcome of three voting rules over the remaining candidates
"""

import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Mapping, Tuple

import numpy as np

from ..detectors import LabelSeries
from ..errors import FusionError
from .votes import CONSENSUS, MAJORITY, METHODS, RANK, WEIGHTED, VoteMatrix, build_vote_matrix
from .voting import consensus, fuse_counts, majority_vote, rank_vote, weighted_average_vote
from .weights import ModelWeights, derive_weights

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ProvenanceEntry:
    """Which methods and models flagged one instant"""
    timestamp: np.datetime64
    methods: Tuple[str, ...]
    models: Tuple[str, ...]
    support: int
    in_final: bool


@dataclass(frozen=True, eq=False)
class FusionResult:
    """Every method's anomaly set, the fused counts and the final set"""
    model_names: Tuple[str, ...]
    weights: ModelWeights
    consensus_set: np.ndarray
    majority_set: np.ndarray
    weighted_set: np.ndarray
    rank_set: np.ndarray
    n_b: int
    selected_method: str
    final_anomaly_set: np.ndarray
    provenance: Tuple[ProvenanceEntry, ...] = ()
    agreement: Dict[Tuple[str, str], float] = field(default_factory=dict)

    @property
    def n_a(self) -> int:
        return int(self.consensus_set.shape[0])

    @property
    def n_b1(self) -> int:
        return int(self.majority_set.shape[0])

    @property
    def n_b2a(self) -> int:
        return int(self.weighted_set.shape[0])

    @property
    def n_b2b(self) -> int:
        return int(self.rank_set.shape[0])

    @property
    def n(self) -> int:
        return self.n_a + self.n_b

    def method_set(self, method: str) -> np.ndarray:
        return {
            CONSENSUS: self.consensus_set,
            MAJORITY: self.majority_set,
            WEIGHTED: self.weighted_set,
            RANK: self.rank_set,
        }[method]


def pairwise_agreement(labels: Mapping[str, LabelSeries]) -> Dict[Tuple[str, str], float]:
    """Jaccard overlap of the anomaly sets of every model pair; 1.0 when both are empty"""
    agreement = {}
    for a, b in combinations(labels, 2):
        first, second = labels[a].anomalies, labels[b].anomalies
        union = np.union1d(first, second).shape[0]
        shared = np.intersect1d(first, second).shape[0]
        agreement[(a, b)] = 1.0 if union == 0 else shared / union
    return agreement


def _provenance(full: VoteMatrix, sets: Dict[str, np.ndarray], final: np.ndarray) -> Tuple[ProvenanceEntry, ...]:
    flagged = np.unique(np.concatenate([sets[method] for method in METHODS]))
    rows = np.searchsorted(full.candidate_timestamps, flagged)
    entries = []
    for instant, row in zip(flagged, rows):
        voters = full.votes[row]
        entries.append(ProvenanceEntry(
            timestamp=instant,
            methods=tuple(method for method in METHODS if np.isin(instant, sets[method])),
            models=tuple(name for name, vote in zip(full.model_names, voters) if vote),
            support=int(voters.sum()),
            in_final=bool(np.isin(instant, final)),
        ))
    return tuple(entries)


def dual_fusion(labels: Mapping[str, LabelSeries], mae: Mapping[str, float]) -> FusionResult:
    """
    Fuse per-model labels into the final anomaly set

    Consensus runs over every candidate; the three voting rules run over the
    candidates left after removing consensus instants, so N = N_a + N_b counts
    distinct instants.

    Args:
        labels: Per-model label series on one timestamp grid, in registration order
        mae: Per-model held-out MAE, keyed by model name

    Returns:
        FusionResult with every method's set, the fused counts and provenance
    """
    names = tuple(labels)
    missing = [name for name in names if name not in mae]
    if missing:
        raise FusionError(f"No mae for models {missing}")

    full = build_vote_matrix(labels)
    agreed = consensus(full)
    stage_b = build_vote_matrix(labels, exclude=agreed.anomalies)

    weights = derive_weights(names, [mae[name] for name in names])
    majority = majority_vote(stage_b)
    weighted = weighted_average_vote(stage_b, weights)
    ranked = rank_vote(stage_b, weights)

    n_b, selected = fuse_counts(majority.count, weighted.count, ranked.count)
    sets = {
        CONSENSUS: agreed.anomalies,
        MAJORITY: majority.anomalies,
        WEIGHTED: weighted.anomalies,
        RANK: ranked.anomalies,
    }
    final = np.union1d(agreed.anomalies, sets[selected])

    result = FusionResult(
        model_names=names,
        weights=weights,
        consensus_set=agreed.anomalies,
        majority_set=majority.anomalies,
        weighted_set=weighted.anomalies,
        rank_set=ranked.anomalies,
        n_b=n_b,
        selected_method=selected,
        final_anomaly_set=final,
        provenance=_provenance(full, sets, final),
        agreement=pairwise_agreement(labels),
    )
    logger.info(
        f"Dual fusion over {len(names)} models: N_a={result.n_a}, "
        f"N_b=({result.n_b1}, {result.n_b2a}, {result.n_b2b}) -> {n_b} via {selected}, N={result.n}"
    )
    return result
