"""
Vote Matrix
Candidate instants by models grid of binary verdicts
"""

from dataclasses import dataclass
from typing import Mapping, NamedTuple, Optional, Tuple

import numpy as np

from ..detectors import LabelSeries
from ..errors import FusionError

CONSENSUS = "consensus"
MAJORITY = "majority"
WEIGHTED = "weighted"
RANK = "rank"

METHODS = (CONSENSUS, MAJORITY, WEIGHTED, RANK)
VOTING_METHODS = (MAJORITY, WEIGHTED, RANK)


class VoteOutcome(NamedTuple):
    """Anomalous instants selected by one rule and their count"""
    anomalies: np.ndarray
    count: int


@dataclass(frozen=True)
class VoteMatrix:
    """Votes of k models on n_c candidate instants, rows sorted by time"""
    candidate_timestamps: np.ndarray
    model_names: Tuple[str, ...]
    votes: np.ndarray

    def __post_init__(self):
        timestamps = np.asarray(self.candidate_timestamps).astype("datetime64[ms]")
        names = tuple(str(name) for name in self.model_names)
        votes = np.asarray(self.votes, dtype=np.int8).reshape(timestamps.shape[0], len(names))

        if not names:
            raise FusionError("A vote matrix needs at least one model")
        if len(set(names)) != len(names):
            raise FusionError(f"Duplicate model names: {list(names)}")
        if not np.isin(votes, (0, 1)).all():
            raise FusionError("Votes must be 0 or 1")
        if votes.shape[0] and not votes.any(axis=1).all():
            raise FusionError("Every candidate row needs at least one vote")
        if timestamps.shape[0] > 1 and not np.all(timestamps[1:] > timestamps[:-1]):
            raise FusionError("Candidate timestamps must be strictly increasing")

        timestamps.setflags(write=False)
        votes.setflags(write=False)
        object.__setattr__(self, "candidate_timestamps", timestamps)
        object.__setattr__(self, "model_names", names)
        object.__setattr__(self, "votes", votes)

    @property
    def k(self) -> int:
        return len(self.model_names)

    def __len__(self) -> int:
        return int(self.votes.shape[0])

    def __eq__(self, other) -> bool:
        if not isinstance(other, VoteMatrix):
            return NotImplemented
        return (
            self.model_names == other.model_names
            and np.array_equal(self.candidate_timestamps, other.candidate_timestamps)
            and np.array_equal(self.votes, other.votes)
        )

    def select(self, mask: np.ndarray) -> VoteOutcome:
        anomalies = self.candidate_timestamps[np.asarray(mask, dtype=bool)]
        return VoteOutcome(anomalies, int(anomalies.shape[0]))


def build_vote_matrix(labels: Mapping[str, LabelSeries], exclude: Optional[np.ndarray] = None) -> VoteMatrix:
    """
    Stack per-model labels into candidate rows

    Candidates are the instants any model labels 1, minus `exclude`. Model order
    follows the mapping's order.
    """
    if not labels:
        raise FusionError("At least one model's labels are required")

    names = tuple(labels)
    grid = labels[names[0]].timestamps
    for name in names[1:]:
        if not np.array_equal(labels[name].timestamps, grid):
            raise FusionError(f"Label series of '{name}' is on a different timestamp grid than '{names[0]}'")

    votes = np.column_stack([labels[name].labels for name in names]).astype(np.int8)
    keep = votes.any(axis=1)
    if exclude is not None and len(exclude):
        keep &= ~np.isin(grid, np.asarray(exclude).astype("datetime64[ms]"))

    order = np.argsort(grid[keep], kind="stable")
    return VoteMatrix(grid[keep][order], names, votes[keep][order])
