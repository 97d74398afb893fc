"""
Early stopping on validation loss
"""

import copy
import logging
from typing import Any, Optional

import numpy as np


class EarlyStopping:
    """Tracks the best validation loss and signals a stop after `patience` epochs without improvement"""

    def __init__(self, patience: int = 5):
        self.patience = patience
        self.best_valid = np.inf
        self.best_valid_epoch = 0
        self.best_state: Optional[Any] = None
        self.wait = 0
        self.logger = logging.getLogger(__name__)

    def __call__(self, epoch: int, valid_loss: float, state: Any) -> bool:
        """Record one epoch; returns True when training should stop"""
        if valid_loss < self.best_valid:
            self.best_valid = valid_loss
            self.best_valid_epoch = epoch
            self.best_state = copy.deepcopy(state)
            self.wait = 0
            return False

        self.wait += 1
        if self.wait >= self.patience:
            self.logger.debug(
                f"Early stopping at epoch {epoch}; best valid loss {self.best_valid:.6f} at epoch {self.best_valid_epoch}"
            )
            return True
        return False
