"""
Window Linear Autoencoder
Linear encode/decode of flattened windows trained with Adam on MSE, with early stopping
"""

import math
from typing import Dict, Optional, Tuple

import numpy as np
import torch
from torch import nn

from ..errors import DetectorError
from ..timeseries import TimeSeries
from .base import LossHistory, ReconstructionDetector, WINDOW_LINEAR_AUTOENCODER, sliding_windows
from .training import EarlyStopping


class WindowAutoencoder(nn.Module):
    """d -> latent -> d linear bottleneck"""

    def __init__(self, dim: int, latent: int):
        super().__init__()
        self.encoder = nn.Linear(dim, latent, dtype=torch.float64)
        self.decoder = nn.Linear(latent, dim, dtype=torch.float64)

    def reset_parameters(self, generator: torch.Generator) -> None:
        # uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) drawn from the detector's own generator
        with torch.no_grad():
            for layer in (self.encoder, self.decoder):
                bound = 1.0 / math.sqrt(layer.in_features)
                for param in (layer.weight, layer.bias):
                    draw = torch.rand(param.shape, generator=generator, dtype=torch.float64)
                    param.copy_(draw * 2 * bound - bound)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.decoder(self.encoder(x))


class LinearAutoencoderDetector(ReconstructionDetector):
    """Windowed linear autoencoder trained by mini-batch gradient descent"""

    kind = WINDOW_LINEAR_AUTOENCODER

    def min_rows(self) -> int:
        # at least two windows: one to train on, one to validate on
        return self.spec.window + 1

    def parameter_shapes(self, m: int) -> Dict[str, Tuple[Optional[int], ...]]:
        dim, latent = self.spec.window * m, int(self.spec.hp('latent'))
        return {
            'encoder_weight': (latent, dim),
            'encoder_bias': (latent,),
            'decoder_weight': (dim, latent),
            'decoder_bias': (dim,),
        }

    def learn(self, train: TimeSeries) -> Tuple[Dict[str, np.ndarray], LossHistory]:
        windows = torch.from_numpy(sliding_windows(train.values, self.spec.window))
        n_valid = max(1, int(round(len(windows) * float(self.spec.hp('validation_fraction')))))
        n_valid = min(n_valid, len(windows) - 1)
        fit_set, valid_set = windows[:-n_valid], windows[-n_valid:]

        generator = torch.Generator().manual_seed(self.spec.seed)
        model = WindowAutoencoder(windows.shape[1], int(self.spec.hp('latent')))
        model.reset_parameters(generator)
        optimizer = torch.optim.Adam(model.parameters(), lr=float(self.spec.hp('learning_rate')))
        loss_fn = nn.MSELoss()
        batch_size = int(self.spec.hp('batch_size'))
        stopper = EarlyStopping(patience=int(self.spec.hp('patience')))

        train_losses, valid_losses = [], []
        for epoch in range(1, int(self.spec.hp('max_epochs')) + 1):
            model.train()
            order = torch.randperm(len(fit_set), generator=generator)
            epoch_loss = 0.0
            for start in range(0, len(fit_set), batch_size):
                batch = fit_set[order[start:start + batch_size]]
                optimizer.zero_grad()
                loss = loss_fn(model(batch), batch)
                loss.backward()
                optimizer.step()
                epoch_loss += loss.item() * len(batch)

            model.eval()
            with torch.no_grad():
                valid_loss = loss_fn(model(valid_set), valid_set).item()
            train_loss = epoch_loss / len(fit_set)
            if not (math.isfinite(train_loss) and math.isfinite(valid_loss)):
                raise DetectorError(f"{self.spec.name}: non-finite loss", epoch=epoch)

            train_losses.append(train_loss)
            valid_losses.append(valid_loss)
            if stopper(epoch, valid_loss, model.state_dict()):
                break

        model.load_state_dict(stopper.best_state)
        self.logger.info(
            f"{self.spec.name}: trained {len(train_losses)} epochs, best validation loss "
            f"{stopper.best_valid:.6f} at epoch {stopper.best_valid_epoch}"
        )

        parameters = {
            'encoder_weight': model.encoder.weight.detach().numpy().copy(),
            'encoder_bias': model.encoder.bias.detach().numpy().copy(),
            'decoder_weight': model.decoder.weight.detach().numpy().copy(),
            'decoder_bias': model.decoder.bias.detach().numpy().copy(),
        }
        history = LossHistory(
            train=tuple(train_losses),
            validation=tuple(valid_losses),
            best_epoch=stopper.best_valid_epoch,
        )
        return parameters, history

    def reconstruct(self, parameters: Dict[str, np.ndarray], series: TimeSeries) -> np.ndarray:
        windows = sliding_windows(series.values, self.spec.window)
        latent = windows @ parameters['encoder_weight'].T + parameters['encoder_bias']
        decoded = latent @ parameters['decoder_weight'].T + parameters['decoder_bias']
        return decoded[:, -series.m:]
