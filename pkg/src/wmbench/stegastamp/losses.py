"""Training losses: bitstring cross-entropy, residual regularization, and a
perceptual distance through a fixed feature network."""

from __future__ import annotations

import numpy as np
import torch
import torch.nn.functional as tf

from ..errors import InvalidArgument


def message_loss(logits, message) -> float:
    """Summed cross-entropy between sigmoid(logits) and the message bits.

    Computed in the fused stable form so confident logits never hit log(0).
    """
    logits = np.asarray(logits, dtype=np.float64).ravel()
    message = np.asarray(message, dtype=np.float64).ravel()
    if logits.shape != message.shape:
        raise InvalidArgument(f"length mismatch {logits.shape} vs {message.shape}")
    # max(x,0) - x*m + log(1 + exp(-|x|))
    per_bit = np.maximum(logits, 0.0) - logits * message + np.log1p(np.exp(-np.abs(logits)))
    return float(per_bit.sum())


def message_loss_grad(logits, message) -> np.ndarray:
    """Analytic gradient of message_loss w.r.t. the logits."""
    logits = np.asarray(logits, dtype=np.float64).ravel()
    message = np.asarray(message, dtype=np.float64).ravel()
    return 1.0 / (1.0 + np.exp(-logits)) - message


class PerceptualNet(torch.nn.Module):
    """Fixed, seeded conv feature extractor used as the desk-scale
    perceptual distance; a pretrained network can be substituted via the
    training config at paper scale."""

    def __init__(self, seed: int = 0):
        super().__init__()
        gen = torch.Generator().manual_seed(seed)
        widths = [3, 12, 24, 48]
        weights = []
        for cin, cout in zip(widths[:-1], widths[1:]):
            w = torch.randn((cout, cin, 3, 3), generator=gen) / np.sqrt(cin * 9)
            weights.append(torch.nn.Parameter(w, requires_grad=False))
        self.weights = torch.nn.ParameterList(weights)

    def forward(self, x: torch.Tensor) -> list[torch.Tensor]:
        feats = []
        for w in self.weights:
            x = tf.relu(tf.conv2d(x, w, stride=2, padding=1))
            feats.append(x)
        return feats

    def distance(self, a: torch.Tensor, b: torch.Tensor) -> torch.Tensor:
        total = 0.0
        for fa, fb in zip(self.forward(a), self.forward(b)):
            total = total + (fa - fb).square().mean()
        return total


def total_loss_torch(image: torch.Tensor, encoded: torch.Tensor,
                     logits: torch.Tensor, message: torch.Tensor,
                     lambdas: tuple[float, float, float],
                     perceptual: PerceptualNet) -> tuple[torch.Tensor, dict]:
    """lambda_R * L_R + lambda_P * L_P + lambda_M * L_M (L_M summed per
    sample, averaged over the batch)."""
    lam_r, lam_p, lam_m = lambdas
    l_r = (encoded - image).square().mean()
    l_p = perceptual.distance(encoded, image) if lam_p != 0 else image.new_zeros(())
    l_m = tf.binary_cross_entropy_with_logits(logits, message, reduction="sum")
    l_m = l_m / logits.shape[0]
    total = lam_r * l_r + lam_p * l_p + lam_m * l_m
    return total, {"l_r": float(l_r.detach()), "l_p": float(l_p.detach()),
                   "l_m": float(l_m.detach())}


def total_loss(image: np.ndarray, encoded: np.ndarray, logits, message,
               config) -> tuple[float, dict]:
    """NumPy-facing composite loss for a single image; returns the weighted
    total and its components."""
    image = np.asarray(image, dtype=np.float64)
    encoded = np.asarray(encoded, dtype=np.float64)
    if image.shape != encoded.shape:
        raise InvalidArgument(f"shape mismatch {image.shape} vs {encoded.shape}")
    l_r = float(np.mean((encoded - image) ** 2))
    percept = PerceptualNet(seed=getattr(config, "perceptual_seed", 0))
    with torch.no_grad():
        ta = torch.from_numpy(image.astype(np.float32)).permute(2, 0, 1)[None]
        tb = torch.from_numpy(encoded.astype(np.float32)).permute(2, 0, 1)[None]
        l_p = float(percept.distance(tb, ta))
    l_m = message_loss(logits, message)
    total = config.lambda_r * l_r + config.lambda_p * l_p + config.lambda_m * l_m
    return total, {"l_r": l_r, "l_p": l_p, "l_m": l_m}
