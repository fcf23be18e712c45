"""Joint encoder/decoder training with a loss-weight warm-up schedule."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np
import torch

from ..errors import InvalidArgument, TrainingDiverged
from .distort import DistortionSettings, distort_batch
from .losses import PerceptualNet, total_loss_torch
from .model import DEFAULT_DESCRIPTOR, StegaParams, init_params


@dataclass
class StegaTrainConfig:
    lambda_r: float = 30.0
    lambda_p: float = 3.0
    lambda_m: float = 1.0
    batch_size: int = 8
    steps: int = 20_000
    lr: float = 1e-3
    warmup_frac: float = 0.25  # image-loss weights are 0 until here, then ramp
    distortion: DistortionSettings = field(default_factory=DistortionSettings)
    distortion_ramp_frac: float = 0.35
    seed: int = 1
    bits: int = 32
    resolution: int = 64
    eval_every: int = 500
    eval_images: int = 256
    arch: dict = field(default_factory=dict)
    perceptual_seed: int = 0

    def descriptor(self) -> dict:
        desc = dict(DEFAULT_DESCRIPTOR)
        desc.update(self.arch)
        desc["bits"] = self.bits
        desc["resolution"] = self.resolution
        return desc


def _weight_schedule(step: int, config: StegaTrainConfig) -> tuple[float, float, float]:
    warm = config.warmup_frac * config.steps
    if step < warm:
        ramp = 0.0
    else:
        span = max(1.0, config.steps - warm)
        ramp = min(1.0, (step - warm) / (0.5 * span))
    return config.lambda_r * ramp, config.lambda_p * ramp, config.lambda_m


def _to_batch(images: np.ndarray, idx: np.ndarray) -> torch.Tensor:
    sel = images[idx].astype(np.float32)
    return torch.from_numpy(sel).permute(0, 3, 1, 2)


@torch.no_grad()
def eval_bit_accuracy(params: StegaParams, images: np.ndarray,
                      rng: np.random.Generator,
                      batch_size: int = 32) -> float:
    """Mean clean decode accuracy with fresh random messages."""
    k = params.bits
    accs = []
    for start in range(0, images.shape[0], batch_size):
        chunk = images[start:start + batch_size]
        msgs = rng.integers(0, 2, size=(chunk.shape[0], k)).astype(np.float32)
        x = torch.from_numpy(chunk.astype(np.float32)).permute(0, 3, 1, 2)
        m = torch.from_numpy(msgs)
        residual = params.encoder(x, m)
        encoded = (x + residual).clamp(0, 1)
        logits = params.decoder(encoded)
        pred = (logits >= 0).float()
        accs.append((pred == m).float().mean().item())
    return float(np.mean(accs))


def train_stegastamp(dataset: np.ndarray, config: StegaTrainConfig,
                     progress: bool = False) -> tuple[StegaParams, dict]:
    """Train on an (N, H, W, 3) float corpus; returns params and history.

    History records the loss components per step plus periodic held-out
    bit accuracy; the last `eval_images` corpus entries are held out.
    """
    images = np.asarray(dataset, dtype=np.float64)
    if images.ndim != 4 or images.shape[0] == 0:
        raise InvalidArgument("dataset must be a nonempty (N, H, W, 3) stack")
    if images.shape[1] != config.resolution or images.shape[2] != config.resolution:
        raise InvalidArgument(f"dataset resolution {images.shape[1:3]} does not "
                              f"match configured {config.resolution}")
    if images.shape[0] <= config.eval_images:
        raise InvalidArgument("dataset smaller than the held-out split")

    held_out = images[-config.eval_images:]
    train_images = images[:-config.eval_images]

    torch.manual_seed(config.seed)
    params = init_params(config.descriptor(), seed=config.seed)
    params.encoder.train()
    params.decoder.train()
    perceptual = PerceptualNet(seed=config.perceptual_seed)
    opt = torch.optim.Adam(
        list(params.encoder.parameters()) + list(params.decoder.parameters()),
        lr=config.lr)

    rng = np.random.default_rng(np.random.SeedSequence([0x57E6, config.seed]))
    history: dict = {"steps": [], "eval": [], "config": asdict(config)}

    for step in range(config.steps):
        idx = rng.integers(0, train_images.shape[0], size=config.batch_size)
        batch = _to_batch(train_images, idx)
        msgs = torch.from_numpy(
            rng.integers(0, 2, size=(config.batch_size, config.bits))
            .astype(np.float32))

        residual = params.encoder(batch, msgs)
        encoded = (batch + residual).clamp(0, 1)
        ramp_steps = max(1.0, config.distortion_ramp_frac * config.steps)
        strength = min(1.0, step / ramp_steps)
        distorted = distort_batch(encoded, rng, config.distortion, strength)
        logits = params.decoder(distorted)

        lambdas = _weight_schedule(step, config)
        loss, comps = total_loss_torch(batch, encoded, logits, msgs, lambdas,
                                       perceptual)
        if not torch.isfinite(loss):
            raise TrainingDiverged(f"non-finite loss at step {step}")
        opt.zero_grad(set_to_none=True)
        loss.backward()
        opt.step()

        comps.update(step=step, total=float(loss.detach()),
                     lambda_r=lambdas[0], lambda_p=lambdas[1],
                     lambda_m=lambdas[2])
        history["steps"].append(comps)

        if (step + 1) % config.eval_every == 0 or step + 1 == config.steps:
            params.encoder.eval()
            params.decoder.eval()
            acc = eval_bit_accuracy(params, held_out,
                                    np.random.default_rng(config.seed + step))
            mean_abs_residual = float(residual.detach().abs().mean())
            history["eval"].append({"step": step + 1, "bit_accuracy": acc,
                                    "mean_abs_residual": mean_abs_residual})
            if progress:
                print(f"step {step + 1}/{config.steps} "
                      f"acc={acc:.4f} |R|={mean_abs_residual:.4f} "
                      f"l_m={comps['l_m']:.3f}", flush=True)
            params.encoder.train()
            params.decoder.train()

    params.encoder.eval()
    params.decoder.eval()
    return params, history
