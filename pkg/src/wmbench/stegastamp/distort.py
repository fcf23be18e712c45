"""Training-time perturbation pipeline (differentiable, seed-deterministic).

Each enabled perturbation fires independently per sample; all random draws
come from a NumPy generator so results are identical across torch builds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch
import torch.nn.functional as tf


@dataclass
class DistortionSettings:
    blur: bool = True
    blur_kernels: tuple[int, ...] = (3, 5, 7)
    blur_sigma: tuple[float, float] = (0.3, 0.9)
    noise: bool = True
    noise_sigma: float = 0.02
    jitter: bool = True  # brightness/contrast, +-10%
    jitter_amount: float = 0.1
    translate: bool = True  # affine warp, <= 2% of the side
    translate_frac: float = 0.02
    rescale: bool = True  # downscale-upscale, factor >= 0.8
    rescale_min: float = 0.8
    probability: float = 0.5  # chance each enabled perturbation fires

    def all_disabled(self) -> bool:
        return not (self.blur or self.noise or self.jitter or self.translate
                    or self.rescale)


def _gauss_kernel1d(size: int, sigma: float) -> torch.Tensor:
    coords = torch.arange(size, dtype=torch.float32) - (size - 1) / 2.0
    k = torch.exp(-(coords**2) / (2.0 * sigma**2))
    return k / k.sum()


def distort_batch(batch: torch.Tensor, rng: np.random.Generator,
                  settings: DistortionSettings,
                  strength: float = 1.0) -> torch.Tensor:
    """Apply a random composition per sample; differentiable w.r.t. batch.

    `strength` in [0, 1] scales every magnitude (training ramp).
    """
    if settings.all_disabled() or strength <= 0:
        return batch
    out = []
    for i in range(batch.shape[0]):
        out.append(_distort_one(batch[i], rng, settings, strength))
    return torch.stack(out).clamp(0.0, 1.0)


def _distort_one(img: torch.Tensor, rng: np.random.Generator,
                 settings: DistortionSettings, strength: float) -> torch.Tensor:
    x = img[None]  # (1,3,H,W)
    size = x.shape[-1]
    p = settings.probability
    if settings.blur and rng.random() < p:
        k = int(rng.choice(settings.blur_kernels))
        lo, hi = settings.blur_sigma
        sigma = max(1e-3, float(rng.uniform(lo, hi)) * strength)
        k1 = _gauss_kernel1d(k, sigma).to(x.dtype)
        kernel = (k1[:, None] * k1[None, :]).expand(3, 1, k, k)
        x = tf.conv2d(tf.pad(x, (k // 2, (k - 1) // 2) * 2, mode="reflect"),
                      kernel, groups=3)
    if settings.rescale and rng.random() < p:
        f = 1.0 - (1.0 - float(rng.uniform(settings.rescale_min, 1.0))) * strength
        small = max(8, int(round(size * f)))
        x = tf.interpolate(x, size=(small, small), mode="bilinear",
                           align_corners=False)
        x = tf.interpolate(x, size=(size, size), mode="bilinear",
                           align_corners=False)
    if settings.translate and rng.random() < p:
        limit = settings.translate_frac * strength
        tx, ty = rng.uniform(-limit, limit, size=2)
        theta = torch.tensor([[1.0, 0.0, 2 * tx], [0.0, 1.0, 2 * ty]],
                             dtype=x.dtype)[None]
        grid = tf.affine_grid(theta, x.shape, align_corners=False)
        x = tf.grid_sample(x, grid, mode="bilinear", padding_mode="border",
                           align_corners=False)
    if settings.jitter and rng.random() < p:
        amt = settings.jitter_amount * strength
        contrast = 1.0 + float(rng.uniform(-amt, amt))
        brightness = float(rng.uniform(-amt, amt))
        x = (x - 0.5) * contrast + 0.5 + brightness
    if settings.noise and rng.random() < p:
        sigma = settings.noise_sigma * strength
        noise = torch.from_numpy(
            rng.standard_normal(tuple(x.shape)).astype(np.float32)) * sigma
        x = x + noise.to(x.dtype)
    return x[0]


def distort(image: np.ndarray, rng: np.random.Generator,
            settings: DistortionSettings) -> np.ndarray:
    """NumPy-facing single-image perturbation; identity when all
    perturbations are disabled."""
    image = np.asarray(image, dtype=np.float64)
    if settings.all_disabled():
        return image
    with torch.no_grad():
        x = torch.from_numpy(image.astype(np.float32)).permute(2, 0, 1)[None]
        y = distort_batch(x, rng, settings)
    return np.clip(y[0].permute(1, 2, 0).numpy().astype(np.float64), 0.0, 1.0)
