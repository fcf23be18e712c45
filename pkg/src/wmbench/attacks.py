"""Watermark-removal attacks: rotation, uniform blur, regeneration/rinsing,
localized blurring (saliency-guided), and the randomized-mask control."""

from __future__ import annotations

import re
from dataclasses import dataclass, replace

import numpy as np

from . import imagekit as ik
from .errors import AttackFailed, InvalidArgument
from .saliency import Heatmap, gradcam
from .stegastamp.model import StegaParams
from .treering.toy import LatentGenerator

ROTATION_DEGREES = 75.0
BLUR_KERNEL_SIZE = 8


@dataclass(frozen=True)
class RegenConfig:
    """Noise scale `sigma` applies to embedding-space backends (the toy
    generator); `strength` is the timestep parameter of diffusion adapters
    and is never converted to sigma implicitly."""

    sigma: float | None = 0.4
    strength: int | None = None
    iterations: int = 1
    seed: int = 0
    backend: str = "toy"

    def __post_init__(self):
        if self.iterations < 1:
            raise InvalidArgument("iterations must be >= 1")
        if self.sigma is not None and self.sigma < 0:
            raise InvalidArgument("sigma must be >= 0")

    @property
    def notation(self) -> str:
        if self.strength is None:
            raise InvalidArgument("notation requires a strength value")
        return f"{self.iterations}x{self.strength}"


def parse_regen_notation(text: str, **kwargs) -> RegenConfig:
    """Parse the [iterations]x[strength] shorthand (e.g. '2x20')."""
    match = re.fullmatch(r"(\d+)x(\d+)", text.strip())
    if not match:
        raise InvalidArgument(f"bad regeneration notation {text!r}")
    return RegenConfig(sigma=None, strength=int(match.group(2)),
                       iterations=int(match.group(1)), **kwargs)


@dataclass(frozen=True)
class LBAConfig:
    percentile: float = 50.0
    kernel_size: int = 31
    kernel_sigma: float | None = None  # defaults to size / 3
    layer: str = "last-conv"

    @property
    def sigma(self) -> float:
        return self.kernel_sigma if self.kernel_sigma is not None \
            else self.kernel_size / 3.0


def attack_rotation(image: np.ndarray, degrees: float = ROTATION_DEGREES
                    ) -> np.ndarray:
    return ik.rotate(image, degrees)


def attack_blur(image: np.ndarray, size: int = BLUR_KERNEL_SIZE,
                sigma: float | None = None) -> np.ndarray:
    kernel = ik.gaussian_kernel(size, sigma if sigma is not None else size / 3.0)
    return ik.blur(image, kernel)


def regeneration(image: np.ndarray, config: RegenConfig,
                 gen: LatentGenerator) -> np.ndarray:
    """Embed, perturb the embedding with seeded Gaussian noise, reconstruct."""
    if config.sigma is None:
        raise InvalidArgument("this backend regenerates with `sigma`; "
                              "`strength` only applies to diffusion adapters")
    try:
        embedding = gen.embed(image)
        rng = np.random.default_rng(np.random.SeedSequence([0xA77, config.seed]))
        noisy = embedding + config.sigma * rng.standard_normal(embedding.shape)
        out = gen.reconstruct(noisy)
    except InvalidArgument:
        raise
    except Exception as exc:
        raise AttackFailed(str(exc)) from exc
    return ik.clamp01(out)


def rinse(image: np.ndarray, config: RegenConfig,
          gen: LatentGenerator) -> np.ndarray:
    """n-fold regeneration; per-iteration seeds derive from the master seed."""
    out = image
    for i in range(config.iterations):
        step_seed = int(np.random.SeedSequence([0x5115E, config.seed, i])
                        .generate_state(1)[0])
        out = regeneration(out, replace(config, iterations=1, seed=step_seed),
                           gen)
    return out


def lba(image: np.ndarray, stega: StegaParams, config: LBAConfig
        ) -> tuple[np.ndarray, ik.Mask, Heatmap]:
    """Localized blurring: blur only the pixels the decoder's GradCAM ranks
    at or above the percentile threshold."""
    heatmap = gradcam(stega, image, config.layer)
    mask = ik.percentile_threshold(heatmap.values, config.percentile)
    kernel = ik.gaussian_kernel(config.kernel_size, config.sigma)
    blurred = ik.blur(image, kernel)
    return ik.composite(image, blurred, mask), mask, heatmap


def randomized_mask_attack(image: np.ndarray, config: LBAConfig, seed: int
                           ) -> tuple[np.ndarray, ik.Mask]:
    """Budget-matched control: same coverage as the LBA percentile, pixels
    chosen uniformly at random."""
    image = ik.validate_image(image)
    if not (0 <= config.percentile < 100):
        raise InvalidArgument(f"percentile must be in [0, 100), "
                              f"got {config.percentile}")
    h, w = image.shape[:2]
    n_pixels = h * w
    n_select = int(round(n_pixels * (100.0 - config.percentile) / 100.0))
    rng = np.random.default_rng(np.random.SeedSequence([0x3A17D, int(seed)]))
    chosen = rng.choice(n_pixels, size=n_select, replace=False)
    bits = np.zeros(n_pixels, dtype=bool)
    bits[chosen] = True
    mask = ik.Mask(bits=bits.reshape(h, w))
    kernel = ik.gaussian_kernel(config.kernel_size, config.sigma)
    blurred = ik.blur(image, kernel)
    return ik.composite(image, blurred, mask), mask
