"""Generation with an embedded ring key, inversion-based detection."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import chndtr

from ..errors import DetectionUnavailable, GenerationFailed
from .key import TreeRingKey, embed_key
from .toy import LatentGenerator


@dataclass(frozen=True)
class TreeRingConfig:
    """Detection settings. `guidance_scale` only applies to diffusion
    adapter backends; the toy backend ignores it."""

    radius: int = 10
    guidance_scale: float = 7.5
    p_value_cutoff: float = 0.01
    backend: str = "toy"


@dataclass(frozen=True)
class DetectionResult:
    distance: float
    score: float
    p_value: float
    detected: bool
    extras: dict = field(default_factory=dict)


def tr_generate(gen: LatentGenerator, key: TreeRingKey, prompt: str = "",
                seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Sample noise, embed the key, generate; returns (image, keyed latent)."""
    noise = gen.sample_noise(seed)
    keyed = embed_key(noise, key)
    try:
        image = gen.generate(keyed, prompt)
    except GenerationFailed:
        raise
    except Exception as exc:  # backend-specific failure
        raise GenerationFailed(str(exc)) from exc
    return image, keyed


def tr_detect(gen: LatentGenerator, image: np.ndarray, key: TreeRingKey,
              config: TreeRingConfig = TreeRingConfig()) -> DetectionResult:
    """Invert the image and compare masked Fourier coefficients to the key.

    The statistic sum |F_i - k_i|^2 / sigma^2 over the mask is referred to a
    noncentral chi-square. Because the latent is real, coefficients come in
    conjugate pairs, so the effective degrees of freedom equal |mask| (not
    2 |mask|) with noncentrality sum |k_i|^2 / sigma^2; sigma^2 is estimated
    from the off-mask coefficients of the key channel.
    """
    try:
        inverted = gen.invert(image)
    except Exception as exc:
        raise DetectionUnavailable(str(exc)) from exc

    all_fft = np.fft.fftshift(np.fft.fft2(inverted, axes=(-2, -1)),
                              axes=(-2, -1))
    plane_fft = all_fft[key.channel]
    mask = key.mask
    diff = plane_fft[mask] - key.pattern[mask]
    distance = float(np.sqrt(np.sum(np.abs(diff) ** 2)))

    # Null-variance estimate pooled over every off-mask coefficient of all
    # channels; under the null they are i.i.d., and the larger pool keeps
    # the plug-in noise from distorting the p-value tails.
    off_mask = np.concatenate([all_fft[c][~mask if c == key.channel
                                         else np.ones_like(mask)]
                               for c in range(all_fft.shape[0])])
    sigma_sq = float(np.mean(np.abs(off_mask) ** 2))
    statistic = distance**2 / sigma_sq
    dof = int(mask.sum())
    noncentrality = float(np.sum(np.abs(key.pattern[mask]) ** 2) / sigma_sq)
    p_value = float(np.clip(chndtr(statistic, dof, noncentrality), 0.0, 1.0))

    return DetectionResult(distance=distance, score=-distance, p_value=p_value,
                           detected=bool(p_value < config.p_value_cutoff),
                           extras={"statistic": statistic, "dof": dof,
                                   "noncentrality": noncentrality,
                                   "sigma_sq": sigma_sq})
