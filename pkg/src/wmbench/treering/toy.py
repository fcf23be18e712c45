"""Exactly invertible synthetic latent generator.

Stands in for a latent diffusion backend: a latent z is scattered onto a
seeded subset of orthonormal DCT coefficients of the image plane, combined
with a smooth per-prompt base field (projected orthogonal to the latent
subspace), and squashed through a sigmoid. Because every factor is
invertible, invert(generate(z, prompt)) recovers z to float precision
without knowing the prompt.
"""

from __future__ import annotations

import hashlib
from typing import Protocol

import numpy as np
from scipy.fft import dctn, idctn
from scipy.ndimage import zoom

from ..errors import GenerationFailed, InvalidArgument


class LatentGenerator(Protocol):
    """Backend interface required by the watermarking pipeline."""

    latent_shape: tuple[int, int, int]
    image_size: int
    reentrant: bool

    def sample_noise(self, seed: int) -> np.ndarray: ...

    def generate(self, latent: np.ndarray, prompt: str = "") -> np.ndarray: ...

    def invert(self, image: np.ndarray) -> np.ndarray: ...

    def embed(self, image: np.ndarray) -> np.ndarray: ...

    def reconstruct(self, embedding: np.ndarray) -> np.ndarray: ...


class ToyInvertibleGenerator:
    """Deterministic, exactly invertible stand-in backend at 64 x 64."""

    reentrant = True

    def __init__(self, seed: int = 0, latent_shape: tuple[int, int, int] = (4, 32, 32),
                 image_size: int = 64, gain: float = 1.5, texture: float = 1.0,
                 base_scale: float = 1.1):
        self.seed = int(seed)
        self.latent_shape = tuple(int(d) for d in latent_shape)
        self.image_size = int(image_size)
        self.gain = float(gain)
        self.texture = float(texture)
        self.base_scale = float(base_scale)

        latent_dim = int(np.prod(self.latent_shape))
        image_dim = self.image_size * self.image_size * 3
        if latent_dim >= image_dim:
            raise InvalidArgument("latent must be smaller than the image")

        # Seeded subset of DCT coefficient slots carrying the latent; the
        # lowest-frequency block is reserved for the smooth base field.
        rng = np.random.default_rng(np.random.SeedSequence([0x70F, self.seed]))
        fy, fx, fc = np.unravel_index(np.arange(image_dim),
                                      (self.image_size, self.image_size, 3))
        allowed = np.flatnonzero(~((fy < 4) & (fx < 4)))
        self._slots = np.sort(rng.choice(allowed, size=latent_dim, replace=False))
        self._prompt_cache: dict[str, np.ndarray] = {}

    # --- orthonormal latent <-> image-domain maps -------------------------

    def _lift(self, latent_flat: np.ndarray) -> np.ndarray:
        """Latent vector -> image-shaped field with orthonormal columns."""
        coeff = np.zeros(self.image_size * self.image_size * 3)
        coeff[self._slots] = latent_flat
        coeff = coeff.reshape(self.image_size, self.image_size, 3)
        return idctn(coeff, norm="ortho", axes=(0, 1, 2))

    def _project(self, field: np.ndarray) -> np.ndarray:
        """Adjoint of _lift."""
        coeff = dctn(field, norm="ortho", axes=(0, 1, 2))
        return coeff.reshape(-1)[self._slots]

    def _base(self, prompt: str) -> np.ndarray:
        cached = self._prompt_cache.get(prompt)
        if cached is not None:
            return cached
        digest = hashlib.sha256(f"{self.seed}\x1f{prompt}".encode()).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
        low = rng.standard_normal((8, 8, 3))
        factor = self.image_size / 8
        base = self.base_scale * zoom(low, (factor, factor, 1.0), order=1,
                                      mode="nearest")
        # exact orthogonality to the latent subspace: prompt-free inversion
        base = base - self._lift(self._project(base))
        self._prompt_cache[prompt] = base
        return base

    # --- LatentGenerator interface ----------------------------------------

    def sample_noise(self, seed: int) -> np.ndarray:
        rng = np.random.default_rng(np.random.SeedSequence([0x4015E, self.seed,
                                                            int(seed)]))
        return rng.standard_normal(self.latent_shape)

    def generate(self, latent: np.ndarray, prompt: str = "") -> np.ndarray:
        latent = np.asarray(latent, dtype=np.float64)
        if latent.shape != self.latent_shape:
            raise GenerationFailed(f"latent shape {latent.shape} != "
                                   f"{self.latent_shape}")
        field = self.texture * self._lift(latent.reshape(-1)) + self._base(prompt)
        return _sigmoid(self.gain * field)

    def invert(self, image: np.ndarray) -> np.ndarray:
        field = self.embed(image).reshape(self.image_size, self.image_size, 3)
        return (self._project(field) / self.texture).reshape(self.latent_shape)

    def embed(self, image: np.ndarray) -> np.ndarray:
        """Lossless pre-activation embedding (the attack-facing phi)."""
        image = np.asarray(image, dtype=np.float64)
        expected = (self.image_size, self.image_size, 3)
        if image.shape != expected:
            raise InvalidArgument(f"image shape {image.shape} != {expected}")
        clipped = np.clip(image, _EPS, 1.0 - _EPS)
        return (_logit(clipped) / self.gain).reshape(-1)

    def reconstruct(self, embedding: np.ndarray) -> np.ndarray:
        field = np.asarray(embedding, dtype=np.float64).reshape(
            self.image_size, self.image_size, 3)
        return _sigmoid(self.gain * field)


# Clamp only against exact 0/1 (e.g. rotation zero-fill); generated pixels
# never saturate, so inversion of generator output stays exact.
_EPS = 1e-9


def _sigmoid(x: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * x))


def _logit(p: np.ndarray) -> np.ndarray:
    return np.log(p) - np.log1p(-p)
