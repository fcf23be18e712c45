"""NumPy-facing encode/decode operations."""

from __future__ import annotations

import numpy as np
import torch

from ..errors import InvalidArgument
from .model import StegaParams


def _check_image(image: np.ndarray, params: StegaParams) -> np.ndarray:
    image = np.asarray(image, dtype=np.float64)
    res = params.resolution
    if image.shape != (res, res, 3):
        raise InvalidArgument(f"image shape {image.shape} != ({res}, {res}, 3)")
    return image


def stega_encode(image: np.ndarray, message, params: StegaParams
                 ) -> tuple[np.ndarray, np.ndarray]:
    """Embed a bit message; returns (clamp(image + residual), residual)."""
    image = _check_image(image, params)
    message = np.asarray(message).ravel()
    if message.size != params.bits:
        raise InvalidArgument(f"message length {message.size} != {params.bits}")
    enc, res = stega_encode_batch(image[None], message[None], params)
    return enc[0], res[0]


def stega_decode(image: np.ndarray, params: StegaParams
                 ) -> tuple[np.ndarray, np.ndarray]:
    """Recover the bit message; returns (bits, logits)."""
    image = _check_image(image, params)
    bits, logits = stega_decode_batch(image[None], params)
    return bits[0], logits[0]


@torch.no_grad()
def stega_encode_batch(images: np.ndarray, messages: np.ndarray,
                       params: StegaParams
                       ) -> tuple[np.ndarray, np.ndarray]:
    images = np.asarray(images, dtype=np.float64)
    messages = np.asarray(messages, dtype=np.float64)
    if images.ndim != 4 or messages.ndim != 2 or messages.shape[1] != params.bits:
        raise InvalidArgument("expected (N,H,W,3) images and (N,k) messages")
    if images.shape[0] != messages.shape[0]:
        raise InvalidArgument("batch size mismatch between images and messages")
    x = torch.from_numpy(images.astype(np.float32)).permute(0, 3, 1, 2)
    m = torch.from_numpy(messages.astype(np.float32))
    residual = params.encoder(x, m).permute(0, 2, 3, 1).numpy().astype(np.float64)
    encoded = np.clip(images + residual, 0.0, 1.0)
    return encoded, residual


@torch.no_grad()
def stega_decode_batch(images: np.ndarray, params: StegaParams
                       ) -> tuple[np.ndarray, np.ndarray]:
    images = np.asarray(images, dtype=np.float64)
    if images.ndim != 4:
        raise InvalidArgument("expected an (N,H,W,3) image stack")
    res = params.resolution
    if images.shape[1:] != (res, res, 3):
        raise InvalidArgument(f"image shape {images.shape[1:]} != ({res},{res},3)")
    x = torch.from_numpy(images.astype(np.float32)).permute(0, 3, 1, 2)
    logits = params.decoder(x).numpy().astype(np.float64)
    bits = (logits >= 0.0).astype(np.int64)
    return bits, logits
