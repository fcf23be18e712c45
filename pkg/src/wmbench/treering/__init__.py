"""Fourier-space latent watermark: circular key, toy backend, detection."""

from .detect import DetectionResult, TreeRingConfig, tr_detect, tr_generate
from .key import TreeRingKey, embed_key, load_key, make_key, save_key
from .toy import LatentGenerator, ToyInvertibleGenerator

__all__ = [
    "DetectionResult", "TreeRingConfig", "tr_detect", "tr_generate",
    "TreeRingKey", "embed_key", "load_key", "make_key", "save_key",
    "LatentGenerator", "ToyInvertibleGenerator",
]
