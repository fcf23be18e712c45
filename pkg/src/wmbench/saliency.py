"""GradCAM over the bitstring decoder: where is the decode evidence?"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as tf

from .errors import InvalidArgument
from .stegastamp.model import StegaParams

TARGET_TAG = "decoded-bit-oriented-logit-sum"


@dataclass(frozen=True)
class Heatmap:
    """Saliency map normalized to [0, 1] (all zeros if the raw map was
    constant), same spatial shape as the image."""

    values: np.ndarray
    layer: str
    target: str = TARGET_TAG


def resolve_layer(decoder: nn.Module, layer: str) -> nn.Module:
    """Layer ids: 'last-conv', 'convN' (N-th conv of the feature stack), or
    a dotted module path."""
    convs = [m for m in decoder.features if isinstance(m, nn.Conv2d)] \
        if hasattr(decoder, "features") else []
    if layer == "last-conv":
        if not convs:
            raise InvalidArgument("decoder has no convolutional feature layer")
        return convs[-1]
    if layer.startswith("conv") and layer[4:].isdigit():
        idx = int(layer[4:])
        if idx >= len(convs):
            raise InvalidArgument(f"layer {layer!r} out of range "
                                  f"({len(convs)} conv layers)")
        return convs[idx]
    modules = dict(decoder.named_modules())
    if layer in modules:
        return modules[layer]
    raise InvalidArgument(f"unknown layer id {layer!r}")


def cam_from_activations(activations: torch.Tensor,
                         gradients: torch.Tensor) -> torch.Tensor:
    """ReLU of the gradient-weighted channel sum, (1,C,h,w) -> (h,w)."""
    weights = gradients.mean(dim=(2, 3), keepdim=True)
    return tf.relu((weights * activations).sum(dim=1))[0]


def _normalize(cam: np.ndarray) -> np.ndarray:
    lo, hi = float(cam.min()), float(cam.max())
    if hi - lo <= 0:
        return np.zeros_like(cam)
    return (cam - lo) / (hi - lo)


def gradcam_module(module: nn.Module, layer: nn.Module,
                   x: torch.Tensor) -> np.ndarray:
    """GradCAM of the bit-oriented logit sum of `module` w.r.t. `layer`,
    upsampled to the input resolution and min-max normalized.

    The target score orients every logit toward its decoded bit, i.e.
    sum_i sign(2 b_i - 1) logit_i, which is the evidence supporting the
    current decoding.
    """
    store: dict[str, torch.Tensor] = {}

    def hook(_mod, _inp, out):
        store["activations"] = out
        out.retain_grad()

    handle = layer.register_forward_hook(hook)
    try:
        module.zero_grad(set_to_none=True)
        logits = module(x)
        if "activations" not in store:
            raise InvalidArgument("layer was not visited by the forward pass")
        signs = torch.where(logits.detach() >= 0, 1.0, -1.0)
        score = (signs * logits).sum()
        score.backward()
        acts = store["activations"].detach()
        grads = store["activations"].grad
    finally:
        handle.remove()
        module.zero_grad(set_to_none=True)

    cam = cam_from_activations(acts, grads)
    cam = tf.interpolate(cam[None, None], size=x.shape[-2:], mode="bilinear",
                         align_corners=False)[0, 0]
    return _normalize(cam.numpy().astype(np.float64))


def gradcam(stega: StegaParams, image: np.ndarray,
            layer: str = "last-conv") -> Heatmap:
    """Heatmap of decoder evidence for an H x W x 3 image."""
    image = np.asarray(image, dtype=np.float64)
    res = stega.resolution
    if image.shape != (res, res, 3):
        raise InvalidArgument(f"image shape {image.shape} != ({res}, {res}, 3)")
    target = resolve_layer(stega.decoder, layer)
    x = torch.from_numpy(image.astype(np.float32)).permute(2, 0, 1)[None]
    values = gradcam_module(stega.decoder, target, x)
    return Heatmap(values=values, layer=layer)
