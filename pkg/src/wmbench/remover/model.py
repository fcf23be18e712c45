"""Image-to-image network that strips the pixel-space watermark."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as tf

from ..arrayio import load_checkpoint, save_checkpoint
from ..errors import InvalidArgument

REMOVER_DESCRIPTOR: dict[str, Any] = {"resolution": 64, "width": 16}


class RemoverNet(nn.Module):
    """Residual corrector; zero-initialized head makes it the identity at
    initialization."""

    def __init__(self, desc: dict[str, Any]):
        super().__init__()
        w = desc["width"]
        self.desc = dict(desc)
        self.conv_in = nn.Conv2d(3, 2 * w, 3, stride=2, padding=1)
        self.mid = nn.Conv2d(2 * w, 2 * w, 3, padding=1)
        self.up = nn.Conv2d(2 * w, w, 3, padding=1)
        self.full = nn.Conv2d(w + 3, w, 3, padding=1)
        self.head = nn.Conv2d(w, 3, 3, padding=1)
        nn.init.zeros_(self.head.weight)
        nn.init.zeros_(self.head.bias)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        h = tf.relu(self.conv_in(x))
        h = tf.relu(self.mid(h))
        h = tf.relu(self.up(h))
        h = tf.interpolate(h, size=x.shape[-2:], mode="bilinear",
                           align_corners=False)
        h = tf.relu(self.full(torch.cat([h, x], dim=1)))
        return x + self.head(h)


@dataclass
class RemoverParams:
    net: RemoverNet
    descriptor: dict[str, Any]

    @property
    def resolution(self) -> int:
        return self.descriptor["resolution"]


def init_remover(descriptor: dict[str, Any] | None = None,
                 seed: int = 0) -> RemoverParams:
    desc = dict(REMOVER_DESCRIPTOR)
    if descriptor:
        desc.update(descriptor)
    torch.manual_seed(seed)
    params = RemoverParams(RemoverNet(desc), desc)
    params.net.eval()
    return params


def save_remover(path, params: RemoverParams) -> None:
    arrays = {name: t.detach().cpu().numpy()
              for name, t in params.net.state_dict().items()}
    save_checkpoint(path, "remover", params.descriptor, arrays)


def load_remover(path) -> RemoverParams:
    kind, desc, arrays = load_checkpoint(path)
    if kind != "remover":
        raise InvalidArgument(f"not a remover checkpoint (kind={kind!r})")
    params = init_remover(desc)
    params.net.load_state_dict({k: torch.from_numpy(np.array(v))
                                for k, v in arrays.items()})
    params.net.eval()
    return params


def remove(image: np.ndarray, params: RemoverParams) -> np.ndarray:
    """Deterministic watermark removal; output clamped to [0, 1]."""
    image = np.asarray(image, dtype=np.float64)
    res = params.resolution
    if image.shape != (res, res, 3):
        raise InvalidArgument(f"image shape {image.shape} != ({res}, {res}, 3)")
    return remove_batch(image[None], params)[0]


@torch.no_grad()
def remove_batch(images: np.ndarray, params: RemoverParams) -> np.ndarray:
    images = np.asarray(images, dtype=np.float64)
    if images.ndim != 4:
        raise InvalidArgument("expected an (N,H,W,3) image stack")
    x = torch.from_numpy(images.astype(np.float32)).permute(0, 3, 1, 2)
    out = params.net(x).permute(0, 2, 3, 1).numpy().astype(np.float64)
    return np.clip(out, 0.0, 1.0)
