"""Encoder/decoder networks for the bitstring watermark.

The encoder takes the image concatenated with the message (projected and
upsampled to a spatial tensor) and predicts a residual; its final layer is
zero-initialized so an untrained encoder is the identity. The decoder is a
strided conv stack followed by dense layers producing one logit per bit; an
optional alignment module predicts an affine warp applied before decoding.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
import torch
import torch.nn as nn
import torch.nn.functional as tf

from ..arrayio import load_checkpoint, save_checkpoint
from ..errors import InvalidArgument

DEFAULT_DESCRIPTOR: dict[str, Any] = {
    "resolution": 64,
    "bits": 32,
    "enc_width": 16,
    "dec_width": 16,
    "msg_channels": 8,
    "msg_grid": 8,
    "head_hidden": 128,
    "align": False,
}


class Encoder(nn.Module):
    def __init__(self, desc: dict[str, Any]):
        super().__init__()
        w = desc["enc_width"]
        mc = desc["msg_channels"]
        grid = desc["msg_grid"]
        self.desc = dict(desc)
        self.msg_dense = nn.Linear(desc["bits"], mc * grid * grid)
        # bulk of the work happens at half resolution; the zero-initialized
        # head sees the raw image+message again so residuals stay edge-aligned
        self.conv_in = nn.Conv2d(3 + mc, 2 * w, 3, stride=2, padding=1)
        self.mid = nn.Conv2d(2 * w, 2 * w, 3, padding=1)
        self.up = nn.Conv2d(2 * w, w, 3, padding=1)
        self.head = nn.Conv2d(w + 3 + mc, 3, 3, padding=1)
        nn.init.zeros_(self.head.weight)
        nn.init.zeros_(self.head.bias)
        coords = torch.arange(5, dtype=torch.float32) - 2.0
        g1 = torch.exp(-(coords**2) / (2.0 * 0.7**2))
        g1 = g1 / g1.sum()
        self.register_buffer("lowpass", (g1[:, None] * g1[None, :])
                             .expand(3, 1, 5, 5).clone())

    def forward(self, image: torch.Tensor, message: torch.Tensor) -> torch.Tensor:
        """(B,3,H,W) x (B,k) -> residual (B,3,H,W)."""
        desc = self.desc
        size = image.shape[-1]
        msg = self.msg_dense(message)
        msg = msg.view(-1, desc["msg_channels"], desc["msg_grid"], desc["msg_grid"])
        msg = tf.interpolate(msg, size=(size, size), mode="nearest")
        inp = torch.cat([image, msg], dim=1)
        h = tf.relu(self.conv_in(inp))
        h = tf.relu(self.mid(h))
        h = tf.relu(self.up(h))
        h = tf.interpolate(h, size=(size, size), mode="bilinear",
                           align_corners=False)
        raw = self.head(torch.cat([h, inp], dim=1))
        # high-pass the residual (subtract a sigma=0.7 gaussian): large-scale
        # color shifts are both visible and trivially blur-proof, so the
        # signal must live in the high band where strong blurs erase it
        smooth = tf.conv2d(tf.pad(raw, (2, 2, 2, 2), mode="reflect"),
                           self.lowpass, groups=3)
        return raw - smooth


class AlignNet(nn.Module):
    """Predicts a small affine warp; identity at initialization."""

    def __init__(self):
        super().__init__()
        self.conv1 = nn.Conv2d(3, 8, 3, stride=2, padding=1)
        self.conv2 = nn.Conv2d(8, 16, 3, stride=2, padding=1)
        self.fc = nn.Linear(16, 6)
        nn.init.zeros_(self.fc.weight)
        with torch.no_grad():
            self.fc.bias.copy_(torch.tensor([1.0, 0, 0, 0, 1.0, 0]))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        h = tf.relu(self.conv1(x))
        h = tf.relu(self.conv2(h))
        theta = self.fc(h.mean(dim=(2, 3))).view(-1, 2, 3)
        grid = tf.affine_grid(theta, x.shape, align_corners=False)
        return tf.grid_sample(x, grid, mode="bilinear", padding_mode="border",
                              align_corners=False)


class Decoder(nn.Module):
    def __init__(self, desc: dict[str, Any]):
        super().__init__()
        w = desc["dec_width"]
        self.desc = dict(desc)
        self.align = AlignNet() if desc.get("align") else None
        self.features = nn.Sequential(
            nn.Conv2d(3, w, 3, stride=2, padding=1), nn.ReLU(),
            nn.Conv2d(w, 2 * w, 3, stride=2, padding=1), nn.ReLU(),
            nn.Conv2d(2 * w, 4 * w, 3, stride=2, padding=1), nn.ReLU(),
            nn.Conv2d(4 * w, 4 * w, 3, padding=1), nn.ReLU(),
        )
        self.head = nn.Sequential(
            nn.AdaptiveAvgPool2d(4), nn.Flatten(),
            nn.Linear(4 * w * 16, desc["head_hidden"]), nn.ReLU(),
            nn.Linear(desc["head_hidden"], desc["bits"]),
        )

    def forward(self, image: torch.Tensor) -> torch.Tensor:
        """(B,3,H,W) -> logits (B,k)."""
        if self.align is not None:
            image = self.align(image)
        return self.head(self.features(image))

    def conv_layers(self) -> list[nn.Conv2d]:
        return [m for m in self.features if isinstance(m, nn.Conv2d)]


@dataclass
class StegaParams:
    """Trained (or freshly initialized) encoder/decoder pair."""

    encoder: Encoder
    decoder: Decoder
    descriptor: dict[str, Any]

    @property
    def resolution(self) -> int:
        return self.descriptor["resolution"]

    @property
    def bits(self) -> int:
        return self.descriptor["bits"]


def init_params(descriptor: dict[str, Any] | None = None,
                seed: int = 0) -> StegaParams:
    desc = dict(DEFAULT_DESCRIPTOR)
    if descriptor:
        desc.update(descriptor)
    torch.manual_seed(seed)
    params = StegaParams(Encoder(desc), Decoder(desc), desc)
    params.encoder.eval()
    params.decoder.eval()
    return params


def save_params(path, params: StegaParams) -> None:
    arrays = {}
    for prefix, module in (("encoder", params.encoder), ("decoder", params.decoder)):
        for name, tensor in module.state_dict().items():
            arrays[f"{prefix}.{name}"] = tensor.detach().cpu().numpy()
    save_checkpoint(path, "stegastamp", params.descriptor, arrays)


def load_params(path) -> StegaParams:
    kind, desc, arrays = load_checkpoint(path)
    if kind != "stegastamp":
        raise InvalidArgument(f"not a stegastamp checkpoint (kind={kind!r})")
    params = init_params(desc)
    for prefix, module in (("encoder", params.encoder), ("decoder", params.decoder)):
        state = {name[len(prefix) + 1:]: torch.from_numpy(np.array(arr))
                 for name, arr in arrays.items() if name.startswith(prefix + ".")}
        module.load_state_dict(state)
    params.encoder.eval()
    params.decoder.eval()
    return params
