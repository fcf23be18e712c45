"""Learned steganographic bitstring watermark: encode, decode, train."""

from .api import (stega_decode, stega_decode_batch, stega_encode,
                  stega_encode_batch)
from .distort import DistortionSettings, distort
from .losses import message_loss, message_loss_grad, total_loss
from .model import (DEFAULT_DESCRIPTOR, StegaParams, init_params, load_params,
                    save_params)
from .train import StegaTrainConfig, eval_bit_accuracy, train_stegastamp

__all__ = [
    "stega_encode", "stega_decode", "stega_encode_batch", "stega_decode_batch",
    "DistortionSettings", "distort", "message_loss", "message_loss_grad",
    "total_loss", "StegaParams", "init_params", "load_params", "save_params",
    "DEFAULT_DESCRIPTOR", "StegaTrainConfig", "train_stegastamp",
    "eval_bit_accuracy",
]
