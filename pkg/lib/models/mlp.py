# ------------------------------------------------------------------------------
# Licensed under the MIT License.
# ------------------------------------------------------------------------------
"""Shallow feed-forward classifier over the seven voltage vectors.

Model file layout (written with torch.save, read with weights_only=True):

    {
      "format_version": 1,
      "architecture":   "shallow_mlp",
      "shape":          [num_inputs, num_hidden, num_classes],
      "activation":     "tanh" | "logistic",
      "feature_order":  [feature names, input order],
      "state_dict":     {"feature_mean", "feature_std",
                         "hidden.weight" (H x M), "hidden.bias" (H),
                         "output.weight" (K x H), "output.bias" (K)}
    }

All tensors are float64, so a save/load round trip is bit exact.
"""

from __future__ import absolute_import
from __future__ import division
from __future__ import print_function

import logging
import math
import os

import torch
import torch.nn as nn
import torch.nn.functional as F

from core.errors import ModelFormatError


logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
ARCHITECTURE = "shallow_mlp"
ACTIVATIONS = ("tanh", "logistic")

BASE_FEATURES = (
    "if_a", "if_b", "vc_a", "vc_b", "io_a", "io_b", "vref_a", "vref_b",
)
DELAYED_FEATURES = BASE_FEATURES + tuple(f"{name}_prev" for name in BASE_FEATURES)


def format_shape(shape):
    return "-".join(str(int(s)) for s in shape)


class ShallowMLP(nn.Module):
    def __init__(self, num_inputs=8, num_hidden=15, num_classes=7,
                 activation="tanh", feature_names=None):
        super(ShallowMLP, self).__init__()
        if activation not in ACTIVATIONS:
            raise ValueError(f"Unknown activation: {activation}")
        if feature_names is None:
            feature_names = DELAYED_FEATURES if num_inputs == 16 else BASE_FEATURES
        if len(feature_names) != num_inputs:
            raise ValueError(
                f"{len(feature_names)} feature names for {num_inputs} inputs")

        self.activation = activation
        self.feature_names = tuple(feature_names)
        self.hidden = nn.Linear(num_inputs, num_hidden).double()
        self.output = nn.Linear(num_hidden, num_classes).double()
        self.register_buffer(
            "feature_mean", torch.zeros(num_inputs, dtype=torch.float64))
        self.register_buffer(
            "feature_std", torch.ones(num_inputs, dtype=torch.float64))

    @property
    def shape(self):
        return (self.hidden.in_features, self.hidden.out_features,
                self.output.out_features)

    @property
    def num_inputs(self):
        return self.hidden.in_features

    def init_weights(self, seed):
        """Uniform in +-1/sqrt(fan_in), drawn from a seeded generator."""
        gen = torch.Generator().manual_seed(int(seed))
        with torch.no_grad():
            for layer in (self.hidden, self.output):
                bound = 1.0 / math.sqrt(layer.in_features)
                for param in (layer.weight, layer.bias):
                    draw = torch.rand(param.shape, generator=gen, dtype=torch.float64)
                    param.copy_((2.0 * draw - 1.0) * bound)

    def set_normalization(self, mean, std):
        mean = torch.as_tensor(mean, dtype=torch.float64)
        std = torch.as_tensor(std, dtype=torch.float64).clone()
        # constant features pass through unscaled
        std[~(std > 1e-12)] = 1.0
        self.feature_mean.copy_(mean)
        self.feature_std.copy_(std)

    def _act(self, z):
        if self.activation == "tanh":
            return torch.tanh(z)
        return torch.sigmoid(z)

    def logits(self, x):
        x = (x - self.feature_mean) / self.feature_std
        return self.output(self._act(self.hidden(x)))

    def forward(self, x):
        return F.softmax(self.logits(x), dim=-1)


def get_model(cfg, seed=None):
    num_inputs = 2 * len(BASE_FEATURES) if cfg.MODEL.DELAYED_FEATURES \
        else len(BASE_FEATURES)
    model = ShallowMLP(
        num_inputs=num_inputs,
        num_hidden=cfg.MODEL.NUM_HIDDEN,
        num_classes=cfg.MODEL.NUM_CLASSES,
        activation=cfg.MODEL.ACTIVATION,
    )
    model.init_weights(cfg.SEED if seed is None else seed)
    return model


def save_model(model, path):
    payload = {
        "format_version": FORMAT_VERSION,
        "architecture": ARCHITECTURE,
        "shape": list(model.shape),
        "activation": model.activation,
        "feature_order": list(model.feature_names),
        "state_dict": {k: v.detach().clone() for k, v in model.state_dict().items()},
    }
    torch.save(payload, path)


def load_model(path, expected_shape=None):
    if not os.path.exists(path):
        raise FileNotFoundError(f"model file not found: {path}")
    try:
        payload = torch.load(path, map_location="cpu", weights_only=True)
    except Exception as e:
        raise ModelFormatError(f"{path}: unreadable model file ({e})")

    if not isinstance(payload, dict) or "format_version" not in payload:
        raise ModelFormatError(f"{path}: missing model header")
    if payload["format_version"] != FORMAT_VERSION:
        raise ModelFormatError(
            f"{path}: format version {payload['format_version']}, "
            f"expected {FORMAT_VERSION}")
    if payload.get("architecture") != ARCHITECTURE:
        raise ModelFormatError(
            f"{path}: architecture {payload.get('architecture')!r}, "
            f"expected {ARCHITECTURE!r}")

    shape = tuple(int(s) for s in payload["shape"])
    if expected_shape is not None and shape != tuple(expected_shape):
        raise ModelFormatError(
            f"{path}: shape mismatch, file has {format_shape(shape)}, "
            f"expected {format_shape(expected_shape)}")

    try:
        model = ShallowMLP(
            num_inputs=shape[0],
            num_hidden=shape[1],
            num_classes=shape[2],
            activation=payload["activation"],
            feature_names=payload["feature_order"],
        )
        model.load_state_dict(payload["state_dict"])
    except (KeyError, ValueError, RuntimeError) as e:
        raise ModelFormatError(f"{path}: inconsistent model payload ({e})")

    model.eval()
    return model
