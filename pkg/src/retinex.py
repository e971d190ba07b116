#!/usr/bin/env python
# encoding: utf-8

"""
@Author:              Edoardo Altamura
@Year:                2026
@Email:               edoardo.altamura@outlook.com
@Copyright:           Copyright (c) 2026 Edoardo Altamura
@Last Modified by:    Edoardo Altamura
@Latest release:      18 Oct 2026
@Project:             Underwater image enhancement (ADR, desk-scale)

Released under the MIT License. See the LICENSE file in the project root.
"""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .nn import Module, Conv2d
from .tensor import Tensor, ShapeError
from . import functional as F

L_FLOOR = 1e-6


@dataclass
class RetinexBundle:
    illumination: Tensor
    reflectance: Tensor
    gamma: Tensor
    illumination_enhanced: Tensor
    reflectance_refined: Tensor


def gamma_correct(illumination: Tensor, gamma: Tensor) -> Tensor:
    """
    Per-pixel power law ``L ** gamma``; gamma < 1 brightens, gamma = 1 is the identity.

    The base is floored at 1e-6 so the exponent gradient (which involves log L) stays finite.
    """
    return F.clamp_min(illumination, L_FLOOR) ** gamma


class RetinexDecoder(Module):

    def __init__(self, out_channels: int, rng: np.random.Generator) -> None:
        self.conv0 = Conv2d(64, 32, 3, rng)
        self.conv1 = Conv2d(32, out_channels, 3, rng)

    def forward(self, features: Tensor) -> Tuple[Tensor, Tensor]:
        hidden = F.relu(self.conv0(F.upsample_bilinear(features, 2)))
        return F.sigmoid(self.conv1(hidden)), hidden


class RetinexStage(Module):

    def __init__(self, rng: np.random.Generator) -> None:
        """
        Encoder 3 -> 32 -> 64 with one pooling level, mirrored illumination and reflectance decoders,
        a gamma head on the illumination decoder's hidden features and a 3 -> 3 reflectance refinement.
        """
        self.conv0 = Conv2d(3, 32, 3, rng)
        self.conv1 = Conv2d(32, 64, 3, rng)
        self.illumination_decoder = RetinexDecoder(1, rng)
        self.reflectance_decoder = RetinexDecoder(3, rng)
        self.gamma_head = Conv2d(32, 1, 3, rng)
        self.refine = Conv2d(3, 3, 3, rng)

    def retinex_decompose(self, dehazed: Tensor) -> Tuple[Tensor, Tensor, Tensor]:
        h, w = dehazed.shape[-2:]
        if h % 2 or w % 2:
            raise ShapeError(f"Retinex decomposition pools once: H and W must be even, got {h}x{w}.",
                             dimension=2 if h % 2 else 3)
        features = F.relu(self.conv1(F.max_pool2d(F.relu(self.conv0(dehazed)))))
        illumination, hidden = self.illumination_decoder(features)
        reflectance, _ = self.reflectance_decoder(features)
        return illumination, reflectance, hidden

    def predict_gamma(self, hidden: Tensor) -> Tensor:
        return F.sigmoid(self.gamma_head(hidden)) + 0.5

    def refine_reflectance(self, reflectance: Tensor) -> Tensor:
        return F.sigmoid(self.refine(reflectance))

    def forward(self, dehazed: Tensor) -> RetinexBundle:
        illumination, reflectance, hidden = self.retinex_decompose(dehazed)
        gamma = self.predict_gamma(hidden)
        return RetinexBundle(illumination=illumination, reflectance=reflectance, gamma=gamma,
                             illumination_enhanced=gamma_correct(illumination, gamma),
                             reflectance_refined=self.refine_reflectance(reflectance))
