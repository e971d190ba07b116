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
from typing import List, Union

import numpy as np

from .nn import Module, Conv2d, Linear, Parameter
from .tensor import Tensor, ShapeError, get_default_dtype
from . import functional as F

T_MIN = 0.1


@dataclass
class DehazeBundle:
    """
    Outputs of the physics-guided dehazing stage, all batched (N leading).

    depth: N x 1 x H x W in (0, 1); transmission: N x 3 x H x W in (0, 1); background_light: N x 3 in (0, 1);
    noise and turbidity: composed N x 3 x H x W corrections; dehazed: recovered scene radiance N x 3 x H x W.
    """
    depth: Tensor
    transmission: Tensor
    background_light: Tensor
    noise: Tensor
    turbidity: Tensor
    dehazed: Tensor


class SharedEncoder(Module):

    def __init__(self, rng: np.random.Generator) -> None:
        self.conv0 = Conv2d(3, 32, 3, rng)
        self.conv1 = Conv2d(32, 64, 3, rng)
        self.conv2 = Conv2d(64, 128, 3, rng)

    def forward(self, image: Tensor) -> List[Tensor]:
        """
        Three feature levels at full, half and quarter resolution (32, 64 and 128 channels).

        :raises ShapeError: If H or W is not divisible by 4.
        """
        h, w = image.shape[-2:]
        if h % 4 or w % 4:
            raise ShapeError(f"The dehazing encoder pools twice: H and W must be divisible by 4, got {h}x{w}.",
                             dimension=2 if h % 4 else 3)
        level0 = F.relu(self.conv0(image))
        level1 = F.relu(self.conv1(F.max_pool2d(level0)))
        level2 = F.relu(self.conv2(F.max_pool2d(level1)))
        return [level0, level1, level2]


class BranchDecoder(Module):

    def __init__(self, out_channels: int, final: str, rng: np.random.Generator) -> None:
        """
        Conv 128 -> 256 -> 128 -> out on the deepest features, ReLU between convolutions, bilinear x4 upsampling.

        :param out_channels: 1 (depth) or 3 (transmission, noise, turbidity).
        :param final: ``sigmoid`` for bounded physical maps, ``linear`` for the signed noise and turbidity maps.
        """
        if final not in ('sigmoid', 'linear'):
            raise ValueError(f"Branch output activation must be 'sigmoid' or 'linear', got '{final}'.")
        self.conv0 = Conv2d(128, 256, 3, rng)
        self.conv1 = Conv2d(256, 128, 3, rng)
        self.conv2 = Conv2d(128, out_channels, 3, rng)
        self.final = final

    def forward(self, features: Tensor) -> Tensor:
        hidden = F.relu(self.conv1(F.relu(self.conv0(features))))
        out = F.upsample_bilinear(self.conv2(hidden), 4)
        return F.sigmoid(out) if self.final == 'sigmoid' else out


class BackgroundLight(Module):

    def __init__(self, rng: np.random.Generator, hidden: int = 64) -> None:
        self.fc0 = Linear(128, hidden, rng)
        self.fc1 = Linear(hidden, 3, rng)

    def forward(self, features: Tensor) -> Tensor:
        pooled = F.global_avg_pool(features)
        return F.sigmoid(self.fc1(F.relu(self.fc0(pooled))))


def _scalar(value: float) -> Parameter:
    return Parameter(np.asarray(value, dtype=get_default_dtype()))


def compose_noise(noise_hat: Tensor, depth: Tensor, alpha_n: Tensor, gamma_d: Tensor) -> Tensor:
    """
    Depth-attenuated noise: ``alpha_n * noise_hat * exp(-gamma_d * depth)``, depth broadcast over channels.
    """
    return alpha_n * noise_hat * F.exp(-(gamma_d * depth))


def compose_turbidity(turbidity_hat: Tensor, transmission: Tensor, depth: Tensor, beta_t: Tensor) -> Tensor:
    """
    Turbidity scattering ``beta_t * tanh(turbidity_hat) * (1 - t) * depth``.

    Vanishes where the water is clear (t = 1) or the scene is at the camera (depth = 0), and is bounded
    by ``|beta_t| * (1 - t) * depth``.
    """
    return beta_t * F.tanh(turbidity_hat) * (1.0 - transmission) * depth


def dehaze(image: Tensor, transmission: Tensor, background_light: Tensor, noise: Union[Tensor, float] = 0.0,
           turbidity: Union[Tensor, float] = 0.0, t_min: float = T_MIN) -> Tensor:
    """
    Invert the extended image-formation model.

    ``J = (I - A (1 - t) - N - S) / max(t, t_min)``

    :param image: Observed image, N x 3 x H x W.
    :param transmission: N x 3 x H x W transmission.
    :param background_light: Per-channel veiling light, N x 3 (or N x 3 x 1 x 1).
    :param noise: Composed noise, or 0.
    :param turbidity: Composed turbidity, or 0.
    :param t_min: Lower clamp of the denominator.
    :return: Scene radiance estimate, N x 3 x H x W. Not clamped.

    Example usage:
        ```python
        J = dehaze(I, t, A)  # the classical model, N = S = 0
        ```
    """
    if background_light.ndim == 2:
        background_light = background_light.reshape(background_light.shape[0], background_light.shape[1], 1, 1)
    numerator = image - background_light * (1.0 - transmission) - noise - turbidity
    return numerator / F.clamp_min(transmission, t_min)


class PhysicsStage(Module):
    """
    Shared encoder feeding five branches (depth, transmission, background light, noise, turbidity), plus the
    learnable scalars of the noise and turbidity compositions.
    """

    def __init__(self, rng: np.random.Generator, noise_term: bool = True, turbidity_term: bool = True) -> None:
        self.encoder = SharedEncoder(rng)
        self.depth_branch = BranchDecoder(1, 'sigmoid', rng)
        self.transmission_branch = BranchDecoder(3, 'sigmoid', rng)
        self.background_branch = BackgroundLight(rng)
        self.noise_branch = BranchDecoder(3, 'linear', rng)
        self.turbidity_branch = BranchDecoder(3, 'linear', rng)
        self.alpha_n = _scalar(0.1)
        self.gamma_d = _scalar(1.0)
        self.beta_t = _scalar(0.1)
        self.noise_term = noise_term
        self.turbidity_term = turbidity_term

    def shared_encode(self, image: Tensor) -> List[Tensor]:
        return self.encoder(image)

    def forward(self, image: Tensor) -> DehazeBundle:
        deepest = self.shared_encode(image)[-1]
        depth = self.depth_branch(deepest)
        transmission = self.transmission_branch(deepest)
        background_light = self.background_branch(deepest)

        zeros = Tensor(np.zeros(transmission.shape, dtype=transmission.dtype))
        if self.noise_term:
            noise = compose_noise(self.noise_branch(deepest), depth, self.alpha_n, self.gamma_d)
        else:
            noise = zeros
        if self.turbidity_term:
            turbidity = compose_turbidity(self.turbidity_branch(deepest), transmission, depth, self.beta_t)
        else:
            turbidity = zeros

        dehazed = dehaze(image, transmission, background_light, noise, turbidity)
        return DehazeBundle(depth=depth, transmission=transmission, background_light=background_light,
                            noise=noise, turbidity=turbidity, dehazed=dehazed)
