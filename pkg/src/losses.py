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
from collections import OrderedDict
from dataclasses import dataclass, astuple
from functools import lru_cache
from typing import Dict, List, Optional

import numpy as np
from scipy.signal.windows import gaussian

from .configuration import AblationToggles
from .model import PipelineOutput
from .nn import Module, ConvBlock
from .tensor import Tensor, ShapeError
from . import functional as F

SSIM_WINDOW = 11
SSIM_SIGMA = 1.5
SSIM_C1 = 0.01 ** 2
SSIM_C2 = 0.03 ** 2
PHI_SEED = 0xAD00
TERMS = ('l1', 'ssim', 'perc', 'dehaze', 'retinex')


@dataclass(frozen=True)
class LossWeights:
    lambda1: float = 1.0
    lambda2: float = 0.5
    lambda3: float = 0.1
    lambda4: float = 0.3
    lambda5: float = 0.2

    def __post_init__(self) -> None:
        for name, value in zip(('lambda1', 'lambda2', 'lambda3', 'lambda4', 'lambda5'), astuple(self)):
            if value < 0:
                raise ValueError(f"Loss weight {name} must be non-negative, got {value}.")

    def as_dict(self) -> Dict[str, float]:
        return dict(zip(TERMS, astuple(self)))


class PhiNetwork(Module):

    def __init__(self, seed: int = PHI_SEED, widths=(16, 32, 64, 128)) -> None:
        """
        Frozen VGG-style feature extractor: four conv-ReLU-conv-ReLU blocks separated by 2x2 max pooling.

        Weights come from a fixed seed and never change; the network only shapes the perceptual distance.
        """
        rng = np.random.default_rng(seed)
        channels = (3,) + tuple(widths)
        for i in range(len(widths)):
            setattr(self, f'block{i}', ConvBlock(channels[i], channels[i + 1], rng))
        self.n_blocks = len(widths)
        self.assign_names('phi.')
        self.freeze()

    def forward(self, image: Tensor) -> List[Tensor]:
        features = []
        x = image
        for i in range(self.n_blocks):
            x = getattr(self, f'block{i}')(x if i == 0 else F.max_pool2d(x))
            features.append(x)
        return features


def _check_same_shape(pred: Tensor, target: Tensor, what: str) -> None:
    if pred.shape != target.shape:
        dimension = next((i for i, (a, b) in enumerate(zip(pred.shape, target.shape)) if a != b), 0)
        raise ShapeError(f"{what}: prediction has shape {pred.shape} but the target has {target.shape}.",
                         dimension=dimension)


@lru_cache(maxsize=4)
def gaussian_window(size: int = SSIM_WINDOW, sigma: float = SSIM_SIGMA) -> np.ndarray:
    """Normalised 2-D Gaussian window (outer product of 1-D windows)."""
    profile = gaussian(size, sigma)
    window = np.outer(profile, profile)
    window = window / window.sum()
    window.setflags(write=False)
    return window


def l1_loss(pred: Tensor, target: Tensor) -> Tensor:
    _check_same_shape(pred, target, 'l1_loss')
    return F.absolute(pred - target).mean()


def ssim(x: Tensor, y: Tensor) -> Tensor:
    """
    Mean structural similarity over every full Gaussian window and every channel.

    Statistics use an 11 x 11 Gaussian window (sigma 1.5) with C1 = 0.01**2 and C2 = 0.03**2 for a unit
    dynamic range. ``ssim(x, x)`` is exactly 1.

    :param x: N x C x H x W tensor.
    :param y: Tensor of the same shape.
    :return: Scalar tensor in (-1, 1].
    :raises ShapeError: If the shapes differ or the image is smaller than the window.
    """
    _check_same_shape(x, y, 'ssim')
    window = gaussian_window()
    mu_x = F.filter2d_valid(x, window)
    mu_y = F.filter2d_valid(y, window)
    var_x = F.filter2d_valid(x * x, window) - mu_x * mu_x
    var_y = F.filter2d_valid(y * y, window) - mu_y * mu_y
    cov_xy = F.filter2d_valid(x * y, window) - mu_x * mu_y

    numerator = (2.0 * mu_x * mu_y + SSIM_C1) * (2.0 * cov_xy + SSIM_C2)
    denominator = (mu_x * mu_x + mu_y * mu_y + SSIM_C1) * (var_x + var_y + SSIM_C2)
    return (numerator / denominator).mean()


def ssim_loss(pred: Tensor, target: Tensor) -> Tensor:
    return 1.0 - ssim(pred, target)


def perceptual_loss(pred: Tensor, target: Tensor, phi: PhiNetwork) -> Tensor:
    """
    Sum over the four feature blocks of the mean squared feature difference.
    """
    _check_same_shape(pred, target, 'perceptual_loss')
    total = None
    for feature_pred, feature_target in zip(phi(pred), phi(target)):
        difference = feature_pred - feature_target
        term = (difference * difference).mean()
        total = term if total is None else total + term
    return total


def dehaze_loss(dehazed: Tensor, target: Tensor) -> Tensor:
    _check_same_shape(dehazed, target, 'dehaze_loss')
    return F.absolute(dehazed - target).mean()


def retinex_loss(illumination: Tensor, reflectance: Tensor, target: Tensor) -> Tensor:
    """
    Mean ``|L * R - J_GT|`` with the single-channel illumination broadcast over the colour channels.
    """
    _check_same_shape(reflectance, target, 'retinex_loss')
    if illumination.shape[1] != 1 or illumination.shape[2:] != reflectance.shape[2:]:
        raise ShapeError(f"retinex_loss: illumination must be N x 1 x H x W matching {reflectance.shape}, got "
                         f"{illumination.shape}.", dimension=1)
    return F.absolute(illumination * reflectance - target).mean()


@dataclass
class LossReport:
    """
    Per-term values and the weighted total of one evaluation.

    ``weights`` holds the weights actually applied, so a term disabled by an ablation toggle appears with
    weight 0 and value 0. The total is accumulated in the order of ``TERMS``.
    """
    terms: 'OrderedDict[str, Tensor]'
    weights: Dict[str, float]
    total: Tensor

    def values(self) -> Dict[str, float]:
        out = {name: float(term.data) for name, term in self.terms.items()}
        out['total'] = float(self.total.data)
        return out

    def recompute(self) -> np.ndarray:
        """Redo the weighted sum on the stored values with the same dtype and order."""
        dtype = self.total.dtype
        total = None
        for name in TERMS:
            contribution = np.asarray(self.weights[name], dtype=dtype) * self.terms[name].data
            total = contribution if total is None else total + contribution
        return total


def total_loss(output: PipelineOutput, target: Tensor, weights: LossWeights = LossWeights(),
               ablation: AblationToggles = AblationToggles(), phi: Optional[PhiNetwork] = None) -> LossReport:
    """
    Weighted composite objective over the enhanced output and both intermediate stages.

    ``total = l1 * lambda1 + ssim * lambda2 + perc * lambda3 + dehaze * lambda4 + retinex * lambda5``

    The SSIM and perceptual terms are dropped when their ablation toggle is off; the Retinex term is dropped
    when the Retinex stage is bypassed.

    :param output: Result of a model forward pass.
    :param target: Ground truth, N x 3 x H x W.
    :param weights: Loss weights.
    :param ablation: Ablation toggles.
    :param phi: Frozen feature network; required when the perceptual term is active.
    :return: The loss report.
    """
    zero = Tensor(0.0, dtype=output.enhanced.dtype)
    applied = weights.as_dict()
    terms: 'OrderedDict[str, Tensor]' = OrderedDict()

    terms['l1'] = l1_loss(output.enhanced, target)
    terms['ssim'] = ssim_loss(output.enhanced, target) if ablation.ssim_loss else zero
    if ablation.perc_loss:
        if phi is None:
            raise ValueError("The perceptual term is enabled but no PhiNetwork was given.")
        terms['perc'] = perceptual_loss(output.enhanced, target, phi)
    else:
        terms['perc'] = zero
    terms['dehaze'] = dehaze_loss(output.dehaze.dehazed, target)
    if output.retinex_active:
        terms['retinex'] = retinex_loss(output.retinex.illumination, output.retinex.reflectance, target)
    else:
        terms['retinex'] = zero

    for name, active in (('ssim', ablation.ssim_loss), ('perc', ablation.perc_loss),
                         ('retinex', output.retinex_active)):
        if not active:
            applied[name] = 0.0

    total = None
    for name in TERMS:
        contribution = terms[name] * applied[name]
        total = contribution if total is None else total + contribution
    return LossReport(terms=terms, weights=applied, total=total)
