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
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .configuration import AblationToggles, Config
from .nn import Module, Conv2d
from .physics import PhysicsStage, DehazeBundle
from .retinex import RetinexStage, RetinexBundle
from .tensor import Tensor
from .unetpp import EnhanceNet, StageInput20, assemble_input
from . import functional as F


@dataclass
class PipelineOutput:
    image: Tensor
    dehaze: DehazeBundle
    retinex: RetinexBundle
    stage_input: StageInput20
    enhanced: Tensor
    retinex_active: bool = True

    def named_tensors(self) -> 'OrderedDict[str, Tensor]':
        """Every intermediate in evaluation order, for diagnostics and intermediate dumps."""
        return OrderedDict([
            ('depth', self.dehaze.depth),
            ('transmission', self.dehaze.transmission),
            ('background_light', self.dehaze.background_light),
            ('noise', self.dehaze.noise),
            ('turbidity', self.dehaze.turbidity),
            ('dehazed', self.dehaze.dehazed),
            ('illumination', self.retinex.illumination),
            ('reflectance', self.retinex.reflectance),
            ('gamma', self.retinex.gamma),
            ('illumination_enhanced', self.retinex.illumination_enhanced),
            ('reflectance_refined', self.retinex.reflectance_refined),
            ('stage_input', self.stage_input.tensor),
            ('enhanced', self.enhanced),
        ])

    def first_non_finite(self) -> Optional[str]:
        for name, tensor in self.named_tensors().items():
            if not np.all(np.isfinite(tensor.data)):
                return name
        return None


class Bypass(Module):

    def __init__(self, rng: np.random.Generator) -> None:
        """Stand-in for the enhancement network: ``clamp01(c + conv3x3(c))`` with ``c = clamp01(J_dehazed)``."""
        self.refine = Conv2d(3, 3, 3, rng, zero_init=True)

    def forward(self, dehazed: Tensor) -> Tensor:
        clamped = F.clamp01(dehazed)
        return F.clamp01(clamped + self.refine(clamped))


class ADRModel(Module):
    """
    The three jointly trained stages: physics-guided dehazing, Retinex decomposition with learned gamma,
    and the U-Net++ enhancer.

    Every sub-network is always built, in the same order, whatever the ablation toggles; a disabled stage
    is skipped at run time and its parameters simply receive no gradient. Models built from the same seed
    therefore share their initial weights across ablations.

    Example usage:
        ```python
        model = ADRModel.from_config(Config(image_size=64, base_width=8))
        output = model(Tensor(batch))   # batch: N x 3 x 64 x 64 in [0, 1]
        output.enhanced
        ```
    """

    def __init__(self, seed: int = 0, base_width: int = 64, dense_skips: bool = True, attention_ffn: bool = False,
                 ablation: AblationToggles = AblationToggles()) -> None:
        rng = np.random.default_rng(seed)
        self.stage1 = PhysicsStage(rng, noise_term=ablation.noise_term, turbidity_term=ablation.turbidity_term)
        self.stage2 = RetinexStage(rng)
        self.stage3 = EnhanceNet(rng, base_width=base_width, dense_skips=dense_skips, attention_ffn=attention_ffn)
        self.bypass = Bypass(rng)
        self.ablation = ablation
        self.assign_names()

    @classmethod
    def from_config(cls, config: Config) -> 'ADRModel':
        return cls(seed=config.seed, base_width=config.base_width, dense_skips=config.dense_skips,
                   attention_ffn=config.attention_ffn, ablation=config.ablation)

    def stage2_or_identity(self, dehaze: DehazeBundle) -> RetinexBundle:
        if self.ablation.retinex_stage:
            return self.stage2(dehaze.dehazed)
        dehazed = dehaze.dehazed
        ones = Tensor(np.ones(dehaze.depth.shape, dtype=dehazed.dtype))
        return RetinexBundle(illumination=ones, reflectance=dehazed, gamma=ones, illumination_enhanced=ones,
                             reflectance_refined=dehazed)

    def forward(self, image: Tensor) -> PipelineOutput:
        dehaze = self.stage1(image)
        retinex = self.stage2_or_identity(dehaze)
        stage_input = assemble_input(image, dehaze, retinex)
        if self.ablation.unetpp_stage:
            enhanced = self.stage3(stage_input.tensor)
        else:
            enhanced = self.bypass(dehaze.dehazed)
        return PipelineOutput(image=image, dehaze=dehaze, retinex=retinex, stage_input=stage_input,
                              enhanced=enhanced, retinex_active=self.ablation.retinex_stage)
