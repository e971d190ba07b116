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
from .__version__ import __version__
from .configuration import Config, ConfigError, AblationToggles, cfg_paths
from .tensor import Tensor, ShapeError, NumericalError, TapeError, checked_mode, default_dtype, no_grad
from .io import IO, ImageFormatError
from .synth import SceneSpec, make_dataset, write_dataset
from .datasets import PairedDataset, DataError
from .model import ADRModel, PipelineOutput
from .losses import LossWeights, PhiNetwork, total_loss
from .metrics import MetricsReport, evaluate, psnr
from .checkpoint import CheckpointError, load_checkpoint, save_checkpoint
from .training import Trainer, train, gradient_fingerprint, run_ablation_study
from .inference import enhance, decompose, evaluate_checkpoint
