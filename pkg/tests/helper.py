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
"""
Contains helper functions for the test routines.
"""
import os
from typing import Optional

import numpy as np

from src.configuration import Config
from src.datasets import PairedDataset
from src.io import IO
from src.synth import SceneSpec, make_dataset


def tiny_config(directory: Optional[str] = None, **overrides) -> Config:
    """
    Smallest configuration that still exercises all three stages: 16 x 16 images and a U-Net++ of width 2.
    """
    settings = dict(image_size=16, batch_size=2, epochs=1, base_width=2, seed=0, lr=1e-3)
    if directory is not None:
        settings.update(dataset=os.path.join(directory, 'data'), checkpoint=os.path.join(directory, 'model.adr'),
                        run_log=os.path.join(directory, 'run_log.csv'))
    settings.update(overrides)
    return Config(**settings)


def random_batch(n: int = 1, size: int = 16, seed: int = 0, dtype: type = np.float32) -> np.ndarray:
    return np.random.default_rng(seed).uniform(0.05, 0.95, size=(n, 3, size, size)).astype(dtype)


def tiny_dataset(n: int = 4, size: int = 16, seed: int = 3) -> PairedDataset:
    synthetic = make_dataset(n, SceneSpec(seed=seed), size=size)
    return PairedDataset.from_samples(synthetic.samples)


def write_pairs(directory: str, n: int = 3, size: int = 16, seed: int = 0) -> None:
    """Write NNNN_input.ppm / NNNN_gt.ppm pairs straight into a directory."""
    os.makedirs(directory, exist_ok=True)
    rng = np.random.default_rng(seed)
    for index in range(n):
        IO.save_image(rng.uniform(0, 1, size=(3, size, size)), os.path.join(directory, f'{index:04d}_input.ppm'))
        IO.save_image(rng.uniform(0, 1, size=(3, size, size)), os.path.join(directory, f'{index:04d}_gt.ppm'))
