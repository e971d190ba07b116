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
import os

import numpy as np
import pytest

from src.checkpoint import save_checkpoint
from src.datasets import DataError
from src.inference import PANELS, decompose, enhance, evaluate_checkpoint, fit_to_grid
from src.io import IO
from src.model import ADRModel
from src.synth import SceneSpec, make_dataset, write_dataset

from .helper import tiny_config


@pytest.fixture
def checkpoint(temp_dir):
    config = tiny_config()
    return save_checkpoint(os.path.join(temp_dir, 'model.adr'), ADRModel.from_config(config), config)


def _image(temp_dir: str, size: int = 16) -> str:
    path = os.path.join(temp_dir, 'dive.ppm')
    IO.save_image(np.random.default_rng(0).uniform(size=(3, size, size)), path)
    return path


def test_enhance_writes_one_image(temp_dir, checkpoint):
    out = os.path.join(temp_dir, 'out')
    result = enhance(checkpoint, _image(temp_dir), out)
    assert list(result.paths) == ['enhanced']
    assert os.listdir(out) == ['dive_enhanced.ppm']
    assert IO.load_image(result.paths['enhanced']).shape == (3, 16, 16)
    assert result.enhanced.shape == (3, 16, 16)


def test_dump_intermediates_writes_every_panel(temp_dir, checkpoint):
    out = os.path.join(temp_dir, 'out')
    result = enhance(checkpoint, _image(temp_dir), out, dump_intermediates=True)
    assert list(result.paths) == [suffix for suffix, _, _ in PANELS]
    assert sorted(os.listdir(out)) == sorted(f'dive_{suffix}.ppm' for suffix, _, _ in PANELS)


def test_off_grid_images_are_resized_with_a_warning(temp_dir, checkpoint):
    with pytest.warns(UserWarning, match='resizing'):
        result = enhance(checkpoint, _image(temp_dir, size=18), os.path.join(temp_dir, 'out'))
    assert result.image.shape == (3, 16, 16)


def test_strict_mode_refuses_off_grid_images(temp_dir, checkpoint):
    with pytest.raises(DataError):
        enhance(checkpoint, _image(temp_dir, size=18), os.path.join(temp_dir, 'out'), strict=True)


def test_fit_to_grid_keeps_valid_sizes():
    image = np.zeros((3, 8, 24), dtype=np.float32)
    assert fit_to_grid(image) is image


def test_decompose_figure(temp_dir, checkpoint):
    out = os.path.join(temp_dir, 'out')
    result = decompose(checkpoint, _image(temp_dir), out, figure=True)
    assert result.paths['figure'] == os.path.join(out, 'dive_panels.png')
    assert os.path.isfile(result.paths['figure'])
    assert len(result.paths) == len(PANELS) + 1


def test_evaluate_checkpoint(temp_dir, checkpoint):
    data = os.path.join(temp_dir, 'data')
    synthetic = make_dataset(5, SceneSpec(seed=1), size=16)
    write_dataset(synthetic, data, write_truth=False)

    model_report, input_report = evaluate_checkpoint(checkpoint, data)
    assert model_report.count == input_report.count == len(synthetic.test_indices)
    assert model_report.label == 'ADR (this checkpoint)'
    assert model_report.ms_per_image is not None
    assert input_report.label == 'degraded input'
