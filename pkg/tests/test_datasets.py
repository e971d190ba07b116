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

from src.datasets import DataError, PairedDataset
from src.io import IO
from src.synth import SceneSpec, make_dataset, write_dataset

from .helper import write_pairs


def test_manifest_layout(temp_dir):
    synthetic = make_dataset(5, SceneSpec(seed=2), size=8)
    write_dataset(synthetic, temp_dir, write_truth=False)

    train = PairedDataset.from_directory(temp_dir, split='train')
    test = PairedDataset.from_directory(temp_dir, split='test')
    assert train.ids == [f'{i:04d}' for i in synthetic.train_indices]
    assert test.ids == [f'{i:04d}' for i in synthetic.test_indices]
    assert len(PairedDataset.from_directory(temp_dir, split='all')) == 5
    assert train.inputs.shape == (len(train), 3, 8, 8)


def test_split_directories_without_manifest(temp_dir):
    write_pairs(os.path.join(temp_dir, 'train'), n=3)
    write_pairs(os.path.join(temp_dir, 'test'), n=1)
    assert len(PairedDataset.from_directory(temp_dir, split='train')) == 3
    assert len(PairedDataset.from_directory(temp_dir, split='test')) == 1


def test_flat_layout(temp_dir):
    write_pairs(temp_dir, n=2)
    dataset = PairedDataset.from_directory(temp_dir)
    assert dataset.ids == ['0000', '0001']


def test_user_layout_is_split_lexicographically(temp_dir):
    rng = np.random.default_rng(0)
    for sub in ('input', 'gt'):
        os.makedirs(os.path.join(temp_dir, sub))
        for index in range(5):
            IO.save_image(rng.uniform(size=(3, 8, 8)), os.path.join(temp_dir, sub, f'dive_{index}.ppm'))

    with pytest.warns(UserWarning, match='lexicographically'):
        train = PairedDataset.from_directory(temp_dir, split='train')
    with pytest.warns(UserWarning):
        test = PairedDataset.from_directory(temp_dir, split='test')
    assert train.ids == ['dive_0', 'dive_1', 'dive_2', 'dive_3']
    assert test.ids == ['dive_4']


def test_missing_ground_truth(temp_dir):
    write_pairs(temp_dir, n=2)
    os.remove(os.path.join(temp_dir, '0001_gt.ppm'))
    with pytest.raises(DataError):
        PairedDataset.from_directory(temp_dir)


def test_empty_directory(temp_dir):
    with pytest.raises(DataError):
        PairedDataset.from_directory(temp_dir)
    with pytest.raises(DataError):
        PairedDataset.from_directory(os.path.join(temp_dir, 'absent'))


def test_images_are_resized(temp_dir):
    write_pairs(temp_dir, n=2, size=12)
    dataset = PairedDataset.from_directory(temp_dir, image_size=8)
    assert dataset.inputs.shape == (2, 3, 8, 8)
    assert dataset.image_size == 8


def test_batches_include_the_partial_last_batch(temp_dir):
    write_pairs(temp_dir, n=5)
    dataset = PairedDataset.from_directory(temp_dir)
    batches = list(dataset.batches(2))
    assert [len(ids) for ids, _, _ in batches] == [2, 2, 1]
    assert dataset.num_batches(2) == 3

    # Shuffling visits every pair exactly once
    shuffled = [i for ids, _, _ in dataset.batches(2, np.random.default_rng(0)) for i in ids]
    assert sorted(shuffled) == dataset.ids


def test_mismatched_lengths_are_refused():
    with pytest.raises(DataError):
        PairedDataset(['a'], [np.zeros((3, 8, 8))], [])
