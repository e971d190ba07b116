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
import math
import os

import numpy as np
import pandas as pd
import pytest

from src.datasets import PairedDataset
from src.inference import predictor
from src.io import IO
from src.losses import PhiNetwork
from src.metrics import evaluate
from src.model import ADRModel
from src.tensor import NumericalError, checked_mode
from src.training import (RUN_LOG_COLUMNS, Trainer, ablation_variants, fingerprint_distance, gradient_fingerprint,
                          run_ablation_study, train)

from .helper import tiny_config, tiny_dataset


@pytest.fixture(scope='module')
def dataset():
    return tiny_dataset(n=5)


def _read(path: str) -> bytes:
    with open(path, 'rb') as fh:
        return fh.read()


def test_one_step_per_batch(temp_dir, dataset):
    config = tiny_config(temp_dir, epochs=2)
    result = train(config, dataset=dataset, progress=False)

    assert result.steps == config.epochs * math.ceil(len(dataset) / config.batch_size) == 6
    assert list(result.run_log.columns) == RUN_LOG_COLUMNS
    assert result.run_log['step'].tolist() == list(range(1, 7))
    assert result.run_log['epoch'].tolist() == [0, 0, 0, 1, 1, 1]
    assert np.all(np.isfinite(result.run_log['total']))
    assert os.path.isfile(config.checkpoint)
    assert IO.read_csv(config.run_log)['step'].tolist() == list(range(1, 7))


def test_intermediate_checkpoints(temp_dir, dataset):
    config = tiny_config(temp_dir, epochs=2, checkpoint_every=1)
    result = train(config, dataset=dataset, progress=False)
    assert result.checkpoint == config.checkpoint


def test_strict_mode_is_byte_reproducible(temp_dir, dataset):
    config = tiny_config(temp_dir, strict_deterministic=True)

    train(config, dataset=dataset, progress=False)
    checkpoint, run_log = _read(config.checkpoint), _read(config.run_log)
    train(config, dataset=dataset, progress=False)

    assert _read(config.checkpoint) == checkpoint
    assert _read(config.run_log) == run_log
    assert (IO.read_csv(config.run_log)['wall_ms'] == 0).all()


def test_training_without_the_enhancer(dataset):
    result = Trainer(tiny_config(unetpp_stage=False), dataset, progress=False).fit(save=False)
    assert result.steps == 3
    assert np.all(np.isfinite(result.run_log['total']))


def test_non_finite_input_stops_at_the_operation(dataset):
    inputs = dataset.inputs.copy()
    inputs[0, 0, 0, 0] = np.nan
    poisoned = PairedDataset(dataset.ids, inputs, dataset.targets)
    with pytest.raises(NumericalError):
        Trainer(tiny_config(), poisoned, progress=False).fit(save=False)


def test_non_finite_loss_names_a_tensor(dataset):
    inputs = dataset.inputs.copy()
    inputs[:] = np.nan
    poisoned = PairedDataset(dataset.ids, inputs, dataset.targets)
    with checked_mode(False), np.errstate(invalid='ignore'), pytest.raises(NumericalError) as error:
        Trainer(tiny_config(), poisoned, progress=False).fit(save=False)
    assert error.value.name is not None


def test_every_ablation_changes_the_gradient_fingerprint(dataset):
    config = tiny_config()
    phi = PhiNetwork()
    inputs, targets = dataset.inputs[:2], dataset.targets[:2]
    full = gradient_fingerprint(config, inputs, targets, phi)

    assert fingerprint_distance(full, gradient_fingerprint(config, inputs, targets, phi)) == 0.0
    variants = ablation_variants()
    assert len(variants) == 7
    for name, toggles in variants.items():
        if name == 'full':
            continue
        variant = gradient_fingerprint(config.with_ablation(toggles), inputs, targets, phi)
        assert list(variant.index) == list(full.index)
        assert fingerprint_distance(full, variant) > 0.0, name


def test_disabled_stages_receive_no_gradient(dataset):
    fingerprint = gradient_fingerprint(tiny_config(retinex_stage=False, unetpp_stage=False), dataset.inputs[:1],
                                       dataset.targets[:1])
    assert (fingerprint[[n for n in fingerprint.index if n.startswith(('stage2.', 'stage3.'))]] == 0).all()
    assert fingerprint['bypass.refine.weight'] > 0


def test_resume_matches_a_continuous_run(temp_dir, dataset):
    continuous = train(tiny_config(os.path.join(temp_dir, 'a'), epochs=2), dataset=dataset, progress=False)

    first = train(tiny_config(os.path.join(temp_dir, 'b'), epochs=1), dataset=dataset, progress=False)
    resumed = train(tiny_config(os.path.join(temp_dir, 'b'), epochs=2), dataset=dataset, resume=first.checkpoint,
                    progress=False)

    assert resumed.run_log['step'].tolist() == [4, 5, 6]
    np.testing.assert_array_equal(resumed.run_log['total'].to_numpy(), continuous.run_log['total'].to_numpy()[3:])
    for (name, array), other in zip(continuous.model.state_dict().items(), resumed.model.state_dict().values()):
        np.testing.assert_array_equal(array, other, err_msg=name)


@pytest.mark.slow
def test_overfits_a_single_pair(temp_dir):
    single = tiny_dataset(n=1)
    result = train(tiny_config(temp_dir, epochs=60, base_width=4, batch_size=1), dataset=single, progress=False)
    totals = result.run_log['total']
    assert totals.iloc[-5:].mean() < 0.8 * totals.iloc[0]


@pytest.mark.slow
def test_short_training_improves_psnr(temp_dir):
    data = tiny_dataset(n=8)
    config = tiny_config(temp_dir, epochs=5, base_width=4)
    before = evaluate(predictor(ADRModel.from_config(config)), data.ids, data.inputs, data.targets)
    result = train(config, dataset=data, progress=False)
    after = evaluate(predictor(result.model), data.ids, data.inputs, data.targets)
    assert after.mean_psnr > before.mean_psnr


@pytest.mark.slow
def test_ablation_study(temp_dir):
    data = tiny_dataset(n=6)
    train_set = PairedDataset(data.ids[:4], data.inputs[:4], data.targets[:4])
    test_set = PairedDataset(data.ids[4:], data.inputs[4:], data.targets[4:])
    table = run_ablation_study(tiny_config(epochs=1), train_set, test_set, out_dir=temp_dir, progress=False)

    assert len(table) == 7
    assert table['variant'].iloc[0] == 'full model'
    assert table['fingerprint_distance'].iloc[0] == 0.0
    assert (table['fingerprint_distance'].iloc[1:] > 0).all()
    pd.testing.assert_frame_equal(IO.read_csv(os.path.join(temp_dir, 'ablation.csv'), typed=True), table)
    assert os.path.isfile(os.path.join(temp_dir, 'unetpp_stage.adr'))
