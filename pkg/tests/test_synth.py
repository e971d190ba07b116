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
import json
import os

import numpy as np
import pytest

from src.configuration import ConfigError
from src.io import IO
from src.synth import (SceneSpec, beer_lambert_t, classical_forward, degrade, gen_depth, make_dataset, split_indices,
                       write_dataset)


@pytest.mark.parametrize('kind', ['linear_gradient', 'radial', 'value_noise'])
def test_depth_fields_are_normalised(kind):
    depth = gen_depth(SceneSpec(depth_kind=kind), 16, 12, np.random.default_rng(0))
    assert depth.shape == (1, 16, 12)
    assert depth.min() >= 0.0 and depth.max() <= 1.0


def test_linear_gradient_runs_top_to_bottom():
    depth = gen_depth(SceneSpec(depth_kind='linear_gradient'), 5, 3)
    np.testing.assert_allclose(depth[0, :, 0], [0.0, 0.25, 0.5, 0.75, 1.0])
    np.testing.assert_array_equal(depth[0, :, 0], depth[0, :, 2])


def test_red_is_attenuated_most():
    depth = np.full((1, 2, 2), 0.8)
    transmission = beer_lambert_t(depth, SceneSpec().beta)
    assert np.all(transmission[0] < transmission[1]) and np.all(transmission[1] < transmission[2])


def test_degenerate_spec_reduces_to_the_classical_model():
    spec = SceneSpec(depth_kind='linear_gradient', noise_sigma=0.0, turbidity_strength=0.0, jitter=0.0)
    target = np.random.default_rng(0).uniform(size=(3, 8, 8))
    sample = degrade(target, spec)

    expected = classical_forward(target, beer_lambert_t(gen_depth(spec, 8, 8), spec.beta), spec.A)
    np.testing.assert_allclose(sample.image, expected, atol=1e-6)
    assert sample.clamp_free
    assert not np.any(sample.noise) and not np.any(sample.turbidity)


def test_serial_and_parallel_generation_agree():
    spec = SceneSpec(seed=11)
    serial = make_dataset(4, spec, size=8)
    parallel = make_dataset(4, spec, size=8, n_jobs=2)
    for a, b in zip(serial.samples, parallel.samples):
        np.testing.assert_array_equal(a.image, b.image)
        np.testing.assert_array_equal(a.target, b.target)


def test_split_is_disjoint_and_deterministic():
    train, test = split_indices(10, seed=3)
    assert sorted(train + test) == list(range(10))
    assert not set(train) & set(test)
    assert len(test) == 2
    assert (train, test) == split_indices(10, seed=3)


def test_manifest_bytes_are_deterministic(temp_dir):
    spec = SceneSpec(seed=5)
    first = write_dataset(make_dataset(3, spec, size=8), os.path.join(temp_dir, 'a'))
    second = write_dataset(make_dataset(3, spec, size=8), os.path.join(temp_dir, 'b'))
    with open(first, 'rb') as fa, open(second, 'rb') as fb:
        assert fa.read() == fb.read()


def test_written_dataset_layout(temp_dir):
    dataset = make_dataset(3, SceneSpec(seed=5), size=8)
    manifest_path = write_dataset(dataset, temp_dir)
    with open(manifest_path) as fh:
        manifest = json.load(fh)

    assert manifest['n'] == 3 and manifest['truth']
    for entry in manifest['files']:
        stem = f"{entry['index']:04d}"
        assert entry['input'] == f"{entry['split']}/{stem}_input.ppm"
        assert IO.sha256(os.path.join(temp_dir, entry['gt'])) == entry['sha256_gt']
        depth = IO.load_f32(os.path.join(temp_dir, 'truth', f'{stem}_D.f32'))
        np.testing.assert_array_equal(depth, dataset.samples[entry['index']].depth)


def test_truth_can_be_skipped(temp_dir):
    write_dataset(make_dataset(2, SceneSpec(), size=8), temp_dir, write_truth=False)
    assert not os.path.exists(os.path.join(temp_dir, 'truth'))


def test_scene_spec_validation(temp_dir):
    with pytest.raises(ConfigError):
        SceneSpec(depth_kind='fog')
    with pytest.raises(ConfigError):
        SceneSpec(A=(0.2, 1.2, 0.5))

    path = os.path.join(temp_dir, 'spec.json')
    with open(path, 'w') as fh:
        json.dump({'depth_kind': 'radial', 'seeed': 1}, fh)
    with pytest.raises(ConfigError):
        SceneSpec.from_json(path)


def test_dataset_needs_samples():
    with pytest.raises(ValueError):
        make_dataset(0, SceneSpec())
