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
import numpy as np
import pytest

from src.physics import BackgroundLight, PhysicsStage, SharedEncoder, compose_noise, compose_turbidity, dehaze, T_MIN
from src.synth import SceneSpec, beer_lambert_t, classical_forward, make_dataset
from src.tensor import Tensor, ShapeError

from .helper import random_batch


@pytest.fixture(scope='module')
def stage():
    return PhysicsStage(np.random.default_rng(0))


def test_dehaze_inverts_the_classical_model():
    rng = np.random.default_rng(0)
    target = rng.uniform(0, 1, size=(3, 8, 8))
    depth = rng.uniform(0, 1, size=(1, 8, 8))
    transmission = beer_lambert_t(depth, (0.9, 0.5, 0.3))
    light = (0.2, 0.6, 0.7)
    observed = classical_forward(target, transmission, light)

    # exp(-0.9) > t_min everywhere, so the clamp is inactive
    assert transmission.min() > T_MIN
    recovered = dehaze(Tensor(observed[None]), Tensor(transmission[None]), Tensor(np.array([light])))
    np.testing.assert_allclose(recovered.data[0], target, atol=1e-5)


def test_dehaze_inverts_simulated_noise_and_turbidity():
    dataset = make_dataset(100, SceneSpec(seed=3), size=32)
    checked = 0
    for sample in dataset.samples:
        if not sample.clamp_free or sample.transmission.min() < T_MIN:
            continue
        recovered = dehaze(Tensor(sample.image[None]), Tensor(sample.transmission[None]),
                           Tensor(sample.background_light[None]), Tensor(sample.noise[None]),
                           Tensor(sample.turbidity[None]))
        assert np.abs(recovered.data[0] - sample.target).max() < 1e-5
        checked += 1
    assert checked > 50


def test_dehaze_clamps_the_denominator():
    image = Tensor(np.full((1, 3, 2, 2), 0.5))
    transmission = Tensor(np.zeros((1, 3, 2, 2)))
    light = Tensor(np.full((1, 3), 0.5))
    # I - A (1 - t) = 0 for any t_min, and the division stays finite
    np.testing.assert_allclose(dehaze(image, transmission, light).data, 0.0, atol=1e-6)


def test_turbidity_vanishes_in_clear_water_and_at_the_camera():
    hat = Tensor(np.random.default_rng(1).normal(size=(1, 3, 4, 4)) * 5)
    beta_t = Tensor(0.3)
    depth = Tensor(np.random.default_rng(2).uniform(size=(1, 1, 4, 4)))

    clear = compose_turbidity(hat, Tensor(np.ones((1, 3, 4, 4))), depth, beta_t)
    np.testing.assert_allclose(clear.data, 0.0, atol=1e-7)

    at_camera = compose_turbidity(hat, Tensor(np.full((1, 3, 4, 4), 0.4)), Tensor(np.zeros((1, 1, 4, 4))), beta_t)
    np.testing.assert_allclose(at_camera.data, 0.0, atol=1e-7)


def test_turbidity_is_bounded():
    rng = np.random.default_rng(3)
    transmission = Tensor(rng.uniform(size=(1, 3, 4, 4)))
    depth = Tensor(rng.uniform(size=(1, 1, 4, 4)))
    out = compose_turbidity(Tensor(rng.normal(size=(1, 3, 4, 4)) * 10), transmission, depth, Tensor(0.3))
    bound = 0.3 * (1 - transmission.data) * depth.data
    assert np.all(np.abs(out.data) <= bound + 1e-6)


def test_noise_at_zero_depth_is_scaled_estimate():
    hat = Tensor(np.random.default_rng(4).normal(size=(1, 3, 4, 4)))
    out = compose_noise(hat, Tensor(np.zeros((1, 1, 4, 4))), Tensor(0.1), Tensor(1.0))
    np.testing.assert_allclose(out.data, 0.1 * hat.data, rtol=1e-6)


def test_physics_stage_shapes_and_ranges(stage):
    bundle = stage(Tensor(random_batch(2, 16)))
    assert bundle.depth.shape == (2, 1, 16, 16)
    assert bundle.transmission.shape == (2, 3, 16, 16)
    assert bundle.background_light.shape == (2, 3)
    for name in ('noise', 'turbidity', 'dehazed'):
        assert getattr(bundle, name).shape == (2, 3, 16, 16)

    for bounded in (bundle.depth, bundle.transmission, bundle.background_light):
        assert np.all((bounded.data >= 0) & (bounded.data <= 1))


def test_encoder_needs_sizes_divisible_by_four():
    encoder = SharedEncoder(np.random.default_rng(0))
    with pytest.raises(ShapeError) as error:
        encoder(Tensor(np.zeros((1, 3, 6, 8))))
    assert error.value.dimension == 2


def test_disabled_terms_are_zero():
    stage = PhysicsStage(np.random.default_rng(0), noise_term=False, turbidity_term=False)
    bundle = stage(Tensor(random_batch(1, 8)))
    assert not np.any(bundle.noise.data)
    assert not np.any(bundle.turbidity.data)


def test_encoder_levels():
    levels = SharedEncoder(np.random.default_rng(0))(Tensor(random_batch(1, 8)))
    assert [level.shape for level in levels] == [(1, 32, 8, 8), (1, 64, 4, 4), (1, 128, 2, 2)]


def test_background_light_ignores_pixel_order():
    rng = np.random.default_rng(4)
    head = BackgroundLight(rng)
    features = rng.normal(size=(2, 128, 4, 4))
    flat = features.reshape(2, 128, 16)
    shuffled = flat[:, :, rng.permutation(16)].reshape(2, 128, 4, 4)

    light = head(Tensor(features)).data
    assert light.shape == (2, 3)
    np.testing.assert_allclose(head(Tensor(shuffled)).data, light, atol=1e-6)
