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

from src.configuration import AblationToggles
from src.losses import (LossWeights, PhiNetwork, TERMS, gaussian_window, l1_loss, retinex_loss, ssim, total_loss)
from src.model import ADRModel
from src.tensor import Tensor, ShapeError, default_dtype

from .helper import random_batch, tiny_config


@pytest.fixture(scope='module')
def phi():
    return PhiNetwork()


def test_ssim_of_identical_images_is_one():
    x = Tensor(random_batch(1, 16))
    assert abs(ssim(x, x).item() - 1.0) < 1e-5


def test_ssim_drops_for_different_images():
    assert ssim(Tensor(random_batch(1, 16, seed=0)), Tensor(random_batch(1, 16, seed=1))).item() < 0.5


def _windowed_ssim(x: np.ndarray, y: np.ndarray) -> float:
    # Weighted statistics of every full window, one window at a time
    window = gaussian_window()
    size = window.shape[0]
    c1, c2 = 0.01 ** 2, 0.03 ** 2
    values = []
    for channel in range(x.shape[0]):
        for top in range(x.shape[1] - size + 1):
            for left in range(x.shape[2] - size + 1):
                a = x[channel, top:top + size, left:left + size]
                b = y[channel, top:top + size, left:left + size]
                mu_a, mu_b = np.sum(window * a), np.sum(window * b)
                var_a = np.sum(window * (a - mu_a) ** 2)
                var_b = np.sum(window * (b - mu_b) ** 2)
                cov = np.sum(window * (a - mu_a) * (b - mu_b))
                values.append((2 * mu_a * mu_b + c1) * (2 * cov + c2) /
                              ((mu_a ** 2 + mu_b ** 2 + c1) * (var_a + var_b + c2)))
    return float(np.mean(values))


def test_ssim_matches_a_window_by_window_computation():
    rng = np.random.default_rng(11)
    with default_dtype(np.float64):
        for _ in range(20):
            x, y = rng.uniform(size=(2, 3, 32, 32))
            fast = ssim(Tensor(x[None]), Tensor(y[None])).item()
            assert abs(fast - _windowed_ssim(x, y)) < 1e-6


def test_ssim_needs_the_full_window():
    x = Tensor(random_batch(1, 8))
    with pytest.raises(ShapeError):
        ssim(x, x)


def test_gaussian_window_is_normalised():
    window = gaussian_window()
    assert window.shape == (11, 11)
    assert abs(window.sum() - 1.0) < 1e-12


def test_l1_of_identical_images_is_zero():
    x = Tensor(random_batch(2, 8))
    assert l1_loss(x, x).item() == 0.0


def test_l1_shape_mismatch_names_dimension():
    with pytest.raises(ShapeError) as error:
        l1_loss(Tensor(random_batch(1, 8)), Tensor(random_batch(1, 16)))
    assert error.value.dimension == 2


def test_retinex_loss_needs_single_channel_illumination():
    reflectance = Tensor(random_batch(1, 8))
    with pytest.raises(ShapeError):
        retinex_loss(reflectance, reflectance, reflectance)
    ones = Tensor(np.ones((1, 1, 8, 8)))
    assert retinex_loss(ones, reflectance, reflectance).item() == 0.0


def test_total_is_the_weighted_sum(phi):
    model = ADRModel.from_config(tiny_config())
    output = model(Tensor(random_batch(2, 16)))
    report = total_loss(output, Tensor(random_batch(2, 16, seed=5)), LossWeights(), AblationToggles(), phi)

    assert list(report.terms) == list(TERMS)
    assert report.recompute() == report.total.data
    for value in report.values().values():
        assert np.isfinite(value)


def test_disabled_terms_get_zero_weight(phi):
    config = tiny_config(ssim_loss=False, perc_loss=False, retinex_stage=False)
    output = ADRModel.from_config(config)(Tensor(random_batch(1, 16)))
    report = total_loss(output, Tensor(random_batch(1, 16, seed=5)), config.weights, config.ablation, phi)

    for name in ('ssim', 'perc', 'retinex'):
        assert report.weights[name] == 0.0
        assert report.values()[name] == 0.0
    assert report.weights['l1'] == 1.0 and report.weights['dehaze'] == 0.3


def test_perceptual_term_needs_the_feature_network():
    output = ADRModel.from_config(tiny_config())(Tensor(random_batch(1, 16)))
    with pytest.raises(ValueError):
        total_loss(output, Tensor(random_batch(1, 16)), phi=None)


def test_feature_network_is_frozen(phi):
    model = ADRModel.from_config(tiny_config())
    report = total_loss(model(Tensor(random_batch(1, 16))), Tensor(random_batch(1, 16, seed=5)), phi=phi)
    report.total.backward()
    assert all(p.grad is None for p in phi.parameters())
    assert model.stage3.head.weight.grad is not None


def test_negative_weights_are_rejected():
    with pytest.raises(ValueError):
        LossWeights(lambda3=-0.1)


def test_feature_network_is_fixed_by_its_seed():
    a, b = PhiNetwork(), PhiNetwork()
    for (name, p), q in zip(a.named_parameters(), b.parameters()):
        assert name.startswith('phi.')
        np.testing.assert_array_equal(p.data, q.data)
