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
from src.model import ADRModel
from src.physics import DehazeBundle
from src.retinex import RetinexBundle
from src.unetpp import STAGE_INPUT_LAYOUT, AttentionBlock, EnhanceNet, StageInput20, assemble_input
from src.tensor import Tensor, ShapeError

from .helper import random_batch, tiny_config


def test_stage_input_channel_layout():
    expected = {'image': (0, 3), 'dehazed': (3, 6), 'illumination_enhanced': (6, 7), 'reflectance_refined': (7, 10),
                'depth': (10, 11), 'transmission': (11, 14), 'noise': (14, 17), 'turbidity': (17, 20)}
    for name, channels in expected.items():
        assert StageInput20.channel_range(name) == channels


def test_stage_input_needs_twenty_channels():
    with pytest.raises(ShapeError) as error:
        StageInput20(Tensor(np.zeros((1, 19, 8, 8))))
    assert error.value.dimension == 1


@pytest.mark.parametrize('name', [name for name, _ in STAGE_INPUT_LAYOUT])
def test_stage_input_slice_reaches_only_its_source(name):
    rng = np.random.default_rng(0)
    sources = {field: Tensor(rng.uniform(size=(1, channels, 8, 8)), requires_grad=True, name=field)
               for field, channels in STAGE_INPUT_LAYOUT}
    dehaze = DehazeBundle(depth=sources['depth'], transmission=sources['transmission'],
                          background_light=Tensor(np.full((1, 3), 0.5)), noise=sources['noise'],
                          turbidity=sources['turbidity'], dehazed=sources['dehazed'])
    retinex = RetinexBundle(illumination=Tensor(np.ones((1, 1, 8, 8))), reflectance=Tensor(np.ones((1, 3, 8, 8))),
                            gamma=Tensor(np.ones((1, 1, 8, 8))),
                            illumination_enhanced=sources['illumination_enhanced'],
                            reflectance_refined=sources['reflectance_refined'])

    stage_input = assemble_input(sources['image'], dehaze, retinex)
    np.testing.assert_array_equal(stage_input.slice(name).data, sources[name].data)

    stage_input.slice(name).sum().backward()
    for field, source in sources.items():
        if field == name:
            np.testing.assert_array_equal(source.grad, 1.0)
        else:
            assert source.grad is None or not np.any(source.grad), field


def test_enhance_net_node_shapes():
    net = EnhanceNet(np.random.default_rng(0), base_width=2)
    out = net(Tensor(np.random.default_rng(1).uniform(size=(1, 20, 16, 16))))
    assert out.shape == (1, 3, 16, 16)
    assert np.all((out.data >= 0) & (out.data <= 1))

    shapes = net.last_node_shapes
    assert len(shapes) == 10
    assert shapes['X^{0,0}'] == (1, 2, 16, 16)
    assert shapes['X^{3,0}'] == (1, 16, 2, 2)
    assert shapes['X^{1,2}'] == (1, 4, 8, 8)
    assert shapes['X^{0,3}'] == (1, 2, 16, 16)


def test_plain_unet_is_smaller_with_the_same_output():
    dense = EnhanceNet(np.random.default_rng(0), base_width=2)
    plain = EnhanceNet(np.random.default_rng(0), base_width=2, dense_skips=False)
    assert plain.num_parameters() < dense.num_parameters()

    x = Tensor(np.random.default_rng(1).uniform(size=(2, 20, 8, 8)))
    assert plain(x).shape == dense(x).shape == (2, 3, 8, 8)
    assert len(plain.last_node_shapes) == 7


def test_enhance_net_needs_sizes_divisible_by_eight():
    net = EnhanceNet(np.random.default_rng(0), base_width=2)
    with pytest.raises(ShapeError):
        net(Tensor(np.zeros((1, 20, 12, 16))))


def test_attention_is_permutation_equivariant():
    block = AttentionBlock(8, np.random.default_rng(0))
    features = np.random.default_rng(1).normal(size=(1, 8, 2, 3))
    permutation = np.random.default_rng(2).permutation(6)

    def shuffle(array):
        return array.reshape(1, 8, 6)[:, :, permutation].reshape(1, 8, 2, 3)

    out = block(Tensor(features)).data
    out_shuffled = block(Tensor(shuffle(features))).data
    np.testing.assert_allclose(out_shuffled, shuffle(out), atol=1e-5)


def test_attention_weights_are_distributions():
    block = AttentionBlock(8, np.random.default_rng(0))
    block(Tensor(np.random.default_rng(1).normal(size=(2, 8, 2, 2))))
    assert block.last_attention.shape == (2, 4, 4, 4)
    np.testing.assert_allclose(block.last_attention.sum(axis=-1), 1.0, rtol=1e-5)


def test_attention_feed_forward_adds_parameters():
    plain = AttentionBlock(8, np.random.default_rng(0))
    with_ffn = AttentionBlock(8, np.random.default_rng(0), feed_forward=True)
    # Two LayerNorm vectors, 8 x 16 + 16 and 16 x 8 + 8
    assert with_ffn.num_parameters() - plain.num_parameters() == 16 + 144 + 136


def test_model_output_shapes():
    model = ADRModel.from_config(tiny_config())
    output = model(Tensor(random_batch(2, 16)))
    assert output.enhanced.shape == (2, 3, 16, 16)
    assert output.stage_input.tensor.shape == (2, 20, 16, 16)

    tensors = output.named_tensors()
    assert len(tensors) == 13
    assert list(tensors)[0] == 'depth' and list(tensors)[-1] == 'enhanced'
    assert output.first_non_finite() is None


def test_retinex_bypass_passes_dehazed_through():
    model = ADRModel.from_config(tiny_config(retinex_stage=False))
    output = model(Tensor(random_batch(1, 16)))
    dehazed = output.dehaze.dehazed.data

    for name in ('illumination', 'gamma', 'illumination_enhanced'):
        np.testing.assert_array_equal(getattr(output.retinex, name).data, 1.0)
    np.testing.assert_array_equal(output.retinex.reflectance.data, dehazed)
    np.testing.assert_array_equal(output.stage_input.slice('reflectance_refined').data, dehazed)
    assert not output.retinex_active


def test_enhancer_bypass_starts_as_clamped_dehazed_image():
    model = ADRModel.from_config(tiny_config(unetpp_stage=False))
    output = model(Tensor(random_batch(1, 16)))
    np.testing.assert_allclose(output.enhanced.data, np.clip(output.dehaze.dehazed.data, 0, 1), atol=1e-6)


def test_ablations_share_initial_weights():
    full = ADRModel(seed=0, base_width=2).state_dict()
    for toggle in ('turbidity_term', 'noise_term', 'retinex_stage', 'unetpp_stage'):
        variant = ADRModel(seed=0, base_width=2, ablation=AblationToggles.without(toggle)).state_dict()
        assert list(variant) == list(full)
        for name, array in full.items():
            np.testing.assert_array_equal(variant[name], array)


def test_parameter_names_are_dotted_and_unique():
    names = [name for name, _ in ADRModel(seed=0, base_width=2).named_parameters()]
    assert len(names) == len(set(names))
    assert 'stage1.depth_branch.conv0.weight' in names
    assert 'stage3.attention.query.weight' in names
    assert 'bypass.refine.weight' in names
