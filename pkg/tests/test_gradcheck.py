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

from src.gradcheck import OP_TOLERANCE, PIPELINE_TOLERANCE, grad_check_op, pipeline_check, run_suite
from src.tensor import Function, Tensor
from src import functional as F

from .helper import tiny_config


class _SquareWithWrongGradient(Function):

    def forward(self, a):
        self.a = a
        return a * a

    def backward(self, grad):
        # Missing factor of two
        return grad * self.a,


def test_every_primitive_and_loss_term_passes_and_a_wrong_gradient_is_caught():
    x = Tensor(np.random.default_rng(0).uniform(0.5, 1.0, size=(3, 4)), requires_grad=True, dtype=np.float64)
    report = run_suite(include_pipeline=False, extra=[('wrong_square', _SquareWithWrongGradient.apply, [x])])

    assert {'conv2d', 'max_pool2d', 'softmax_lastdim', 'ssim_loss', 'perceptual_loss'} <= set(report['component'])
    failed = report.loc[~report['passed'], 'component'].tolist()
    assert failed == ['wrong_square']
    assert (report['tolerance'] == OP_TOLERANCE).all()


def test_float32_inputs_are_refused():
    with pytest.raises(ValueError):
        grad_check_op(F.exp, [Tensor(np.ones(3), requires_grad=True)])


def test_single_op_check():
    x = Tensor(np.linspace(-2, 2, 7), requires_grad=True, dtype=np.float64)
    assert grad_check_op(F.tanh, [x]) < OP_TOLERANCE


@pytest.mark.slow
def test_full_pipeline_gradients():
    errors = pipeline_check(tiny_config(), size=16)
    assert max(errors.values()) < PIPELINE_TOLERANCE
    assert 'stage1.alpha_n' in errors and 'stage3.head.weight' in errors
