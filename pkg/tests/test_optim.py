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
from collections import OrderedDict
import math

import numpy as np
import pytest

from src.nn import Parameter
from src.optim import Adam, AdamState, adam_step
from src.tensor import NumericalError, ShapeError, default_dtype


def test_first_step_moves_by_learning_rate_times_sign():
    params = OrderedDict(w=Parameter(np.array([1.0, -2.0, 0.5], dtype=np.float32)))
    grads = {'w': np.array([0.3, -4.0, 1e-3], dtype=np.float32)}
    state = AdamState(lr=0.01)
    adam_step(params, grads, state)

    # Bias correction makes the first update lr * g / |g|
    np.testing.assert_allclose(params['w'].data, [0.99, -1.99, 0.49], atol=1e-5)
    assert state.step == 1


def _scalar_adam(theta: float, grads, lr: float, beta1: float = 0.9, beta2: float = 0.999,
                 eps: float = 1e-8) -> float:
    m = v = 0.0
    for step, g in enumerate(grads, start=1):
        m = beta1 * m + (1 - beta1) * g
        v = beta2 * v + (1 - beta2) * g * g
        m_hat = m / (1 - beta1 ** step)
        v_hat = v / (1 - beta2 ** step)
        theta -= lr * m_hat / (math.sqrt(v_hat) + eps)
    return theta


def test_two_steps_follow_the_scalar_update():
    start = np.array([1.0, -2.0, 0.5, 3.0])
    grad = np.array([0.3, -4.0, 1e-3, 0.0])
    with default_dtype(np.float64):
        params = OrderedDict(w=Parameter(start.copy()))
    state = AdamState(lr=0.01)
    adam_step(params, {'w': grad}, state)
    adam_step(params, {'w': grad}, state)

    expected = [_scalar_adam(float(s), [float(g)] * 2, lr=0.01) for s, g in zip(start, grad)]
    assert params['w'].dtype == np.float64
    np.testing.assert_allclose(params['w'].data, expected, rtol=0, atol=1e-7)
    assert state.step == 2


def test_missing_gradients_are_skipped():
    params = OrderedDict(used=Parameter(np.ones(2, dtype=np.float32)),
                         unused=Parameter(np.ones(2, dtype=np.float32)))
    state = AdamState(lr=0.1)
    adam_step(params, {'used': np.ones(2, dtype=np.float32), 'unused': None}, state)

    np.testing.assert_array_equal(params['unused'].data, [1.0, 1.0])
    np.testing.assert_array_equal(state.m['unused'], [0.0, 0.0])
    assert params['used'].data[0] < 1.0


def test_non_finite_gradient_raises_in_checked_mode():
    params = OrderedDict(w=Parameter(np.ones(2, dtype=np.float32)))
    with pytest.raises(NumericalError) as error:
        adam_step(params, {'w': np.array([np.nan, 1.0], dtype=np.float32)}, AdamState())
    assert error.value.name == 'w'


def test_moment_shape_mismatch_is_refused():
    state = AdamState()
    state.m['w'] = np.zeros(3, dtype=np.float32)
    state.v['w'] = np.zeros(3, dtype=np.float32)
    with pytest.raises(ShapeError):
        state.ensure({'w': Parameter(np.zeros(2, dtype=np.float32))})


def test_adam_minimises_a_quadratic():
    x = Parameter(np.array([0.0], dtype=np.float32))
    optimiser = Adam(OrderedDict(x=x), lr=0.05)
    for _ in range(600):
        loss = ((x - 3.0) * (x - 3.0)).sum()
        loss.backward()
        optimiser.step()
        optimiser.zero_grad()

    assert abs(float(x.data[0]) - 3.0) < 0.05
    assert optimiser.state.step == 600


def test_frozen_parameters_are_not_optimised():
    frozen = Parameter(np.ones(2, dtype=np.float32), requires_grad=False)
    optimiser = Adam(OrderedDict(frozen=frozen, free=Parameter(np.ones(2, dtype=np.float32))))
    assert list(optimiser.params) == ['free']
